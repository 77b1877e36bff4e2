#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "grounding.hpp"
#include "induction.hpp"
#include "reports.hpp"
#include "scene.hpp"

namespace relspace::harness {

struct ExperimentReport {
  std::string name;
  Csv csv;
  // Timing and plot data that must not perturb the byte-identical CSVs.
  std::vector<std::pair<std::string, std::string>> sidecars;  // filename, text
};

// One labeled object pair for the grounding comparison: histograms plus the
// geometric and ground-truth relation labels, oriented "a is <rel> of b".
struct PairSample {
  std::string a, b;
  grounding::RelationLabel oracle, qsr;
  grounding::Histogram position, distance;
};

std::vector<PairSample> grounding_pair_pool(uint64_t seed, const Config& cfg);

struct GroundingSchemes {
  double msr_feedback = 0;
  double msr_qsr_feedback = 0;
  double combined = 0;
  double qsr = 0;  // reference, not a reported scheme
};

GroundingSchemes run_grounding_subset(const std::vector<PairSample>& pool, uint64_t seed,
                                      int subset, const Config& cfg);

// Ground truth the induction experiment scores against: the ablated axioms
// plus the defaults that actually hold in the scene generator.
struct InductionTruth {
  std::vector<std::string> normal;
  std::vector<std::string> defaults;
};

InductionTruth induction_truth();

// Mixed-arrangement scenes for one induction set.
std::vector<learn::RelationalExample> induction_corpus(uint64_t seed, int set_index, int scenes);

struct PlanningTrial {
  scene::Scene scene;
  std::string goal_object, goal_location;
};

std::vector<PlanningTrial> planning_trials(uint64_t seed, int initial_states, int goals);

ExperimentReport experiment_grounding(const Config& cfg, uint64_t seed);
ExperimentReport experiment_attention(const Config& cfg, uint64_t seed);
ExperimentReport experiment_induction(const Config& cfg, uint64_t seed);
ExperimentReport experiment_planning(const Config& cfg, uint64_t seed);

// name is one of grounding, attention, induction, planning, or all.
std::vector<ExperimentReport> run_experiments(const std::string& name, const Config& cfg,
                                              uint64_t seed);

}  // namespace relspace::harness
