#pragma once

#include <map>
#include <string>
#include <vector>

#include "attention.hpp"
#include "grounding.hpp"
#include "induction.hpp"
#include "learner.hpp"
#include "logic/reason.hpp"
#include "scene.hpp"

namespace relspace::harness {

// Which pieces of the hand-written knowledge base to emit. Experiments ablate
// individual axioms to create knowledge gaps on purpose.
struct KbOptions {
  bool stability_default = true;    // not above anything means stable
  bool occlusion_default = true;    // behind nothing means visible
  bool occlusion_positive = true;   // behind something means occluded
  bool irregular_support = true;    // resting on an irregular surface is unsafe
  std::string extra;                // learned rule text, appended verbatim
};

// Sort and predicate declarations covering the scene's objects.
std::string kb_declarations(const scene::Scene& s);
std::string kb_axioms(const KbOptions& opt);
logic::Program scene_kb(const scene::Scene& s, const KbOptions& opt);

std::vector<logic::Literal> relation_literals(const std::vector<grounding::RelationFact>& facts);
std::vector<logic::Literal> attribute_literals(const scene::Scene& s);

// Relation facts straight from scene ground truth, bypassing point clouds.
std::vector<grounding::RelationFact> oracle_relation_facts(const scene::Scene& s);

struct TargetDecision {
  logic::Label3 label = logic::Label3::unknown;  // unknown = undecided
  std::string source = "reasoning";              // reasoning or learner
};

struct PipelineResult {
  std::map<std::string, TargetDecision> occlusion;  // object id
  std::map<std::string, TargetDecision> stability;  // structure id
  std::vector<scene::RegionOfInterest> rois;
  // Failed targets that justified each ROI, parallel to rois. Empty entries
  // never happen; the invariant checks lean on this.
  std::vector<std::vector<std::string>> roi_origins;
  bool solver_failed = false;
  std::string diagnostic;
};

// Train-mode output: examples appended per ROI (learner) and per failed
// object (induction).
struct TrainingBuffers {
  std::vector<learn::Example> learner;
  std::vector<learn::RelationalExample> induction;
};

struct PipelineConfig {
  bool train = false;          // train mode compares against scene truth
  int points_per_object = 200; // cloud resolution for active grounding
  logic::SolveLimits limits;
};

// Full per-scene pass: extract relations, reason, and route whatever the
// reasoner could not settle through attention to the learner. In train mode
// failures also append to buffers; in test mode a missing model leaves the
// gaps explicitly undecided. msr_store and model may be null. Passing facts
// skips the point-cloud extraction (callers that evaluate several models on
// one scene cache them).
PipelineResult run_pipeline(const scene::Scene& s, const logic::Program& kb,
                            const grounding::VisualWordStore* msr_store,
                            const learn::Model* model, const PipelineConfig& config,
                            TrainingBuffers* buffers = nullptr,
                            const std::vector<grounding::RelationFact>* facts = nullptr);

}  // namespace relspace::harness
