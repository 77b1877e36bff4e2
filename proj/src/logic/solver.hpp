#pragma once

#include <string>
#include <vector>

#include "logic/ground.hpp"

namespace relspace::logic {

struct AnswerSet {
  std::vector<int> literals;    // sorted literal ids
  std::vector<int> applied_cr;  // sorted cr_ids of fired CR rules

  bool operator==(const AnswerSet& o) const {
    return literals == o.literals && applied_cr == o.applied_cr;
  }
  bool operator<(const AnswerSet& o) const {
    if (literals != o.literals) return literals < o.literals;
    return applied_cr < o.applied_cr;
  }
};

struct SolveLimits {
  long max_decisions = 50000000;
  size_t max_models = SIZE_MAX;
};

struct SolveResult {
  std::vector<AnswerSet> models;
  bool truncated = false;   // budget ran out before the enumeration finished
  long decisions = 0;
  std::string diagnostic;
};

// Gelfond-Lifschitz reduct: drops rules whose default-negated body intersects
// the candidate, strips default negation from the rest.
std::vector<GroundRule> reduct(const std::vector<GroundRule>& rules,
                               const std::vector<char>& candidate);

// Least model of a positive program (body_neg ignored), as a literal mask.
std::vector<char> least_model(size_t literal_count, const std::vector<GroundRule>& rules);

// Stable-model test for a consistent candidate against the given rules.
bool is_stable_model(size_t literal_count, const std::vector<GroundRule>& rules,
                     const std::vector<char>& candidate);

// All consistent stable models of the regular rules, sorted by literal set.
// CR rules are ignored.
SolveResult answer_sets(const GroundProgram& gp, const SolveLimits& limits = {});

// Exhaustive oracle over subsets of head literals. Requires <= 16 atoms.
std::vector<AnswerSet> brute_force_answer_sets(const GroundProgram& gp);

// Regular models if any exist, otherwise models with a cardinality-minimal
// set of CR rules promoted to regular rules.
SolveResult solve_with_cr(const GroundProgram& gp, const SolveLimits& limits = {});

}  // namespace relspace::logic
