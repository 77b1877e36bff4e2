#pragma once

#include <map>
#include <string>
#include <vector>

#include "logic/program.hpp"
#include "logic/solver.hpp"

namespace relspace::logic {

enum class Label3 { positive, negative, unknown };

const char* label3_text(Label3 l);

struct InferResult {
  std::map<std::string, Label3> labels;  // object id -> label
  bool solver_failed = false;            // no model or budget exhausted
  std::string diagnostic;
};

// Cautious inference for one scene task. The knowledge base must declare an
// "object" sort listing the scene objects; facts are appended to it and the
// task literal is checked across all answer sets: positive when it is in
// every one, negative when its classical negation is, unknown otherwise.
// task is "occlusion" (literal occluded(O)) or "stability" (stable(O)).
InferResult infer_labels(const Program& kb, const std::vector<Literal>& relation_facts,
                         const std::vector<Literal>& attribute_facts, const std::string& task,
                         const SolveLimits& limits = {});

}  // namespace relspace::logic
