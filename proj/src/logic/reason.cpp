#include "logic/reason.hpp"

#include <algorithm>
#include <stdexcept>

#include "logic/ground.hpp"

namespace relspace::logic {

const char* label3_text(Label3 l) {
  switch (l) {
    case Label3::positive: return "positive";
    case Label3::negative: return "negative";
    default: return "unknown";
  }
}

InferResult infer_labels(const Program& kb, const std::vector<Literal>& relation_facts,
                         const std::vector<Literal>& attribute_facts, const std::string& task,
                         const SolveLimits& limits) {
  std::string pred;
  if (task == "occlusion") pred = "occluded";
  else if (task == "stability") pred = "stable";
  else throw std::invalid_argument("unknown task " + task);

  std::vector<std::string> targets;
  for (const Term& t : kb.signature.sort_values("object")) targets.push_back(t.name);

  InferResult out;
  for (const auto& id : targets) out.labels[id] = Label3::unknown;

  Program prog = kb;
  for (const auto& f : relation_facts) prog.rules.push_back(Rule{f, {}, false, 0});
  for (const auto& f : attribute_facts) prog.rules.push_back(Rule{f, {}, false, 0});

  GroundProgram gp;
  SolveResult solved;
  try {
    gp = ground(prog);
    solved = solve_with_cr(gp, limits);
  } catch (const std::exception& e) {
    out.solver_failed = true;
    out.diagnostic = e.what();
    return out;
  }
  if (solved.truncated) {
    out.solver_failed = true;
    out.diagnostic = solved.diagnostic;
    return out;
  }
  if (solved.models.empty()) {
    out.solver_failed = true;
    out.diagnostic = solved.diagnostic.empty() ? "no answer set" : solved.diagnostic;
    return out;
  }

  for (const auto& id : targets) {
    Literal pos{false, Atom{pred, {Term::constant(id)}}};
    int pos_id = gp.find(pos.text());
    int neg_id = gp.find(pos.complement().text());
    bool in_all = pos_id >= 0;
    bool neg_in_all = neg_id >= 0;
    for (const auto& m : solved.models) {
      if (in_all && !std::binary_search(m.literals.begin(), m.literals.end(), pos_id)) {
        in_all = false;
      }
      if (neg_in_all && !std::binary_search(m.literals.begin(), m.literals.end(), neg_id)) {
        neg_in_all = false;
      }
    }
    if (in_all) out.labels[id] = Label3::positive;
    else if (neg_in_all) out.labels[id] = Label3::negative;
  }
  return out;
}

}  // namespace relspace::logic
