#include "domain.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace relspace::scene {

using logic::ActionDecl;
using logic::AtomPat;
using logic::BodyElem;
using logic::CausalLaw;
using logic::CondPat;
using logic::Executability;
using logic::FluentDecl;
using logic::FluentKind;
using logic::StateConstraint;
using logic::Term;

namespace {

Term var(const char* name) { return Term::variable(name); }

AtomPat pat(std::string name, std::vector<Term> args) { return {std::move(name), std::move(args)}; }

}  // namespace

std::optional<logic::StateConstraint> lift_stability_axiom(const logic::Rule& axiom) {
  if (!axiom.head || axiom.head->atom.pred != "stable" || axiom.head->atom.args.size() != 1) {
    return std::nullopt;
  }
  StateConstraint sc;
  sc.head_neg = axiom.head->strong_neg;
  sc.head = pat("stable", axiom.head->atom.args);
  auto note_var = [&](const Term& t, const std::string& sort) {
    if (t.kind != Term::Kind::variable) return;
    auto it = sc.vars.find(t.name);
    if (it == sc.vars.end()) sc.vars.emplace(t.name, sort);
  };
  note_var(axiom.head->atom.args[0], "object");
  for (const auto& b : axiom.body) {
    if (b.kind == BodyElem::Kind::comparison) return std::nullopt;
    const auto& atom = b.lit.atom;
    if (atom.pred == "obj_relation" && atom.args.size() == 3) {
      if (!(atom.args[0] == Term::constant("above"))) return std::nullopt;
      note_var(atom.args[1], "object");
      note_var(atom.args[2], "object");
      sc.conditions.push_back(CondPat::fluent(pat("above", {atom.args[1], atom.args[2]}),
                                              b.lit.strong_neg, b.default_negated));
    } else if ((atom.pred == "obj_surface" || atom.pred == "obj_size") && atom.args.size() == 2) {
      note_var(atom.args[0], "object");
      sc.conditions.push_back(CondPat::static_pred(pat(atom.pred, atom.args), b.lit.strong_neg,
                                                   b.default_negated));
    } else if (atom.pred == "stable" && atom.args.size() == 1) {
      note_var(atom.args[0], "object");
      sc.conditions.push_back(
          CondPat::fluent(pat("stable", atom.args), b.lit.strong_neg, b.default_negated));
    } else {
      return std::nullopt;
    }
  }
  return sc;
}

ManipDomain build_manip_domain(const Scene& scene,
                               const std::vector<logic::Rule>& stability_axioms) {
  ManipDomain d;
  logic::Signature& sig = d.sys.signature;

  std::vector<std::string> ids;
  for (const auto& o : scene.objects) ids.push_back(o.id);
  std::sort(ids.begin(), ids.end());
  sig.declare_sort_constants("object", ids);
  sig.declare_sort_constants("location", {"table"});
  sig.declare_subsort("object", "location");

  d.sys.fluents = {
      {"on", {"object", "location"}, FluentKind::inertial},
      {"in_hand", {"object"}, FluentKind::inertial},
      {"above", {"object", "object"}, FluentKind::defined},
      {"occupied", {"object"}, FluentKind::defined},
      {"stable", {"object"}, FluentKind::belief},
  };
  d.sys.actions = {
      {"pickup", {"object"}},
      {"putdown", {"object", "location"}},
  };

  CausalLaw holds_after_pickup;
  holds_after_pickup.action = pat("pickup", {var("O")});
  holds_after_pickup.effect = pat("in_hand", {var("O")});
  holds_after_pickup.vars = {{"O", "object"}};
  d.sys.causal_laws.push_back(holds_after_pickup);

  CausalLaw off_after_pickup;
  off_after_pickup.action = pat("pickup", {var("O")});
  off_after_pickup.effect_neg = true;
  off_after_pickup.effect = pat("on", {var("O"), var("L")});
  off_after_pickup.conditions = {CondPat::fluent(pat("on", {var("O"), var("L")}))};
  off_after_pickup.vars = {{"O", "object"}, {"L", "location"}};
  d.sys.causal_laws.push_back(off_after_pickup);

  CausalLaw on_after_putdown;
  on_after_putdown.action = pat("putdown", {var("O"), var("L")});
  on_after_putdown.effect = pat("on", {var("O"), var("L")});
  on_after_putdown.vars = {{"O", "object"}, {"L", "location"}};
  d.sys.causal_laws.push_back(on_after_putdown);

  CausalLaw empty_after_putdown;
  empty_after_putdown.action = pat("putdown", {var("O"), var("L")});
  empty_after_putdown.effect_neg = true;
  empty_after_putdown.effect = pat("in_hand", {var("O")});
  empty_after_putdown.vars = {{"O", "object"}, {"L", "location"}};
  d.sys.causal_laws.push_back(empty_after_putdown);

  StateConstraint above_direct;
  above_direct.head = pat("above", {var("A"), var("B")});
  above_direct.conditions = {CondPat::fluent(pat("on", {var("A"), var("B")}))};
  above_direct.vars = {{"A", "object"}, {"B", "object"}};
  d.sys.state_constraints.push_back(above_direct);

  StateConstraint above_trans;
  above_trans.head = pat("above", {var("A"), var("B")});
  above_trans.conditions = {CondPat::fluent(pat("on", {var("A"), var("C")})),
                            CondPat::fluent(pat("above", {var("C"), var("B")}))};
  above_trans.vars = {{"A", "object"}, {"B", "object"}, {"C", "object"}};
  d.sys.state_constraints.push_back(above_trans);

  StateConstraint occupied_def;
  occupied_def.head = pat("occupied", {var("B")});
  occupied_def.conditions = {CondPat::fluent(pat("on", {var("A"), var("B")}))};
  occupied_def.vars = {{"A", "object"}, {"B", "object"}};
  d.sys.state_constraints.push_back(occupied_def);

  // Never enter a state believed unstable.
  StateConstraint safety;
  safety.conditions = {CondPat::fluent(pat("stable", {var("O")}), true)};
  safety.vars = {{"O", "object"}};
  d.sys.state_constraints.push_back(safety);

  for (const auto& axiom : stability_axioms) {
    if (auto sc = lift_stability_axiom(axiom)) d.sys.state_constraints.push_back(*sc);
  }

  Executability busy_arm;
  busy_arm.action = pat("pickup", {var("O")});
  busy_arm.conditions = {CondPat::fluent(pat("in_hand", {var("O2")}))};
  busy_arm.vars = {{"O", "object"}, {"O2", "object"}};
  d.sys.executability.push_back(busy_arm);

  Executability covered;
  covered.action = pat("pickup", {var("O")});
  covered.conditions = {CondPat::fluent(pat("occupied", {var("O")}))};
  covered.vars = {{"O", "object"}};
  d.sys.executability.push_back(covered);

  Executability not_held;
  not_held.action = pat("putdown", {var("O"), var("L")});
  not_held.conditions = {CondPat::fluent(pat("in_hand", {var("O")}), false, true)};
  not_held.vars = {{"O", "object"}, {"L", "location"}};
  d.sys.executability.push_back(not_held);

  Executability target_covered;
  target_covered.action = pat("putdown", {var("O"), var("B")});
  target_covered.conditions = {CondPat::fluent(pat("occupied", {var("B")}))};
  target_covered.vars = {{"O", "object"}, {"B", "object"}};
  d.sys.executability.push_back(target_covered);

  Executability onto_self;
  onto_self.action = pat("putdown", {var("O"), var("B")});
  onto_self.conditions = {
      CondPat::compare(logic::Comparison{logic::Comparison::Op::eq, var("O"), var("B")})};
  onto_self.vars = {{"O", "object"}, {"B", "object"}};
  d.sys.executability.push_back(onto_self);

  for (const auto& o : scene.objects) {
    d.sys.statics.push_back(logic::Literal{
        false, logic::Atom{"obj_surface",
                           {Term::constant(o.id), Term::constant(to_string(o.surface))}}});
    d.sys.statics.push_back(logic::Literal{
        false,
        logic::Atom{"obj_size", {Term::constant(o.id), Term::constant(to_string(o.size))}}});
  }

  // Full initial observation: every on/in_hand instance gets a value.
  std::map<std::string, std::string> location;
  for (const auto& stack : scene.structures) {
    for (size_t i = 0; i < stack.size(); ++i) {
      location[stack[i]] = i == 0 ? "table" : stack[i - 1];
    }
  }
  std::vector<std::string> locs = ids;
  locs.push_back("table");
  for (const auto& o : ids) {
    for (const auto& l : locs) {
      if (o == l) continue;
      d.history.obs.push_back({"on(" + o + "," + l + ")", location[o] == l, 0});
    }
    d.history.obs.push_back({"in_hand(" + o + ")", false, 0});
  }
  return d;
}

SimResult simulate_plan(const Scene& scene, const std::vector<std::string>& plan,
                        const std::string& goal_object, const std::string& goal_location) {
  std::map<std::string, Surface> surface;
  std::map<std::string, std::string> location;
  for (const auto& o : scene.objects) surface[o.id] = o.surface;
  for (const auto& stack : scene.structures) {
    for (size_t i = 0; i < stack.size(); ++i) {
      location[stack[i]] = i == 0 ? "table" : stack[i - 1];
    }
  }
  std::string held;
  std::set<std::string> displaced;

  auto occupied = [&](const std::string& obj) {
    for (const auto& [o, l] : location) {
      if (l == obj) return true;
    }
    return false;
  };

  for (const auto& step : plan) {
    auto open = step.find('(');
    auto close = step.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open) {
      throw std::invalid_argument("malformed plan step: " + step);
    }
    std::string name = step.substr(0, open);
    std::string args = step.substr(open + 1, close - open - 1);
    auto comma = args.find(',');
    if (name == "pickup") {
      const std::string& obj = args;
      if (!surface.count(obj)) throw std::invalid_argument("unknown object: " + obj);
      if (!held.empty() || displaced.count(obj) || occupied(obj)) continue;
      location.erase(obj);
      held = obj;
    } else if (name == "putdown") {
      if (comma == std::string::npos) throw std::invalid_argument("malformed plan step: " + step);
      std::string obj = args.substr(0, comma);
      std::string target = args.substr(comma + 1);
      if (!surface.count(obj)) throw std::invalid_argument("unknown object: " + obj);
      if (target != "table" && !surface.count(target)) {
        throw std::invalid_argument("unknown location: " + target);
      }
      if (held != obj) continue;
      if (target != "table" && (occupied(target) || displaced.count(target) || target == obj)) {
        continue;
      }
      held.clear();
      if (target != "table" && surface[target] == Surface::irregular) {
        // Slides off and lands beside the target.
        displaced.insert(obj);
        location[obj] = "table";
      } else {
        location[obj] = target;
      }
    } else {
      throw std::invalid_argument("unknown action: " + name);
    }
  }

  SimResult out;
  auto it = location.find(goal_object);
  out.goal_achieved = held != goal_object && it != location.end() &&
                      it->second == goal_location && !displaced.count(goal_object) &&
                      !displaced.count(goal_location);
  out.displaced.assign(displaced.begin(), displaced.end());
  return out;
}

}  // namespace relspace::scene
