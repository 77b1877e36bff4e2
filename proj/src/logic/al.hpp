#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "logic/program.hpp"
#include "logic/solver.hpp"

namespace relspace::logic {

// Action-language layer. Fluents and actions are schema patterns over sorted
// variables; translation grounds them itself and emits a variable-free
// program over holds(f, step) / occurs(a, step) atoms, where f and a are the
// rendered ground instances.

enum class FluentKind {
  inertial,  // inertia axioms plus CR completion of the initial state
  defined,   // closed world per step, no inertia
  belief     // driven entirely by state constraints
};

struct FluentDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
  FluentKind kind = FluentKind::inertial;
};

struct ActionDecl {
  std::string name;
  std::vector<std::string> arg_sorts;
};

struct AtomPat {
  std::string name;
  std::vector<Term> args;  // variables or ground terms
};

struct CondPat {
  enum class Kind { fluent, static_pred, comparison };
  Kind kind = Kind::fluent;
  bool neg = false;              // classical negation
  bool default_negated = false;  // not ...
  AtomPat atom;
  Comparison cmp;

  static CondPat fluent(AtomPat a, bool neg = false, bool default_negated = false) {
    CondPat c;
    c.kind = Kind::fluent;
    c.atom = std::move(a);
    c.neg = neg;
    c.default_negated = default_negated;
    return c;
  }
  static CondPat static_pred(AtomPat a, bool neg = false, bool default_negated = false) {
    CondPat c;
    c.kind = Kind::static_pred;
    c.atom = std::move(a);
    c.neg = neg;
    c.default_negated = default_negated;
    return c;
  }
  static CondPat compare(Comparison cmp) {
    CondPat c;
    c.kind = Kind::comparison;
    c.cmp = std::move(cmp);
    return c;
  }
};

// action causes effect if conditions
struct CausalLaw {
  AtomPat action;
  bool effect_neg = false;
  AtomPat effect;
  std::vector<CondPat> conditions;
  std::map<std::string, std::string> vars;  // variable -> sort
};

// head if conditions; empty head = state-level constraint
struct StateConstraint {
  bool head_neg = false;
  std::optional<AtomPat> head;  // a fluent
  std::vector<CondPat> conditions;
  std::map<std::string, std::string> vars;
};

// impossible action if conditions
struct Executability {
  AtomPat action;
  std::vector<CondPat> conditions;
  std::map<std::string, std::string> vars;
};

struct ALSystem {
  Signature signature;  // sorts for variable expansion
  std::vector<FluentDecl> fluents;
  std::vector<ActionDecl> actions;
  std::vector<CausalLaw> causal_laws;
  std::vector<StateConstraint> state_constraints;
  std::vector<Executability> executability;
  std::vector<Literal> statics;  // ground attribute facts
};

struct History {
  struct Obs {
    std::string fluent;  // rendered ground instance, e.g. on(a,b)
    bool value = true;
    int step = 0;
  };
  struct Hpd {
    std::string action;
    int step = 0;
  };
  std::vector<Obs> obs;
  std::vector<Hpd> hpd;
};

struct ALError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ground fluent/action instance names for a system, in deterministic order.
std::vector<std::string> fluent_instances(const ALSystem& sys, FluentKind kind);
std::vector<std::string> all_fluent_instances(const ALSystem& sys);
std::vector<std::string> action_instances(const ALSystem& sys);

// Emits the ground ASP program for the system and history up to the horizon:
// causal laws, state constraints, executability conditions, inertia, closed
// world assumptions for defined fluents and actions, reality checks, and,
// when enabled, CR-based completion of unobserved inertial fluents at step 0.
Program translate_al(const ALSystem& sys, const History& history, int horizon,
                     bool cr_completion = true);

struct GoalLiteral {
  bool neg = false;
  std::string fluent;  // rendered ground instance
};

struct PlanResult {
  int horizon = -1;  // first horizon with plans, -1 if none
  std::vector<std::vector<std::string>> plans;  // action sequences
  bool truncated = false;
  long decisions = 0;
  std::string diagnostic;
};

// Every plan at exactly the given horizon, deduplicated and sorted
// lexicographically. horizon stays -1 when there are none.
PlanResult plans_at_horizon(const ALSystem& sys, const History& history,
                            const std::vector<GoalLiteral>& goal, int horizon,
                            const SolveLimits& limits = {});

// Iterative deepening: tries horizons 0..max_horizon, returns every plan at
// the first horizon whose program has answer sets. Plans are deduplicated and
// sorted lexicographically.
PlanResult plan(const ALSystem& sys, const History& history,
                const std::vector<GoalLiteral>& goal, int max_horizon,
                const SolveLimits& limits = {});

}  // namespace relspace::logic
