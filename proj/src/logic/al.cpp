#include "logic/al.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace relspace::logic {
namespace {

std::string instance_text(const std::string& name, const std::vector<Term>& args) {
  if (args.empty()) return name;
  std::string out = name + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].text();
  }
  return out + ")";
}

Literal holds_lit(const std::string& inst, int step, bool neg) {
  return Literal{neg, Atom{"holds", {Term::constant(inst), Term::integer(step)}}};
}

Literal occurs_lit(const std::string& inst, int step, bool neg) {
  return Literal{neg, Atom{"occurs", {Term::constant(inst), Term::integer(step)}}};
}

using Subst = std::map<std::string, Term>;

// Enumerates every assignment of the declared variables to their sorts.
void each_subst(const Signature& sig, const std::map<std::string, std::string>& vars,
                const std::function<void(const Subst&)>& fn) {
  std::vector<std::pair<std::string, std::vector<Term>>> domains;
  for (const auto& [name, sort] : vars) domains.emplace_back(name, sig.sort_values(sort));
  Subst subst;
  std::function<void(size_t)> rec = [&](size_t depth) {
    if (depth == domains.size()) {
      fn(subst);
      return;
    }
    for (const Term& t : domains[depth].second) {
      subst[domains[depth].first] = t;
      rec(depth + 1);
    }
    subst.erase(domains[depth].first);
  };
  rec(0);
}

std::vector<Term> apply_args(const std::vector<Term>& args, const Subst& s) {
  std::vector<Term> out;
  out.reserve(args.size());
  for (const Term& a : args) {
    if (a.kind == Term::Kind::variable) {
      auto it = s.find(a.name);
      if (it == s.end()) throw ALError("unbound variable " + a.name + " in law");
      out.push_back(it->second);
    } else {
      out.push_back(a);
    }
  }
  return out;
}

class Translator {
 public:
  Translator(const ALSystem& sys, int horizon) : sys_(sys), horizon_(horizon) {
    if (horizon < 0) throw ALError("horizon must be >= 0");
    for (const auto& f : sys.fluents) {
      each_instance(f.arg_sorts, [&](const std::vector<Term>& args) {
        fluent_kind_.emplace(instance_text(f.name, args), f.kind);
      });
    }
    for (const auto& a : sys.actions) {
      each_instance(a.arg_sorts, [&](const std::vector<Term>& args) {
        actions_.insert(instance_text(a.name, args));
      });
    }
  }

  const std::map<std::string, FluentKind>& fluents() const { return fluent_kind_; }
  const std::set<std::string>& actions() const { return actions_; }

  Program run(const History& history, bool cr_completion) {
    for (const auto& law : sys_.causal_laws) causal(law);
    for (const auto& sc : sys_.state_constraints) state_constraint(sc);
    for (const auto& ex : sys_.executability) executability(ex);
    inertia();
    closed_world();
    for (const auto& s : sys_.statics) fact(s);
    std::set<std::string> observed_at_0 = apply_history(history);
    if (cr_completion) complete_initial(observed_at_0);
    return std::move(out_);
  }

 private:
  const ALSystem& sys_;
  int horizon_;
  Program out_;
  std::map<std::string, FluentKind> fluent_kind_;
  std::set<std::string> actions_;

  void each_instance(const std::vector<std::string>& sorts,
                     const std::function<void(const std::vector<Term>&)>& fn) {
    std::vector<std::vector<Term>> domains;
    for (const auto& s : sorts) domains.push_back(sys_.signature.sort_values(s));
    std::vector<Term> args(sorts.size());
    std::function<void(size_t)> rec = [&](size_t depth) {
      if (depth == domains.size()) {
        fn(args);
        return;
      }
      for (const Term& t : domains[depth]) {
        args[depth] = t;
        rec(depth + 1);
      }
    };
    rec(0);
  }

  std::string fluent_instance(const AtomPat& pat, const Subst& s) {
    std::string text = instance_text(pat.name, apply_args(pat.args, s));
    if (!fluent_kind_.count(text)) throw ALError("unknown fluent " + text);
    return text;
  }

  std::string action_instance(const AtomPat& pat, const Subst& s) {
    std::string text = instance_text(pat.name, apply_args(pat.args, s));
    if (!actions_.count(text)) throw ALError("unknown action " + text);
    return text;
  }

  // Renders conditions at one step; returns false if a ground comparison
  // fails, which drops the whole instance.
  bool conditions_at(const std::vector<CondPat>& conds, const Subst& s, int step,
                     std::vector<BodyElem>& body) {
    for (const auto& c : conds) {
      switch (c.kind) {
        case CondPat::Kind::comparison: {
          Comparison cmp = c.cmp;
          cmp.lhs = apply_args({cmp.lhs}, s)[0];
          cmp.rhs = apply_args({cmp.rhs}, s)[0];
          bool ok = false;
          if (!eval_comparison(cmp.op, cmp.lhs, cmp.rhs, &ok) || !ok) return false;
          break;
        }
        case CondPat::Kind::fluent: {
          Literal l = holds_lit(fluent_instance(c.atom, s), step, c.neg);
          body.push_back(c.default_negated ? BodyElem::negated(l) : BodyElem::positive(l));
          break;
        }
        case CondPat::Kind::static_pred: {
          Literal l{c.neg, Atom{c.atom.name, apply_args(c.atom.args, s)}};
          body.push_back(c.default_negated ? BodyElem::negated(l) : BodyElem::positive(l));
          break;
        }
      }
    }
    return true;
  }

  void add_rule(std::optional<Literal> head, std::vector<BodyElem> body, bool cr = false) {
    Rule r;
    r.head = std::move(head);
    r.body = std::move(body);
    r.cr = cr;
    out_.rules.push_back(std::move(r));
  }

  void fact(const Literal& l) { add_rule(l, {}); }

  void causal(const CausalLaw& law) {
    each_subst(sys_.signature, law.vars, [&](const Subst& s) {
      std::string act = action_instance(law.action, s);
      std::string eff = fluent_instance(law.effect, s);
      for (int i = 0; i < horizon_; ++i) {
        std::vector<BodyElem> body{BodyElem::positive(occurs_lit(act, i, false))};
        if (!conditions_at(law.conditions, s, i, body)) continue;
        add_rule(holds_lit(eff, i + 1, law.effect_neg), std::move(body));
      }
    });
  }

  void state_constraint(const StateConstraint& sc) {
    each_subst(sys_.signature, sc.vars, [&](const Subst& s) {
      for (int i = 0; i <= horizon_; ++i) {
        std::vector<BodyElem> body;
        if (!conditions_at(sc.conditions, s, i, body)) continue;
        if (sc.head) {
          add_rule(holds_lit(fluent_instance(*sc.head, s), i, sc.head_neg), std::move(body));
        } else {
          add_rule(std::nullopt, std::move(body));
        }
      }
    });
  }

  void executability(const Executability& ex) {
    each_subst(sys_.signature, ex.vars, [&](const Subst& s) {
      std::string act = action_instance(ex.action, s);
      for (int i = 0; i < horizon_; ++i) {
        std::vector<BodyElem> body;
        if (!conditions_at(ex.conditions, s, i, body)) continue;
        add_rule(occurs_lit(act, i, true), std::move(body));
      }
    });
  }

  void inertia() {
    for (const auto& [inst, kind] : fluent_kind_) {
      if (kind != FluentKind::inertial) continue;
      for (int i = 0; i < horizon_; ++i) {
        add_rule(holds_lit(inst, i + 1, false),
                 {BodyElem::positive(holds_lit(inst, i, false)),
                  BodyElem::negated(holds_lit(inst, i + 1, true))});
        add_rule(holds_lit(inst, i + 1, true),
                 {BodyElem::positive(holds_lit(inst, i, true)),
                  BodyElem::negated(holds_lit(inst, i + 1, false))});
      }
    }
  }

  void closed_world() {
    for (const auto& [inst, kind] : fluent_kind_) {
      if (kind != FluentKind::defined) continue;
      for (int i = 0; i <= horizon_; ++i) {
        add_rule(holds_lit(inst, i, true), {BodyElem::negated(holds_lit(inst, i, false))});
      }
    }
    for (const auto& act : actions_) {
      for (int i = 0; i < horizon_; ++i) {
        add_rule(occurs_lit(act, i, true), {BodyElem::negated(occurs_lit(act, i, false))});
      }
    }
  }

  std::set<std::string> apply_history(const History& history) {
    std::set<std::string> observed_at_0;
    for (const auto& o : history.obs) {
      if (!fluent_kind_.count(o.fluent)) throw ALError("unknown fluent in history: " + o.fluent);
      if (o.step < 0 || o.step > horizon_) throw ALError("observation step out of range");
      if (o.step == 0) {
        fact(holds_lit(o.fluent, 0, !o.value));
        observed_at_0.insert(o.fluent);
      } else {
        // Reality check: the belief may not contradict the observation.
        add_rule(std::nullopt, {BodyElem::positive(holds_lit(o.fluent, o.step, o.value))});
      }
    }
    for (const auto& h : history.hpd) {
      if (!actions_.count(h.action)) throw ALError("unknown action in history: " + h.action);
      if (h.step < 0 || h.step >= horizon_) throw ALError("action step out of range");
      fact(occurs_lit(h.action, h.step, false));
    }
    return observed_at_0;
  }

  void complete_initial(const std::set<std::string>& observed_at_0) {
    for (const auto& [inst, kind] : fluent_kind_) {
      if (kind != FluentKind::inertial || observed_at_0.count(inst)) continue;
      add_rule(holds_lit(inst, 0, true), {BodyElem::negated(holds_lit(inst, 0, false))});
      Rule flip;
      flip.head = holds_lit(inst, 0, false);
      flip.cr = true;
      out_.rules.push_back(std::move(flip));
    }
  }
};

}  // namespace

std::vector<std::string> fluent_instances(const ALSystem& sys, FluentKind kind) {
  Translator t(sys, 0);
  std::vector<std::string> out;
  for (const auto& [inst, k] : t.fluents()) {
    if (k == kind) out.push_back(inst);
  }
  return out;
}

std::vector<std::string> all_fluent_instances(const ALSystem& sys) {
  Translator t(sys, 0);
  std::vector<std::string> out;
  for (const auto& kv : t.fluents()) out.push_back(kv.first);
  return out;
}

std::vector<std::string> action_instances(const ALSystem& sys) {
  Translator t(sys, 0);
  return {t.actions().begin(), t.actions().end()};
}

Program translate_al(const ALSystem& sys, const History& history, int horizon,
                     bool cr_completion) {
  Translator t(sys, horizon);
  return t.run(history, cr_completion);
}

PlanResult plans_at_horizon(const ALSystem& sys, const History& history,
                            const std::vector<GoalLiteral>& goal, int horizon,
                            const SolveLimits& limits) {
  if (horizon < 0) throw ALError("horizon must be >= 0");
  PlanResult result;
  std::vector<std::string> actions = action_instances(sys);
  {
    std::set<std::string> fluents;
    for (const auto& f : all_fluent_instances(sys)) fluents.insert(f);
    for (const auto& g : goal) {
      if (!fluents.count(g.fluent)) throw ALError("unknown fluent in goal: " + g.fluent);
    }
  }

  {
    int h = horizon;
    Program prog = translate_al(sys, history, h, true);
    auto lit = [](const std::string& pred, int step, bool neg = false) {
      return Literal{neg, Atom{pred, {Term::integer(step)}}};
    };
    for (int i = 0; i <= h; ++i) {
      std::vector<BodyElem> body;
      for (const auto& g : goal) {
        body.push_back(BodyElem::positive(holds_lit(g.fluent, i, g.neg)));
      }
      prog.rules.push_back(Rule{lit("goal", i), std::move(body), false, 0});
      prog.rules.push_back(
          Rule{Literal{false, Atom{"success", {}}}, {BodyElem::positive(lit("goal", i))}, false, 0});
    }
    prog.rules.push_back(
        Rule{std::nullopt, {BodyElem::negated(Literal{false, Atom{"success", {}}})}, false, 0});
    auto n_occ = [](const std::string& act, int step) {
      return Literal{false, Atom{"n_occurs", {Term::constant(act), Term::integer(step)}}};
    };
    for (int i = 0; i < h; ++i) {
      for (const auto& a : actions) {
        prog.rules.push_back(Rule{occurs_lit(a, i, false),
                                  {BodyElem::negated(n_occ(a, i)), BodyElem::negated(lit("goal", i))},
                                  false,
                                  0});
        prog.rules.push_back(
            Rule{n_occ(a, i), {BodyElem::negated(occurs_lit(a, i, false))}, false, 0});
      }
      for (size_t x = 0; x < actions.size(); ++x) {
        for (size_t y = x + 1; y < actions.size(); ++y) {
          prog.rules.push_back(Rule{std::nullopt,
                                    {BodyElem::positive(occurs_lit(actions[x], i, false)),
                                     BodyElem::positive(occurs_lit(actions[y], i, false))},
                                    false,
                                    0});
        }
      }
      for (const auto& a : actions) {
        prog.rules.push_back(Rule{lit("something_happened", i),
                                  {BodyElem::positive(occurs_lit(a, i, false))},
                                  false,
                                  0});
      }
      prog.rules.push_back(Rule{std::nullopt,
                                {BodyElem::negated(lit("something_happened", i)),
                                 BodyElem::negated(lit("goal", i))},
                                false,
                                0});
    }

    GroundProgram gp = ground(prog);
    SolveLimits step_limits = limits;
    step_limits.max_decisions = limits.max_decisions - result.decisions;
    SolveResult solved = solve_with_cr(gp, step_limits);
    result.decisions += solved.decisions;
    if (solved.truncated) {
      result.truncated = true;
      result.diagnostic = solved.diagnostic;
      return result;
    }
    if (solved.models.empty()) {
      result.diagnostic = "no plan at horizon " + std::to_string(h);
      return result;
    }

    std::set<std::vector<std::string>> plans;
    for (const auto& m : solved.models) {
      std::vector<std::pair<int, std::string>> steps;
      for (int id : m.literals) {
        const Literal& l = gp.literals[id];
        if (l.strong_neg || l.atom.pred != "occurs") continue;
        steps.emplace_back((int)l.atom.args[1].value, l.atom.args[0].name);
      }
      std::sort(steps.begin(), steps.end());
      std::vector<std::string> seq;
      for (auto& [step, act] : steps) seq.push_back(act);
      plans.insert(std::move(seq));
    }
    result.horizon = h;
    result.plans.assign(plans.begin(), plans.end());
    return result;
  }
}

PlanResult plan(const ALSystem& sys, const History& history,
                const std::vector<GoalLiteral>& goal, int max_horizon,
                const SolveLimits& limits) {
  if (max_horizon < 0) throw ALError("max_horizon must be >= 0");
  PlanResult result;
  for (int h = 0; h <= max_horizon; ++h) {
    SolveLimits step_limits = limits;
    step_limits.max_decisions = limits.max_decisions - result.decisions;
    PlanResult step = plans_at_horizon(sys, history, goal, h, step_limits);
    result.decisions += step.decisions;
    if (step.truncated) {
      result.truncated = true;
      result.diagnostic = step.diagnostic;
      return result;
    }
    if (step.horizon >= 0) {
      result.horizon = step.horizon;
      result.plans = std::move(step.plans);
      return result;
    }
  }
  result.diagnostic = "no plan within horizon " + std::to_string(max_horizon);
  return result;
}

}  // namespace relspace::logic
