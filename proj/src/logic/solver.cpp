#include "logic/solver.hpp"

#include <algorithm>
#include <numeric>

namespace relspace::logic {

std::vector<GroundRule> reduct(const std::vector<GroundRule>& rules,
                               const std::vector<char>& candidate) {
  std::vector<GroundRule> out;
  for (const auto& r : rules) {
    bool blocked = false;
    for (int id : r.body_neg) {
      if (candidate[id]) {
        blocked = true;
        break;
      }
    }
    if (blocked) continue;
    GroundRule g = r;
    g.body_neg.clear();
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<char> least_model(size_t literal_count, const std::vector<GroundRule>& rules) {
  std::vector<char> derived(literal_count, 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : rules) {
      if (r.head < 0 || derived[r.head]) continue;
      bool fires = true;
      for (int id : r.body_pos) {
        if (!derived[id]) {
          fires = false;
          break;
        }
      }
      if (fires) {
        derived[r.head] = 1;
        changed = true;
      }
    }
  }
  return derived;
}

bool is_stable_model(size_t literal_count, const std::vector<GroundRule>& rules,
                     const std::vector<char>& candidate) {
  auto positive = reduct(rules, candidate);
  auto derived = least_model(literal_count, positive);
  for (size_t i = 0; i < literal_count; ++i) {
    if (derived[i] != (candidate[i] ? 1 : 0)) return false;
  }
  for (const auto& r : positive) {
    if (r.head >= 0) continue;
    bool fires = true;
    for (int id : r.body_pos) {
      if (!candidate[id]) {
        fires = false;
        break;
      }
    }
    if (fires) return false;
  }
  return true;
}

namespace {

constexpr char kUnknown = 0, kIn = 1, kOut = 2;

// DFS with unit propagation, support counting, and complement linking.
// Every total assignment that survives propagation is verified with the
// reduct test before being reported, so propagation only needs to be sound.
class Search {
 public:
  Search(const GroundProgram& gp, const std::vector<GroundRule>& rules)
      : gp_(gp), rules_(rules), n_(gp.literals.size()) {
    assign_.assign(n_, kUnknown);
    in_pos_of_.resize(n_);
    in_neg_of_.resize(n_);
    head_of_.resize(n_);
    pos_out_.assign(rules_.size(), 0);
    neg_in_.assign(rules_.size(), 0);
    pos_undec_.assign(rules_.size(), 0);
    neg_undec_.assign(rules_.size(), 0);
    support_.assign(n_, 0);
    uc_count_.assign(rules_.size(), 0);
    uc_derived_.assign(n_, 0);
    for (size_t r = 0; r < rules_.size(); ++r) {
      for (int id : rules_[r].body_pos) in_pos_of_[id].push_back((int)r);
      for (int id : rules_[r].body_neg) in_neg_of_[id].push_back((int)r);
      pos_undec_[r] = (int)rules_[r].body_pos.size();
      neg_undec_[r] = (int)rules_[r].body_neg.size();
      if (rules_[r].head >= 0) {
        ++support_[rules_[r].head];
        head_of_[rules_[r].head].push_back((int)r);
      }
    }
  }

  // Enumerates stable models; returns false if the decision budget ran out.
  bool run(std::vector<AnswerSet>& models, long& decisions, long max_decisions,
           size_t max_models) {
    bool conflict = false;
    for (size_t i = 0; i < n_; ++i) {
      if (support_[i] == 0 && !set_value((int)i, kOut)) conflict = true;
    }
    for (size_t r = 0; r < rules_.size() && !conflict; ++r) {
      if (!check_rule((int)r)) conflict = true;
    }
    if (!conflict) conflict = !deduce();
    if (conflict) return true;  // no models, budget intact

    struct Frame {
      int lit;
      size_t mark;
      bool tried_in;
    };
    std::vector<Frame> stack;
    int cursor = 0;
    for (;;) {
      int lit = next_unknown(cursor);
      if (lit < 0) {
        if (verify_total()) {
          emit(models);
          if (models.size() >= max_models) return true;
        }
        conflict = true;
      } else {
        if (++decisions > max_decisions) return false;
        stack.push_back({lit, trail_.size(), false});
        cursor = lit;
        conflict = !(set_value(lit, kOut) && deduce());
      }
      while (conflict) {
        if (stack.empty()) return true;
        Frame& f = stack.back();
        undo_to(f.mark);
        cursor = f.lit;
        if (f.tried_in) {
          stack.pop_back();
          continue;
        }
        f.tried_in = true;
        conflict = !(set_value(f.lit, kIn) && deduce());
      }
    }
  }

 private:
  const GroundProgram& gp_;
  const std::vector<GroundRule>& rules_;
  size_t n_;
  std::vector<char> assign_;
  std::vector<std::vector<int>> in_pos_of_, in_neg_of_, head_of_;
  std::vector<int> pos_out_, neg_in_, pos_undec_, neg_undec_, support_;
  std::vector<int> trail_;
  size_t qhead_ = 0;
  std::vector<int> uc_count_, uc_queue_;
  std::vector<char> uc_derived_;

  int next_unknown(int from) {
    for (size_t i = (size_t)from; i < n_; ++i) {
      if (assign_[i] == kUnknown) return (int)i;
    }
    for (int i = 0; i < from; ++i) {
      if (assign_[i] == kUnknown) return i;
    }
    return -1;
  }

  bool set_value(int id, char val) {
    if (assign_[id] != kUnknown) return assign_[id] == val;
    assign_[id] = val;
    trail_.push_back(id);
    return true;
  }

  bool propagate() {
    while (qhead_ < trail_.size()) {
      if (!process(trail_[qhead_++])) return false;
    }
    return true;
  }

  bool deduce() {
    for (;;) {
      if (!propagate()) return false;
      size_t before = trail_.size();
      if (!upper_closure()) return false;
      if (trail_.size() == before) return true;
    }
  }

  // Closure of the rules that could still fire below this node, reading
  // unassigned negative body literals optimistically. A stable model of any
  // completion is the least model of its reduct, and every reduct rule that
  // fires is alive here, so model literals always land in the closure.
  // Literals outside it are forced OUT; positive loops without external
  // support die here instead of at the leaves.
  bool upper_closure() {
    std::fill(uc_derived_.begin(), uc_derived_.end(), 0);
    uc_queue_.clear();
    for (size_t r = 0; r < rules_.size(); ++r) {
      const GroundRule& rule = rules_[r];
      uc_count_[r] = -1;
      if (rule.head < 0 || rule_dead(rule)) continue;
      uc_count_[r] = (int)rule.body_pos.size();
      if (uc_count_[r] == 0) uc_fire(rule.head);
    }
    for (size_t qi = 0; qi < uc_queue_.size(); ++qi) {
      for (int r : in_pos_of_[uc_queue_[qi]]) {
        if (uc_count_[r] > 0 && --uc_count_[r] == 0) uc_fire(rules_[r].head);
      }
    }
    for (size_t i = 0; i < n_; ++i) {
      if (uc_derived_[i]) continue;
      if (assign_[i] == kIn) return false;
      if (assign_[i] == kUnknown && !set_value((int)i, kOut)) return false;
    }
    return true;
  }

  void uc_fire(int id) {
    if (!uc_derived_[id]) {
      uc_derived_[id] = 1;
      uc_queue_.push_back(id);
    }
  }

  bool rule_dead(const GroundRule& rule) const {
    for (int id : rule.body_neg) {
      if (assign_[id] == kIn) return true;
    }
    for (int id : rule.body_pos) {
      if (assign_[id] == kOut) return true;
    }
    return false;
  }

  bool process(int id) {
    char val = assign_[id];
    int comp = gp_.complement[id];
    if (val == kIn) {
      if (comp >= 0 && !set_value(comp, kOut)) return false;
      if (support_[id] == 0) return false;
    }
    for (int r : in_pos_of_[id]) {
      if (val == kIn) {
        --pos_undec_[r];
        if (!check_rule(r)) return false;
      } else {
        bool was_alive = pos_out_[r] == 0 && neg_in_[r] == 0;
        ++pos_out_[r];
        if (was_alive && !drop_support(r)) return false;
      }
    }
    for (int r : in_neg_of_[id]) {
      if (val == kOut) {
        --neg_undec_[r];
        if (!check_rule(r)) return false;
      } else {
        bool was_alive = pos_out_[r] == 0 && neg_in_[r] == 0;
        ++neg_in_[r];
        if (was_alive && !drop_support(r)) return false;
      }
    }
    if (val == kOut) {
      // A rule whose head just went OUT behaves like a constraint: its body
      // may have become unit.
      for (int r : head_of_[id]) {
        if (!check_rule(r)) return false;
      }
    }
    return true;
  }

  bool drop_support(int r) {
    int h = rules_[r].head;
    if (h < 0) return true;
    if (--support_[h] == 0) {
      if (assign_[h] == kIn) return false;
      if (!set_value(h, kOut)) return false;
    }
    return true;
  }

  bool check_rule(int r) {
    const GroundRule& rule = rules_[r];
    if (pos_out_[r] > 0 || neg_in_[r] > 0) return true;
    int undec = pos_undec_[r] + neg_undec_[r];
    if (undec == 0) {
      if (rule.head < 0) return false;
      return set_value(rule.head, kIn);
    }
    if (undec == 1 && (rule.head < 0 || assign_[rule.head] == kOut)) {
      for (int id : rule.body_pos) {
        if (assign_[id] == kUnknown) return set_value(id, kOut);
      }
      for (int id : rule.body_neg) {
        if (assign_[id] == kUnknown) return set_value(id, kIn);
      }
    }
    return true;
  }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      int id = trail_.back();
      trail_.pop_back();
      char val = assign_[id];
      assign_[id] = kUnknown;
      if (trail_.size() >= qhead_) continue;  // never processed
      for (int r : in_pos_of_[id]) {
        if (val == kIn) {
          ++pos_undec_[r];
        } else {
          --pos_out_[r];
          if (pos_out_[r] == 0 && neg_in_[r] == 0 && rules_[r].head >= 0) {
            ++support_[rules_[r].head];
          }
        }
      }
      for (int r : in_neg_of_[id]) {
        if (val == kOut) {
          ++neg_undec_[r];
        } else {
          --neg_in_[r];
          if (pos_out_[r] == 0 && neg_in_[r] == 0 && rules_[r].head >= 0) {
            ++support_[rules_[r].head];
          }
        }
      }
    }
    if (qhead_ > trail_.size()) qhead_ = trail_.size();
  }

  bool verify_total() {
    std::vector<char> candidate(n_);
    for (size_t i = 0; i < n_; ++i) candidate[i] = assign_[i] == kIn;
    return is_stable_model(n_, rules_, candidate);
  }

  void emit(std::vector<AnswerSet>& models) {
    AnswerSet m;
    for (size_t i = 0; i < n_; ++i) {
      if (assign_[i] == kIn) m.literals.push_back((int)i);
    }
    models.push_back(std::move(m));
  }
};

}  // namespace

SolveResult answer_sets(const GroundProgram& gp, const SolveLimits& limits) {
  SolveResult out;
  Search search(gp, gp.rules);
  if (!search.run(out.models, out.decisions, limits.max_decisions, limits.max_models)) {
    out.truncated = true;
    out.diagnostic = "decision budget exceeded";
  }
  std::sort(out.models.begin(), out.models.end());
  return out;
}

std::vector<AnswerSet> brute_force_answer_sets(const GroundProgram& gp) {
  if (gp.atom_count() > 16) {
    throw GroundError("brute force oracle limited to 16 atoms, got " +
                      std::to_string(gp.atom_count()));
  }
  std::vector<int> heads;
  for (const auto& r : gp.rules) {
    if (r.head >= 0) heads.push_back(r.head);
  }
  std::sort(heads.begin(), heads.end());
  heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
  if (heads.size() > 22) throw GroundError("brute force oracle: too many head literals");

  // Stable models only contain literals derivable as rule heads, so subsets
  // of the head literals cover the whole search space.
  std::vector<AnswerSet> models;
  size_t n = gp.literals.size();
  for (unsigned long mask = 0; mask < (1ul << heads.size()); ++mask) {
    std::vector<char> candidate(n, 0);
    for (size_t i = 0; i < heads.size(); ++i) {
      if (mask & (1ul << i)) candidate[heads[i]] = 1;
    }
    bool consistent = true;
    for (size_t i = 0; i < heads.size() && consistent; ++i) {
      int c = gp.complement[heads[i]];
      if (candidate[heads[i]] && c >= 0 && candidate[c]) consistent = false;
    }
    if (!consistent) continue;
    if (!is_stable_model(n, gp.rules, candidate)) continue;
    AnswerSet m;
    for (size_t i = 0; i < n; ++i) {
      if (candidate[i]) m.literals.push_back((int)i);
    }
    models.push_back(std::move(m));
  }
  std::sort(models.begin(), models.end());
  return models;
}

SolveResult solve_with_cr(const GroundProgram& gp, const SolveLimits& limits) {
  SolveResult regular = answer_sets(gp, limits);
  if (!regular.models.empty() || regular.truncated || gp.cr_rules.empty()) {
    if (regular.models.empty() && gp.cr_rules.empty() && !regular.truncated) {
      regular.diagnostic = "no answer set and no CR rules to apply";
    }
    return regular;
  }

  SolveResult out;
  out.decisions = regular.decisions;
  size_t n = gp.cr_rules.size();
  for (size_t k = 1; k <= n; ++k) {
    // k-subsets of CR rules in lexicographic cr_id order.
    std::vector<size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    for (;;) {
      std::vector<GroundRule> rules = gp.rules;
      for (size_t idx : pick) {
        GroundRule promoted = gp.cr_rules[idx];
        promoted.cr = false;
        rules.push_back(std::move(promoted));
      }
      std::vector<AnswerSet> found;
      Search search(gp, rules);
      if (!search.run(found, out.decisions, limits.max_decisions, limits.max_models)) {
        out.truncated = true;
        out.diagnostic = "decision budget exceeded during CR search";
        return out;
      }
      for (auto& m : found) {
        for (size_t idx : pick) m.applied_cr.push_back(gp.cr_rules[idx].cr_id);
        std::sort(m.applied_cr.begin(), m.applied_cr.end());
        out.models.push_back(std::move(m));
      }
      // advance the combination odometer
      size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!out.models.empty()) {
      std::sort(out.models.begin(), out.models.end());
      out.models.erase(std::unique(out.models.begin(), out.models.end()), out.models.end());
      return out;
    }
  }
  out.diagnostic = "no answer set even with every CR rule applied";
  return out;
}

}  // namespace relspace::logic
