#include "logic/ground.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace relspace::logic {

int GroundProgram::intern(const Literal& lit) {
  std::string key = lit.text();
  auto it = index.find(key);
  if (it != index.end()) return it->second;
  int id = (int)literals.size();
  literals.push_back(lit);
  texts_.push_back(key);
  complement.push_back(-1);
  index.emplace(std::move(key), id);
  auto comp = index.find(lit.complement().text());
  if (comp != index.end()) {
    complement[id] = comp->second;
    complement[comp->second] = id;
  }
  return id;
}

int GroundProgram::find(const std::string& text) const {
  auto it = index.find(text);
  return it == index.end() ? -1 : it->second;
}

const std::string& GroundProgram::text_of(int id) const { return texts_[id]; }

size_t GroundProgram::atom_count() const {
  size_t paired = 0;
  for (int c : complement) {
    if (c >= 0) ++paired;
  }
  return literals.size() - paired / 2;
}

namespace {

struct VarInfo {
  std::vector<std::string> sorts;
  bool positive = false;  // occurs in head or positive body literal
  bool negated = false;   // occurs in a default-negated literal
  bool in_cmp = false;
  std::vector<Term> domain;
};

using Subst = std::map<std::string, Term>;

Term apply_term(const Term& t, const Subst& s) {
  if (t.kind != Term::Kind::variable) return t;
  auto it = s.find(t.name);
  return it == s.end() ? t : it->second;
}

Literal apply_literal(const Literal& l, const Subst& s) {
  Literal out = l;
  for (auto& a : out.atom.args) a = apply_term(a, s);
  return out;
}

std::vector<std::string> cmp_vars(const Comparison& c) {
  std::vector<std::string> vs;
  if (c.lhs.kind == Term::Kind::variable) vs.push_back(c.lhs.name);
  if (c.rhs.kind == Term::Kind::variable && c.rhs.name != (vs.empty() ? "" : vs[0])) {
    vs.push_back(c.rhs.name);
  }
  return vs;
}

bool cmp_holds(const Comparison& c, const Subst& s) {
  Term lhs = apply_term(c.lhs, s);
  Term rhs = apply_term(c.rhs, s);
  bool ok = false;
  bool res = eval_comparison(c.op, lhs, rhs, &ok);
  return ok && res;
}

// Runs fn for every assignment of the listed variables to their domains.
void odometer(const std::vector<std::pair<std::string, const std::vector<Term>*>>& vars,
              Subst& subst, size_t depth, const std::function<void()>& fn) {
  if (depth == vars.size()) {
    fn();
    return;
  }
  for (const Term& v : *vars[depth].second) {
    subst[vars[depth].first] = v;
    odometer(vars, subst, depth + 1, fn);
  }
  subst.erase(vars[depth].first);
}

struct UnionFind {
  std::map<std::string, std::string> up;
  void add(const std::string& x) { up.emplace(x, x); }
  std::string find(const std::string& x) {
    std::string r = x;
    while (up[r] != r) r = up[r];
    return r;
  }
  void merge(const std::string& a, const std::string& b) { up[find(a)] = find(b); }
};

class Grounder {
 public:
  Grounder(const Program& program, const GroundLimits& limits)
      : prog_(program), limits_(limits) {}

  GroundProgram run() {
    for (const auto& rule : prog_.rules) ground_rule(rule);
    return std::move(out_);
  }

 private:
  const Program& prog_;
  const GroundLimits& limits_;
  GroundProgram out_;

  [[noreturn]] void fail(const Rule& r, const std::string& msg) {
    throw GroundError("rule at line " + std::to_string(r.line) + ": " + msg);
  }

  void note_literal(const Rule& r, const Literal& l, bool positive,
                    std::map<std::string, VarInfo>& vars) {
    auto schema = prog_.signature.predicates.find(l.atom.pred);
    for (size_t i = 0; i < l.atom.args.size(); ++i) {
      const Term& t = l.atom.args[i];
      if (t.kind != Term::Kind::variable) continue;
      VarInfo& info = vars[t.name];
      (positive ? info.positive : info.negated) = true;
      if (schema != prog_.signature.predicates.end()) {
        if (schema->second.size() != l.atom.args.size()) fail(r, "arity mismatch on " + l.atom.pred);
        info.sorts.push_back(schema->second[i]);
      }
    }
  }

  std::vector<Term> domain_for(const Rule& r, const std::string& var, const VarInfo& info) {
    if (info.sorts.empty()) fail(r, "cannot bound variable " + var);
    std::vector<Term> dom;
    try {
      dom = prog_.signature.sort_values(info.sorts[0]);
    } catch (const std::exception& e) {
      fail(r, e.what());
    }
    if (dom.empty()) fail(r, "sort " + info.sorts[0] + " has no constants");
    for (size_t i = 1; i < info.sorts.size(); ++i) {
      std::vector<Term> kept;
      for (const Term& t : dom) {
        if (prog_.signature.term_in_sort(t, info.sorts[i])) kept.push_back(t);
      }
      dom = std::move(kept);
    }
    return dom;
  }

  void emit(GroundRule gr, const Rule& src) {
    std::sort(gr.body_pos.begin(), gr.body_pos.end());
    gr.body_pos.erase(std::unique(gr.body_pos.begin(), gr.body_pos.end()), gr.body_pos.end());
    std::sort(gr.body_neg.begin(), gr.body_neg.end());
    gr.body_neg.erase(std::unique(gr.body_neg.begin(), gr.body_neg.end()), gr.body_neg.end());
    // p together with not p can never fire.
    for (int id : gr.body_pos) {
      if (std::binary_search(gr.body_neg.begin(), gr.body_neg.end(), id)) return;
    }
    if (out_.rules.size() + out_.cr_rules.size() >= limits_.max_rules) {
      fail(src, "ground program exceeds " + std::to_string(limits_.max_rules) + " rules");
    }
    if (gr.cr) {
      gr.cr_id = (int)out_.cr_rules.size();
      out_.cr_rules.push_back(std::move(gr));
    } else {
      out_.rules.push_back(std::move(gr));
    }
  }

  void ground_rule(const Rule& rule) {
    std::map<std::string, VarInfo> vars;
    if (rule.head) note_literal(rule, *rule.head, true, vars);
    for (const auto& b : rule.body) {
      if (b.kind == BodyElem::Kind::literal) {
        note_literal(rule, b.lit, !b.default_negated, vars);
      } else {
        for (const auto& v : cmp_vars(b.cmp)) vars[v].in_cmp = true;
      }
    }
    for (auto& [name, info] : vars) {
      if (!info.positive && !info.negated) fail(rule, "variable " + name + " only in comparisons");
      info.domain = domain_for(rule, name, info);
    }

    // Variables confined to default-negated literals expand into a
    // conjunction over their sort inside a single rule instance.
    std::vector<std::pair<std::string, const std::vector<Term>*>> inst_vars;
    std::set<std::string> expansion;
    for (auto& [name, info] : vars) {
      if (info.positive) {
        inst_vars.emplace_back(name, &info.domain);
      } else {
        expansion.insert(name);
      }
    }

    UnionFind uf;
    for (const auto& v : expansion) uf.add(v);
    auto union_group = [&](const std::vector<std::string>& names) {
      std::string first;
      for (const auto& n : names) {
        if (!expansion.count(n)) continue;
        if (first.empty()) first = n;
        else uf.merge(first, n);
      }
      return first;
    };
    for (const auto& b : rule.body) {
      if (b.kind == BodyElem::Kind::literal && b.default_negated) {
        std::vector<std::string> names;
        for (const auto& a : b.lit.atom.args) {
          if (a.kind == Term::Kind::variable) names.push_back(a.name);
        }
        union_group(names);
      } else if (b.kind == BodyElem::Kind::comparison) {
        union_group(cmp_vars(b.cmp));
      }
    }

    // Cluster root -> member vars, negated literals, comparisons.
    std::map<std::string, std::vector<std::string>> cluster_vars;
    for (const auto& v : expansion) cluster_vars[uf.find(v)].push_back(v);
    std::map<std::string, std::vector<const Literal*>> cluster_lits;
    std::map<std::string, std::vector<const Comparison*>> cluster_cmps;
    std::vector<const Literal*> plain_neg;
    std::vector<const Comparison*> inst_cmps;
    for (const auto& b : rule.body) {
      if (b.kind == BodyElem::Kind::literal && b.default_negated) {
        std::string root;
        for (const auto& a : b.lit.atom.args) {
          if (a.kind == Term::Kind::variable && expansion.count(a.name)) {
            root = uf.find(a.name);
            break;
          }
        }
        if (root.empty()) plain_neg.push_back(&b.lit);
        else cluster_lits[root].push_back(&b.lit);
      } else if (b.kind == BodyElem::Kind::comparison) {
        std::string root;
        for (const auto& v : cmp_vars(b.cmp)) {
          if (expansion.count(v)) {
            root = uf.find(v);
            break;
          }
        }
        if (root.empty()) inst_cmps.push_back(&b.cmp);
        else cluster_cmps[root].push_back(&b.cmp);
      }
    }

    Subst subst;
    odometer(inst_vars, subst, 0, [&]() {
      for (const auto* c : inst_cmps) {
        if (!cmp_holds(*c, subst)) return;
      }
      GroundRule gr;
      gr.cr = rule.cr;
      if (rule.head) gr.head = out_.intern(apply_literal(*rule.head, subst));
      for (const auto& b : rule.body) {
        if (b.kind == BodyElem::Kind::literal && !b.default_negated) {
          gr.body_pos.push_back(out_.intern(apply_literal(b.lit, subst)));
        }
      }
      for (const auto* l : plain_neg) {
        gr.body_neg.push_back(out_.intern(apply_literal(*l, subst)));
      }
      for (const auto& [root, members] : cluster_vars) {
        std::vector<std::pair<std::string, const std::vector<Term>*>> cvars;
        for (const auto& m : members) cvars.emplace_back(m, &vars[m].domain);
        const auto& lits = cluster_lits[root];
        const auto& cmps = cluster_cmps[root];
        odometer(cvars, subst, 0, [&]() {
          for (const auto* c : cmps) {
            if (!cmp_holds(*c, subst)) return;
          }
          for (const auto* l : lits) {
            gr.body_neg.push_back(out_.intern(apply_literal(*l, subst)));
          }
        });
      }
      emit(std::move(gr), rule);
    });
  }
};

}  // namespace

GroundProgram ground(const Program& program, const GroundLimits& limits) {
  Grounder grounder(program, limits);
  return grounder.run();
}

}  // namespace relspace::logic
