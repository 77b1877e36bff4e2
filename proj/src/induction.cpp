#include "induction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "logic/parser.hpp"
#include "rng.hpp"

namespace relspace::learn {

namespace {

using logic::Atom;
using logic::BodyElem;
using logic::Comparison;
using logic::Literal;
using logic::Rule;
using logic::Term;

Literal rel_lit(const std::string& rel) {
  return Literal{false, Atom{"obj_relation", {Term::constant(rel), Term::variable("A"),
                                              Term::variable("B")}}};
}

Literal attr_lit(const std::string& pred, const std::string& var, const std::string& value) {
  return Literal{false, Atom{pred, {Term::variable(var), Term::constant(value)}}};
}

std::vector<AttributeDef> build_vocabulary() {
  std::vector<AttributeDef> v;
  for (const char* rel : {"above", "behind", "below", "far", "front", "in", "left",
                          "not_touching", "right", "touching"}) {
    v.push_back({rel, {rel_lit(rel)}, {}});
  }
  v.push_back({"irregular_below", {rel_lit("above"), attr_lit("obj_surface", "B", "irregular")}, {}});
  v.push_back({"large_on_small",
               {rel_lit("above"), attr_lit("obj_size", "A", "large"),
                attr_lit("obj_size", "B", "small")},
               {}});
  v.push_back({"size_large", {attr_lit("obj_size", "A", "large")}, {}});
  v.push_back({"size_small", {attr_lit("obj_size", "A", "small")}, {}});
  v.push_back({"small_base", {rel_lit("above"), attr_lit("obj_size", "B", "small")}, {}});
  v.push_back({"surface_irregular", {attr_lit("obj_surface", "A", "irregular")}, {}});
  for (int k : {2, 4}) {
    AttributeDef d;
    d.name = "tower_height_gt" + std::to_string(k);
    d.literals = {Literal{false, Atom{"tower_height", {Term::variable("A"), Term::variable("N")}}}};
    d.comparisons = {Comparison{Comparison::Op::gt, Term::variable("N"), Term::integer(k)}};
    v.push_back(std::move(d));
  }
  std::sort(v.begin(), v.end(),
            [](const AttributeDef& a, const AttributeDef& b) { return a.name < b.name; });
  return v;
}

std::string head_pred(const std::string& task) {
  if (task == "occlusion") return "occluded";
  if (task == "stability") return "stable";
  throw std::invalid_argument("unknown task " + task);
}

void canonicalize(Rule& r) {
  std::sort(r.body.begin(), r.body.end(),
            [](const BodyElem& a, const BodyElem& b) { return a.text() < b.text(); });
  r.body.erase(std::unique(r.body.begin(), r.body.end(),
                           [](const BodyElem& a, const BodyElem& b) {
                             return a.text() == b.text();
                           }),
               r.body.end());
}

const AttributeDef& vocab_entry(const std::string& name) {
  for (const auto& d : attribute_vocabulary()) {
    if (d.name == name) return d;
  }
  throw std::invalid_argument("unknown attribute " + name);
}

struct PathStep {
  std::string attribute;
  bool value;
};

// Turns a root-to-leaf path into a rule body; returns false when a negative
// step has a composite expansion, which default negation cannot express.
bool path_body(const std::vector<PathStep>& path, std::vector<BodyElem>& body) {
  for (const auto& step : path) {
    const AttributeDef& def = vocab_entry(step.attribute);
    if (step.value) {
      for (const auto& l : def.literals) body.push_back(BodyElem::positive(l));
    } else {
      if (def.literals.size() != 1 || !def.comparisons.empty()) return false;
      body.push_back(BodyElem::negated(def.literals[0]));
    }
    for (const auto& c : def.comparisons) body.push_back(BodyElem::compare(c));
  }
  return true;
}

void walk(const TreeNode* node, std::vector<PathStep>& path, double th1, double th2,
          int total_examples, const std::string& task, std::vector<CandidateAxiom>& out) {
  if (!node->leaf()) {
    path.push_back({node->attribute, false});
    walk(node->no.get(), path, th1, th2, total_examples, task, out);
    path.back().value = true;
    walk(node->yes.get(), path, th1, th2, total_examples, task, out);
    path.pop_back();
    return;
  }
  int support = node->counts[0] + node->counts[1];
  if (support <= 0 || support < th2 * total_examples) return;
  bool positive = node->counts[1] >= node->counts[0];
  double purity = (double)std::max(node->counts[0], node->counts[1]) / support;
  if (purity + 1e-12 < th1) return;
  if (path.empty()) return;  // single-leaf tree carries no condition

  CandidateAxiom cand;
  cand.task = task;
  Literal head{!positive, Atom{head_pred(task), {Term::variable("A")}}};
  cand.rule.head = head;
  if (!path_body(path, cand.rule.body)) return;
  // The fixed 0.70 threshold marks the default-rule pass; leaves that would
  // have passed the normal 0.95 bar stay normal even then.
  bool default_pass = std::fabs(th1 - 0.70) < 1e-9;
  if (default_pass && purity + 1e-12 < 0.95) {
    cand.kind = AxiomKind::with_default;
    cand.rule.body.push_back(BodyElem::negated(head.complement()));
  }
  canonicalize(cand.rule);
  for (const auto& step : path) cand.tests.push_back({step.attribute, step.value});
  out.push_back(std::move(cand));
}

bool matches(const CandidateAxiom& c, const RelationalExample& ex) {
  if (c.task != ex.task) return false;
  for (const auto& [attr, value] : c.tests) {
    auto it = ex.attrs.find(attr);
    if (it == ex.attrs.end() || it->second != value) return false;
  }
  return true;
}

std::vector<std::string> body_elem_texts(const CandidateAxiom& c) {
  std::vector<std::string> out;
  for (const auto& e : c.rule.body) out.push_back(e.text());
  return out;
}

size_t body_size_total(const std::vector<CandidateAxiom>& axioms) {
  size_t n = 0;
  for (const auto& a : axioms) n += a.rule.body.size();
  return n;
}

std::string combo_key(const std::vector<CandidateAxiom>& axioms) {
  std::vector<std::string> texts;
  for (const auto& a : axioms) texts.push_back(a.text());
  std::sort(texts.begin(), texts.end());
  std::string key;
  for (const auto& t : texts) key += t + "\n";
  return key;
}

}  // namespace

const std::vector<AttributeDef>& attribute_vocabulary() {
  static const std::vector<AttributeDef> vocab = build_vocabulary();
  return vocab;
}

RelationalExample make_example(const scene::Scene& s,
                               const std::vector<grounding::RelationFact>& facts,
                               const std::vector<std::string>& partners,
                               const std::string& target, const std::string& task, bool positive,
                               const std::string& roi_id) {
  const scene::ObjectInstance* obj = s.find(target);
  if (!obj) throw std::invalid_argument("unknown target " + target);

  std::set<std::string> partner_set(partners.begin(), partners.end());
  partner_set.erase(target);
  auto has_rel = [&](const std::string& rel, const std::string& a, const std::string& b) {
    for (const auto& f : facts) {
      if (f.relation == rel && f.a == a && f.b == b) return true;
    }
    return false;
  };
  auto any_rel = [&](const std::string& rel) {
    for (const auto& p : partner_set) {
      if (has_rel(rel, target, p)) return true;
    }
    return false;
  };
  auto above_partner_where = [&](auto pred) {
    for (const auto& p : partner_set) {
      if (has_rel("above", target, p) && pred(*s.find(p))) return true;
    }
    return false;
  };

  int height = 1;
  int sidx = s.structure_of(target);
  if (sidx >= 0) height = (int)s.structures[sidx].size();

  RelationalExample ex;
  ex.task = task;
  ex.positive = positive;
  ex.roi_id = roi_id;
  for (const auto& def : attribute_vocabulary()) {
    bool value = false;
    const std::string& a = def.name;
    if (a == "irregular_below") {
      value = above_partner_where(
          [](const scene::ObjectInstance& o) { return o.surface == scene::Surface::irregular; });
    } else if (a == "small_base") {
      value = above_partner_where(
          [](const scene::ObjectInstance& o) { return o.size == scene::SizeClass::small; });
    } else if (a == "large_on_small") {
      value = obj->size == scene::SizeClass::large &&
              above_partner_where([](const scene::ObjectInstance& o) {
                return o.size == scene::SizeClass::small;
              });
    } else if (a == "surface_irregular") {
      value = obj->surface == scene::Surface::irregular;
    } else if (a == "size_small") {
      value = obj->size == scene::SizeClass::small;
    } else if (a == "size_large") {
      value = obj->size == scene::SizeClass::large;
    } else if (a == "tower_height_gt2") {
      value = height > 2;
    } else if (a == "tower_height_gt4") {
      value = height > 4;
    } else {
      value = any_rel(a);
    }
    ex.attrs[a] = value;
  }
  return ex;
}

double entropy(const std::vector<int>& counts) {
  long total = 0;
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("negative count");
    total += c;
  }
  if (total == 0) throw std::invalid_argument("all-zero counts");
  double h = 0;
  for (int c : counts) {
    if (c == 0) continue;
    double p = (double)c / total;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

std::unique_ptr<TreeNode> grow(const std::vector<const RelationalExample*>& examples,
                               const std::vector<std::string>& attrs,
                               std::set<std::string>& used, int depth, int max_depth) {
  auto node = std::make_unique<TreeNode>();
  for (const auto* ex : examples) ++node->counts[ex->positive ? 1 : 0];
  if (node->counts[0] == 0 || node->counts[1] == 0 || depth >= max_depth) return node;

  double parent = entropy({node->counts[0], node->counts[1]});
  double best_gain = 0;
  std::string best;
  for (const auto& a : attrs) {
    if (used.count(a)) continue;
    std::array<std::array<int, 2>, 2> split{{{0, 0}, {0, 0}}};
    for (const auto* ex : examples) {
      auto it = ex->attrs.find(a);
      bool v = it != ex->attrs.end() && it->second;
      ++split[v ? 1 : 0][ex->positive ? 1 : 0];
    }
    double children = 0;
    for (int side = 0; side < 2; ++side) {
      int n = split[side][0] + split[side][1];
      if (n == 0) continue;
      children += (double)n / examples.size() * entropy({split[side][0], split[side][1]});
    }
    double gain = parent - children;
    if (gain > best_gain + 1e-12) {  // lexicographic tie-break via sorted attrs
      best_gain = gain;
      best = a;
    }
  }
  if (best.empty()) return node;  // no attribute helps

  node->attribute = best;
  used.insert(best);
  std::vector<const RelationalExample*> no_side, yes_side;
  for (const auto* ex : examples) {
    auto it = ex->attrs.find(best);
    (it != ex->attrs.end() && it->second ? yes_side : no_side).push_back(ex);
  }
  node->no = grow(no_side, attrs, used, depth + 1, max_depth);
  node->yes = grow(yes_side, attrs, used, depth + 1, max_depth);
  used.erase(best);
  return node;
}

}  // namespace

DecisionTree build_tree(const std::vector<RelationalExample>& examples, int max_depth) {
  if (examples.empty()) throw std::invalid_argument("empty training set");
  std::set<std::string> names;
  for (const auto& ex : examples) {
    for (const auto& [k, v] : ex.attrs) names.insert(k);
  }
  std::vector<std::string> attrs(names.begin(), names.end());
  std::vector<const RelationalExample*> ptrs;
  for (const auto& ex : examples) ptrs.push_back(&ex);
  std::set<std::string> used;
  DecisionTree tree;
  tree.total = (int)examples.size();
  tree.root = grow(ptrs, attrs, used, 0, max_depth);
  return tree;
}

std::vector<CandidateAxiom> extract_candidates(const DecisionTree& tree, double th1, double th2,
                                               int total_examples, const std::string& task) {
  std::vector<CandidateAxiom> out;
  if (!tree.root) return out;
  std::vector<PathStep> path;
  walk(tree.root.get(), path, th1, th2, total_examples, task, out);
  std::set<std::string> seen;
  std::vector<CandidateAxiom> dedup;
  for (auto& c : out) {
    if (seen.insert(c.text()).second) dedup.push_back(std::move(c));
  }
  return dedup;
}

std::vector<CandidateAxiom> validate(const std::vector<CandidateAxiom>& candidates,
                                     const std::vector<RelationalExample>& validation, double th1,
                                     double th2) {
  std::vector<CandidateAxiom> out;
  if (validation.empty()) return out;
  for (const auto& c : candidates) {
    int match = 0, agree = 0;
    bool head_positive = !c.rule.head->strong_neg;
    for (const auto& ex : validation) {
      if (!matches(c, ex)) continue;
      ++match;
      if (ex.positive == head_positive) ++agree;
    }
    if (match == 0 || match + 1e-9 < th2 * validation.size()) continue;
    double bar = c.kind == AxiomKind::with_default ? 0.70 : th1;
    if ((double)agree / match + 1e-12 < bar) continue;
    out.push_back(c);
  }
  return out;
}

std::vector<CandidateAxiom> ensemble_induce(const std::vector<RelationalExample>& examples,
                                            const InduceConfig& config) {
  if (examples.size() < 10) throw std::invalid_argument("need at least 10 examples");
  std::map<std::string, std::pair<CandidateAxiom, int>> tally;
  std::vector<size_t> order(examples.size());
  for (int run = 0; run < config.ensemble_count; ++run) {
    Rng rng(mix_seed(config.seed, "ensemble", (uint64_t)run));
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order.data(), order.size());
    size_t half = order.size() / 2;
    std::vector<RelationalExample> train_half, val_half;
    for (size_t i = 0; i < order.size(); ++i) {
      (i < half ? train_half : val_half).push_back(examples[order[i]]);
    }
    DecisionTree tree = build_tree(train_half, config.max_depth);
    auto cands = extract_candidates(tree, config.th1, config.th2, (int)train_half.size(),
                                    train_half.front().task);
    auto kept = validate(cands, val_half, config.th1, config.th2);
    std::set<std::string> this_run;
    for (auto& c : kept) {
      std::string key = c.text();
      if (!this_run.insert(key).second) continue;
      auto it = tally.find(key);
      if (it == tally.end()) {
        tally.emplace(key, std::make_pair(c, 1));
      } else {
        ++it->second.second;
      }
    }
  }
  std::vector<CandidateAxiom> out;
  for (auto& [key, rec] : tally) {
    if (rec.second + 1e-9 >= config.th3 * config.ensemble_count) out.push_back(rec.first);
  }
  std::sort(out.begin(), out.end(),
            [](const CandidateAxiom& a, const CandidateAxiom& b) { return a.text() < b.text(); });
  return out;
}

const AxiomRecord* AxiomStore::find(const std::string& text) const {
  for (const auto& r : axioms) {
    if (r.axiom.text() == text) return &r;
  }
  return nullptr;
}

void add_merge(AxiomStore& store, const std::vector<CandidateAxiom>& fresh,
               const MergeScore& score) {
  std::vector<CandidateAxiom> incoming;
  std::set<std::string> seen;
  for (const auto& c : fresh) {
    if (!seen.insert(c.text()).second) continue;
    if (store.find(c.text())) {
      reinforce(store, c.text());  // re-learned
    } else {
      incoming.push_back(c);
    }
  }
  if (incoming.empty()) return;

  // Pool = stored + incoming; union by same head plus a shared body element.
  struct Entry {
    CandidateAxiom axiom;
    bool stored;
  };
  std::vector<Entry> pool;
  for (const auto& r : store.axioms) pool.push_back({r.axiom, true});
  for (const auto& c : incoming) pool.push_back({c, false});

  std::vector<size_t> parent(pool.size());
  for (size_t i = 0; i < pool.size(); ++i) parent[i] = i;
  std::function<size_t(size_t)> find_root = [&](size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::vector<std::string>> bodies;
  for (const auto& e : pool) bodies.push_back(body_elem_texts(e.axiom));
  for (size_t i = 0; i < pool.size(); ++i) {
    for (size_t j = i + 1; j < pool.size(); ++j) {
      if (pool[i].axiom.rule.head->text() != pool[j].axiom.rule.head->text()) continue;
      bool overlap = false;
      for (const auto& t : bodies[i]) {
        if (std::find(bodies[j].begin(), bodies[j].end(), t) != bodies[j].end()) {
          overlap = true;
          break;
        }
      }
      if (overlap) parent[find_root(i)] = find_root(j);
    }
  }

  std::map<size_t, std::vector<size_t>> groups;
  for (size_t i = 0; i < pool.size(); ++i) groups[find_root(i)].push_back(i);
  std::vector<std::vector<size_t>> multi;
  std::vector<size_t> singles;
  for (auto& [root, members] : groups) {
    if (members.size() > 1) {
      multi.push_back(members);
    } else {
      singles.push_back(members[0]);
    }
  }

  // Cross product of one pick per group; add the keep-only-stored baseline.
  std::vector<std::vector<CandidateAxiom>> combos;
  std::vector<size_t> pick(multi.size(), 0);
  for (;;) {
    std::vector<CandidateAxiom> combo;
    for (size_t g = 0; g < multi.size(); ++g) combo.push_back(pool[multi[g][pick[g]]].axiom);
    for (size_t i : singles) combo.push_back(pool[i].axiom);
    combos.push_back(std::move(combo));
    size_t g = 0;
    while (g < multi.size() && ++pick[g] == multi[g].size()) pick[g++] = 0;
    if (g == multi.size()) break;
    if (multi.empty()) break;
  }
  double best_score = -1;
  size_t best = 0;
  for (size_t i = 0; i < combos.size(); ++i) {
    double s = score(combos[i]);
    bool better = s > best_score + 1e-12;
    if (!better && i > 0 && std::fabs(s - best_score) <= 1e-12) {
      size_t a = body_size_total(combos[i]), b = body_size_total(combos[best]);
      better = a < b || (a == b && combo_key(combos[i]) < combo_key(combos[best]));
    }
    if (better) {
      best_score = s;
      best = i;
    }
  }
  // Keeping only what was already stored must never lose to the merge; on a
  // tie the new knowledge goes in.
  std::vector<CandidateAxiom> baseline;
  for (const auto& r : store.axioms) baseline.push_back(r.axiom);
  if (score(baseline) > best_score + 1e-12) {
    combos.push_back(std::move(baseline));
    best = combos.size() - 1;
  }

  std::set<std::string> keep;
  for (const auto& a : combos[best]) keep.insert(a.text());
  std::vector<AxiomRecord> next;
  std::set<std::string> present;
  for (auto& r : store.axioms) {
    if (keep.count(r.axiom.text())) {
      present.insert(r.axiom.text());
      next.push_back(std::move(r));
    } else {
      store.removal_log.push_back({store.cycle, r.axiom.text()});
    }
  }
  for (const auto& a : combos[best]) {
    if (present.count(a.text())) continue;
    AxiomRecord rec;
    rec.axiom = a;
    rec.strength = 1.0;
    rec.alpha = 1.0;
    rec.n = 0;
    rec.learned_cycle = store.cycle;
    next.push_back(std::move(rec));
  }
  store.axioms = std::move(next);
}

void update_strength(AxiomStore& store) {
  ++store.cycle;
  for (auto& r : store.axioms) {
    ++r.n;
    r.strength = std::exp(-r.alpha * r.n);
  }
}

void reinforce(AxiomStore& store, const std::string& axiom_text) {
  for (auto& r : store.axioms) {
    if (r.axiom.text() != axiom_text) continue;
    int m = std::max(1, store.cycle - r.learned_cycle);
    r.alpha /= std::pow(2.0, 1.0 / m);
    r.strength = 1.0;
    r.n = 0;
    ++r.reinforcements;
    return;
  }
  throw std::invalid_argument("unknown axiom: " + axiom_text);
}

void prune(AxiomStore& store, double th4) {
  std::vector<AxiomRecord> next;
  for (auto& r : store.axioms) {
    if (r.strength < th4) {
      store.removal_log.push_back({store.cycle, r.axiom.text()});
    } else {
      next.push_back(std::move(r));
    }
  }
  store.axioms = std::move(next);
}

void save_axiom_store(const AxiomStore& store, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "relspace_axioms 1\n";
  out << "cycle " << store.cycle << "\n";
  char buf[64];
  for (const auto& r : store.axioms) {
    std::snprintf(buf, sizeof buf, "%.17g", r.strength);
    out << r.axiom.text() << " % strength=" << buf;
    std::snprintf(buf, sizeof buf, "%.17g", r.alpha);
    out << ", alpha=" << buf << ", n=" << r.n << ", learned_cycle=" << r.learned_cycle
        << ", reinforcements=" << r.reinforcements
        << ", kind=" << (r.axiom.kind == AxiomKind::with_default ? "default" : "normal")
        << ", task=" << r.axiom.task << "\n";
  }
}

AxiomStore load_axiom_store(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != "relspace_axioms 1") {
    throw std::runtime_error("bad axiom store file " + path);
  }
  AxiomStore store;
  if (!std::getline(in, line) || line.rfind("cycle ", 0) != 0) {
    throw std::runtime_error("missing cycle line in " + path);
  }
  store.cycle = std::stoi(line.substr(6));
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    size_t cut = line.find(" % ");
    if (cut == std::string::npos) throw std::runtime_error("axiom line without metadata");
    AxiomRecord rec;
    logic::Program p = logic::parse_program(line.substr(0, cut));
    if (p.rules.size() != 1) throw std::runtime_error("expected one axiom per line");
    rec.axiom.rule = p.rules[0];

    std::string meta = line.substr(cut + 3);
    std::replace(meta.begin(), meta.end(), ',', ' ');
    std::istringstream ms(meta);
    std::string kv;
    while (ms >> kv) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos) continue;
      std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
      if (key == "strength") rec.strength = std::stod(value);
      else if (key == "alpha") rec.alpha = std::stod(value);
      else if (key == "n") rec.n = std::stoi(value);
      else if (key == "learned_cycle") rec.learned_cycle = std::stoi(value);
      else if (key == "reinforcements") rec.reinforcements = std::stoi(value);
      else if (key == "kind") rec.axiom.kind = value == "default" ? AxiomKind::with_default
                                                                  : AxiomKind::normal;
      else if (key == "task") rec.axiom.task = value;
    }
    store.axioms.push_back(std::move(rec));
  }
  return store;
}

}  // namespace relspace::learn
