#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "grounding.hpp"
#include "logic/program.hpp"
#include "scene.hpp"

namespace relspace::learn {

// One labeled target object described by binary relational tests. Attribute
// names come from attribute_vocabulary().
struct RelationalExample {
  std::map<std::string, bool> attrs;
  bool positive = false;  // stable / occluded, by task
  std::string task;       // stability or occlusion
  std::string roi_id;
};

// An attribute with its body expansion: target variable A, partner variable
// B, height variable N. Composite attributes expand to several literals.
struct AttributeDef {
  std::string name;
  std::vector<logic::Literal> literals;
  std::vector<logic::Comparison> comparisons;
};

const std::vector<AttributeDef>& attribute_vocabulary();

// Evaluates every attribute for one target object. partners are the other
// objects in scope (ROI members); relation facts are scene-level.
RelationalExample make_example(const scene::Scene& s,
                               const std::vector<grounding::RelationFact>& facts,
                               const std::vector<std::string>& partners,
                               const std::string& target, const std::string& task, bool positive,
                               const std::string& roi_id);

double entropy(const std::vector<int>& counts);  // base 2; throws on all-zero

struct TreeNode {
  std::string attribute;            // empty at leaves
  std::array<int, 2> counts{0, 0};  // [negative, positive] reaching this node
  std::unique_ptr<TreeNode> no, yes;
  bool leaf() const { return attribute.empty(); }
};

struct DecisionTree {
  std::unique_ptr<TreeNode> root;
  int total = 0;
};

DecisionTree build_tree(const std::vector<RelationalExample>& examples, int max_depth = 6);

enum class AxiomKind { normal, with_default };

struct CandidateAxiom {
  logic::Rule rule;  // canonical: body sorted by text
  AxiomKind kind = AxiomKind::normal;
  std::string task;
  std::vector<std::pair<std::string, bool>> tests;  // attribute-level path
  std::string text() const { return rule.text(); }
};

// One candidate per leaf with purity >= th1 and support >= th2 * total.
// False branches become default-negated literals, which only works for
// single-literal expansions; paths needing more are dropped. When th1 is the
// 0.70 default-rule threshold, leaves below 0.95 purity become default rules
// with a "not <complement of head>" body literal.
std::vector<CandidateAxiom> extract_candidates(const DecisionTree& tree, double th1, double th2,
                                               int total_examples, const std::string& task);

// Keeps candidates whose tests match >= th2 of the validation set and whose
// head agrees with >= th1 of the matches (0.70 for default-kind rules).
std::vector<CandidateAxiom> validate(const std::vector<CandidateAxiom>& candidates,
                                     const std::vector<RelationalExample>& validation, double th1,
                                     double th2);

struct InduceConfig {
  double th1 = 0.95;  // leaf purity / validation agreement
  double th2 = 0.05;  // branch and validation support
  double th3 = 0.40;  // ensemble consistency
  int ensemble_count = 100;
  int max_depth = 6;
  uint64_t seed = 0;
};

// Repeated 50/50 split + induce + extract + validate; returns axioms present
// in at least th3 of the runs. Throws below 10 examples.
std::vector<CandidateAxiom> ensemble_induce(const std::vector<RelationalExample>& examples,
                                            const InduceConfig& config);

struct AxiomRecord {
  CandidateAxiom axiom;
  double strength = 1.0;
  double alpha = 1.0;
  int n = 0;  // cycles since last reinforcement
  int learned_cycle = 0;
  int reinforcements = 0;
};

struct AxiomStore {
  std::vector<AxiomRecord> axioms;
  int cycle = 0;
  std::vector<std::pair<int, std::string>> removal_log;  // (cycle, axiom text)

  const AxiomRecord* find(const std::string& text) const;
};

// Scores a candidate axiom set (label accuracy over the evaluation scenes);
// supplied by the harness so the store stays independent of the reasoner.
using MergeScore = std::function<double(const std::vector<CandidateAxiom>&)>;

// Re-learned axioms reinforce their stored copy. Genuinely new ones are
// grouped with stored versions sharing the head and a body literal; every
// one-per-group combination (plus the keep-only-stored baseline) is scored
// and the best kept, ties going to fewer total body literals then text order.
void add_merge(AxiomStore& store, const std::vector<CandidateAxiom>& fresh,
               const MergeScore& score);

void update_strength(AxiomStore& store);  // n += 1, strength = e^(-alpha n)

// strength back to 1, n to 0, alpha divided by 2^(1/m) with m = cycles since
// first learned (at least 1). Throws if the axiom is not stored.
void reinforce(AxiomStore& store, const std::string& axiom_text);

void prune(AxiomStore& store, double th4 = 0.10);  // strict <

void save_axiom_store(const AxiomStore& store, const std::string& path);
AxiomStore load_axiom_store(const std::string& path);

}  // namespace relspace::learn
