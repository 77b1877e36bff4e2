#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace relspace::logic {

struct Term {
  enum class Kind { constant, variable, integer };
  Kind kind = Kind::constant;
  std::string name;  // constant or variable spelling
  long value = 0;    // integer kind

  bool operator==(const Term& o) const {
    if (kind != o.kind) return false;
    return kind == Kind::integer ? value == o.value : name == o.name;
  }
  bool is_ground() const { return kind != Kind::variable; }
  std::string text() const;

  static Term constant(std::string n) { return {Kind::constant, std::move(n), 0}; }
  static Term variable(std::string n) { return {Kind::variable, std::move(n), 0}; }
  static Term integer(long v) { return {Kind::integer, "", v}; }
};

struct Atom {
  std::string pred;
  std::vector<Term> args;
  std::string text() const;
  bool operator==(const Atom& o) const { return pred == o.pred && args == o.args; }
};

// Classical literal: an atom or its strong negation.
struct Literal {
  bool strong_neg = false;
  Atom atom;
  std::string text() const;
  bool operator==(const Literal& o) const {
    return strong_neg == o.strong_neg && atom == o.atom;
  }
  Literal complement() const { return {!strong_neg, atom}; }
};

struct Comparison {
  enum class Op { eq, ne, lt, le, gt, ge };
  Op op = Op::eq;
  Term lhs, rhs;
  std::string text() const;
};

struct BodyElem {
  enum class Kind { literal, comparison };
  Kind kind = Kind::literal;
  bool default_negated = false;  // literal kind only
  Literal lit;
  Comparison cmp;
  std::string text() const;

  static BodyElem positive(Literal l) { return {Kind::literal, false, std::move(l), {}}; }
  static BodyElem negated(Literal l) { return {Kind::literal, true, std::move(l), {}}; }
  static BodyElem compare(Comparison c) { return {Kind::comparison, false, {}, std::move(c)}; }
};

struct Rule {
  std::optional<Literal> head;  // empty = constraint
  std::vector<BodyElem> body;
  bool cr = false;  // consistency-restoring rule (head :+ body)
  int line = 0;
  std::string text() const;
};

struct Sort {
  bool is_range = false;
  long lo = 0, hi = -1;                 // when is_range
  std::vector<std::string> constants;   // direct members, declaration order
  std::vector<std::string> subsorts;
};

struct Signature {
  std::map<std::string, Sort> sorts;
  std::map<std::string, std::vector<std::string>> predicates;  // pred -> arg sort names

  // Ground terms of the sort, subsorts included, deterministic order, no dups.
  std::vector<Term> sort_values(const std::string& sort) const;
  bool term_in_sort(const Term& t, const std::string& sort) const;

  void declare_sort_constants(const std::string& name, const std::vector<std::string>& constants);
  void declare_sort_range(const std::string& name, long lo, long hi);
  void declare_subsort(const std::string& child, const std::string& parent);
  void declare_pred(const std::string& name, const std::vector<std::string>& arg_sorts);
};

struct Program {
  Signature signature;
  std::vector<Rule> rules;
  std::string text() const;
};

const char* op_text(Comparison::Op op);
bool eval_comparison(Comparison::Op op, const Term& lhs, const Term& rhs, bool* ok);

}  // namespace relspace::logic
