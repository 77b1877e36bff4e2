#include "program.hpp"

#include <algorithm>
#include <stdexcept>

namespace relspace::logic {

std::string Term::text() const {
  switch (kind) {
    case Kind::integer: return std::to_string(value);
    default: return name;
  }
}

std::string Atom::text() const {
  if (args.empty()) return pred;
  std::string out = pred + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += args[i].text();
  }
  return out + ")";
}

std::string Literal::text() const { return strong_neg ? "-" + atom.text() : atom.text(); }

const char* op_text(Comparison::Op op) {
  switch (op) {
    case Comparison::Op::eq: return "=";
    case Comparison::Op::ne: return "!=";
    case Comparison::Op::lt: return "<";
    case Comparison::Op::le: return "<=";
    case Comparison::Op::gt: return ">";
    case Comparison::Op::ge: return ">=";
  }
  return "?";
}

std::string Comparison::text() const { return lhs.text() + " " + op_text(op) + " " + rhs.text(); }

std::string BodyElem::text() const {
  if (kind == Kind::comparison) return cmp.text();
  return default_negated ? "not " + lit.text() : lit.text();
}

std::string Rule::text() const {
  std::string out;
  if (head) out += head->text();
  if (!body.empty() || !head) {
    out += head ? (cr ? " :+ " : " :- ") : ":- ";
    for (size_t i = 0; i < body.size(); ++i) {
      if (i) out += ", ";
      out += body[i].text();
    }
  } else if (cr) {
    out += " :+";
  }
  out += ".";
  return out;
}

std::string Program::text() const {
  std::string out;
  for (const auto& [name, sort] : signature.sorts) {
    out += "#sort " + name + " = ";
    if (sort.is_range) {
      out += std::to_string(sort.lo) + ".." + std::to_string(sort.hi);
    } else {
      out += "{";
      for (size_t i = 0; i < sort.constants.size(); ++i) {
        if (i) out += ", ";
        out += sort.constants[i];
      }
      out += "}";
    }
    out += ".\n";
    for (const auto& sub : sort.subsorts) out += "#sort " + sub + " : " + name + ".\n";
  }
  for (const auto& [name, sorts] : signature.predicates) {
    out += "#pred " + name + "(";
    for (size_t i = 0; i < sorts.size(); ++i) {
      if (i) out += ", ";
      out += sorts[i];
    }
    out += ").\n";
  }
  for (const auto& r : rules) out += r.text() + "\n";
  return out;
}

void Signature::declare_sort_constants(const std::string& name,
                                       const std::vector<std::string>& constants) {
  Sort& s = sorts[name];
  for (const auto& c : constants) {
    if (std::find(s.constants.begin(), s.constants.end(), c) == s.constants.end()) {
      s.constants.push_back(c);
    }
  }
}

void Signature::declare_sort_range(const std::string& name, long lo, long hi) {
  if (lo > hi) throw std::runtime_error("empty integer range for sort " + name);
  Sort& s = sorts[name];
  s.is_range = true;
  s.lo = lo;
  s.hi = hi;
}

void Signature::declare_subsort(const std::string& child, const std::string& parent) {
  if (!sorts.count(child)) throw std::runtime_error("subsort of undeclared sort " + child);
  Sort& p = sorts[parent];
  if (std::find(p.subsorts.begin(), p.subsorts.end(), child) == p.subsorts.end()) {
    p.subsorts.push_back(child);
  }
}

void Signature::declare_pred(const std::string& name, const std::vector<std::string>& arg_sorts) {
  for (const auto& s : arg_sorts) {
    if (!sorts.count(s)) throw std::runtime_error("predicate " + name + " uses undeclared sort " + s);
  }
  predicates[name] = arg_sorts;
}

std::vector<Term> Signature::sort_values(const std::string& sort) const {
  auto it = sorts.find(sort);
  if (it == sorts.end()) throw std::runtime_error("undeclared sort " + sort);
  std::vector<Term> out;
  std::set<std::string> seen;
  if (it->second.is_range) {
    for (long v = it->second.lo; v <= it->second.hi; ++v) out.push_back(Term::integer(v));
  }
  for (const auto& c : it->second.constants) {
    if (seen.insert(c).second) out.push_back(Term::constant(c));
  }
  for (const auto& sub : it->second.subsorts) {
    for (auto& t : sort_values(sub)) {
      if (t.kind == Term::Kind::integer || seen.insert(t.name).second) out.push_back(t);
    }
  }
  return out;
}

bool Signature::term_in_sort(const Term& t, const std::string& sort) const {
  auto it = sorts.find(sort);
  if (it == sorts.end()) return false;
  if (t.kind == Term::Kind::integer) {
    if (it->second.is_range && t.value >= it->second.lo && t.value <= it->second.hi) return true;
  } else {
    const auto& cs = it->second.constants;
    if (std::find(cs.begin(), cs.end(), t.name) != cs.end()) return true;
  }
  for (const auto& sub : it->second.subsorts) {
    if (term_in_sort(t, sub)) return true;
  }
  return false;
}

bool eval_comparison(Comparison::Op op, const Term& lhs, const Term& rhs, bool* ok) {
  *ok = true;
  if (op == Comparison::Op::eq || op == Comparison::Op::ne) {
    bool eq = lhs == rhs;
    return op == Comparison::Op::eq ? eq : !eq;
  }
  if (lhs.kind != Term::Kind::integer || rhs.kind != Term::Kind::integer) {
    *ok = false;  // ordering comparisons are integer-only
    return false;
  }
  switch (op) {
    case Comparison::Op::lt: return lhs.value < rhs.value;
    case Comparison::Op::le: return lhs.value <= rhs.value;
    case Comparison::Op::gt: return lhs.value > rhs.value;
    case Comparison::Op::ge: return lhs.value >= rhs.value;
    default: return false;
  }
}

}  // namespace relspace::logic
