#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "logic/program.hpp"

namespace relspace::logic {

struct GroundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GroundRule {
  int head = -1;  // literal id, -1 = constraint
  std::vector<int> body_pos;
  std::vector<int> body_neg;  // default-negated
  bool cr = false;
  int cr_id = -1;  // index into cr_rules when cr
};

struct GroundProgram {
  std::vector<Literal> literals;       // id -> ground literal
  std::vector<int> complement;        // id -> complement id, -1 if absent
  std::map<std::string, int> index;   // literal text -> id
  std::vector<GroundRule> rules;      // regular rules
  std::vector<GroundRule> cr_rules;

  int intern(const Literal& lit);
  int find(const std::string& text) const;
  const std::string& text_of(int id) const;
  // Distinct atoms, counting a literal and its classical negation once.
  size_t atom_count() const;

 private:
  std::vector<std::string> texts_;
};

struct GroundLimits {
  size_t max_rules = 200000;
};

GroundProgram ground(const Program& program, const GroundLimits& limits = {});

}  // namespace relspace::logic
