#pragma once

#include <stdexcept>
#include <string>

#include "logic/program.hpp"

namespace relspace::logic {

struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error("line " + std::to_string(line_) + ", col " + std::to_string(col_) +
                           ": " + msg),
        line(line_),
        col(col_) {}
};

// Text format:
//   #sort name = {c1, c2}.        constant sort
//   #sort name = 0..4.            integer range sort
//   #sort child : parent.         subsort link (both declared)
//   #pred name(sort, ...).        predicate schema
//   head. / head :- body. / :- body. / head :+ body.
// Literals may carry classical negation (-lit); body literals may be
// default-negated (not lit); comparisons use = != < <= > >=.
// Comments run from % to end of line.
Program parse_program(const std::string& text);

}  // namespace relspace::logic
