#include "logic/parser.hpp"

#include <cctype>
#include <map>
#include <set>

namespace relspace::logic {
namespace {

struct Token {
  enum class Kind { ident, var, number, punct, end };
  Kind kind = Kind::end;
  std::string text;
  long value = 0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Token next() {
    skip_blank();
    Token t;
    t.line = line_;
    t.col = col_;
    int c = peek();
    if (c < 0) return t;
    if (std::isdigit(c)) {
      t.kind = Token::Kind::number;
      while (std::isdigit(peek())) t.text += take();
      t.value = std::stol(t.text);
      return t;
    }
    if (std::isalpha(c)) {
      while (std::isalnum(peek()) || peek() == '_') t.text += take();
      t.kind = std::isupper(c) ? Token::Kind::var : Token::Kind::ident;
      return t;
    }
    t.kind = Token::Kind::punct;
    if (c == '#') {
      t.text += take();
      while (std::isalpha(peek())) t.text += take();
      if (t.text != "#sort" && t.text != "#pred") {
        throw ParseError("unknown directive " + t.text, t.line, t.col);
      }
      return t;
    }
    switch (c) {
      case '(': case ')': case '{': case '}': case ',': case '-': case '=':
        t.text += take();
        return t;
      case '.':
        t.text += take();
        if (peek() == '.') t.text += take();
        return t;
      case ':':
        t.text += take();
        if (peek() == '-' || peek() == '+') t.text += take();
        return t;
      case '!':
        t.text += take();
        if (peek() != '=') throw ParseError("expected != ", t.line, t.col);
        t.text += take();
        return t;
      case '<': case '>':
        t.text += take();
        if (peek() == '=') t.text += take();
        return t;
      default:
        throw ParseError(std::string("unexpected character '") + char(c) + "'", t.line, t.col);
    }
  }

 private:
  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;

  int peek() const { return pos_ < src_.size() ? (unsigned char)src_[pos_] : -1; }
  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_blank() {
    for (;;) {
      while (pos_ < src_.size() && std::isspace((unsigned char)src_[pos_])) take();
      if (peek() == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
        continue;
      }
      break;
    }
  }
};

struct PredUse {
  size_t arity;
  int line, col;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : lex_(src) { advance(); }

  Program run() {
    while (tok_.kind != Token::Kind::end) {
      if (tok_.kind == Token::Kind::punct && tok_.text == "#sort") {
        parse_sort();
      } else if (tok_.kind == Token::Kind::punct && tok_.text == "#pred") {
        parse_pred();
      } else {
        parse_rule();
      }
    }
    validate();
    return std::move(prog_);
  }

 private:
  Lexer lex_;
  Token tok_;
  Program prog_;
  std::map<std::string, std::string> parent_of_;
  std::map<std::string, std::string> member_sort_;
  std::map<std::string, PredUse> inferred_;

  void advance() { tok_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, tok_.line, tok_.col); }
  [[noreturn]] void fail_at(const std::string& msg, int line, int col) {
    throw ParseError(msg, line, col);
  }

  bool at_punct(const std::string& p) const {
    return tok_.kind == Token::Kind::punct && tok_.text == p;
  }
  void expect_punct(const std::string& p, const std::string& what) {
    if (!at_punct(p)) fail("expected " + what);
    advance();
  }
  std::string expect_ident(const std::string& what) {
    if (tok_.kind != Token::Kind::ident) fail("expected " + what);
    std::string s = tok_.text;
    advance();
    return s;
  }

  void parse_sort() {
    advance();
    if (tok_.kind != Token::Kind::ident) fail("expected sort name");
    std::string name = tok_.text;
    int nline = tok_.line, ncol = tok_.col;
    advance();
    if (at_punct(":")) {
      advance();
      std::string parent = expect_ident("parent sort name");
      if (!prog_.signature.sorts.count(name)) fail_at("undeclared sort " + name, nline, ncol);
      if (!prog_.signature.sorts.count(parent)) fail("undeclared sort " + parent);
      if (parent_of_.count(name)) fail_at("sort " + name + " already has a parent", nline, ncol);
      for (std::string up = parent; !up.empty();) {
        if (up == name) fail_at("cyclic sort hierarchy through " + name, nline, ncol);
        auto it = parent_of_.find(up);
        up = it == parent_of_.end() ? "" : it->second;
      }
      parent_of_[name] = parent;
      prog_.signature.declare_subsort(name, parent);
      expect_punct(".", ". after sort declaration");
      return;
    }
    expect_punct("=", "= or : after sort name");
    if (prog_.signature.sorts.count(name)) fail_at("sort " + name + " redeclared", nline, ncol);
    if (at_punct("{")) {
      advance();
      std::vector<std::string> members;
      for (;;) {
        if (tok_.kind != Token::Kind::ident) fail("expected constant in sort " + name);
        if (member_sort_.count(tok_.text)) {
          fail("constant " + tok_.text + " already belongs to sort " + member_sort_[tok_.text]);
        }
        member_sort_[tok_.text] = name;
        members.push_back(tok_.text);
        advance();
        if (at_punct(",")) {
          advance();
          continue;
        }
        break;
      }
      expect_punct("}", "} after sort members");
      prog_.signature.declare_sort_constants(name, members);
    } else if (tok_.kind == Token::Kind::number) {
      long lo = tok_.value;
      advance();
      expect_punct("..", ".. in integer sort range");
      if (tok_.kind != Token::Kind::number) fail("expected range upper bound");
      long hi = tok_.value;
      advance();
      if (lo > hi) fail_at("empty range for sort " + name, nline, ncol);
      prog_.signature.declare_sort_range(name, lo, hi);
    } else {
      fail("expected { or integer after =");
    }
    expect_punct(".", ". after sort declaration");
  }

  void parse_pred() {
    advance();
    if (tok_.kind != Token::Kind::ident) fail("expected predicate name");
    std::string name = tok_.text;
    int nline = tok_.line, ncol = tok_.col;
    advance();
    std::vector<std::string> arg_sorts;
    expect_punct("(", "( after predicate name");
    if (!at_punct(")")) {
      for (;;) {
        if (tok_.kind != Token::Kind::ident) fail("expected sort name");
        if (!prog_.signature.sorts.count(tok_.text)) fail("undeclared sort " + tok_.text);
        arg_sorts.push_back(tok_.text);
        advance();
        if (at_punct(",")) {
          advance();
          continue;
        }
        break;
      }
    }
    expect_punct(")", ") after argument sorts");
    expect_punct(".", ". after predicate declaration");
    auto it = prog_.signature.predicates.find(name);
    if (it != prog_.signature.predicates.end() && it->second != arg_sorts) {
      fail_at("predicate " + name + " redeclared with different sorts", nline, ncol);
    }
    prog_.signature.declare_pred(name, arg_sorts);
  }

  Term parse_term() {
    if (tok_.kind == Token::Kind::var) {
      Term t = Term::variable(tok_.text);
      advance();
      return t;
    }
    if (tok_.kind == Token::Kind::number) {
      Term t = Term::integer(tok_.value);
      advance();
      return t;
    }
    if (at_punct("-")) {
      advance();
      if (tok_.kind != Token::Kind::number) fail("expected integer after -");
      Term t = Term::integer(-tok_.value);
      advance();
      return t;
    }
    if (tok_.kind == Token::Kind::ident) {
      Term t = Term::constant(tok_.text);
      advance();
      return t;
    }
    fail("expected term");
  }

  Atom parse_atom() {
    if (tok_.kind != Token::Kind::ident) fail("expected predicate name");
    Atom a;
    a.pred = tok_.text;
    advance();
    if (at_punct("(")) {
      advance();
      for (;;) {
        a.args.push_back(parse_term());
        if (at_punct(",")) {
          advance();
          continue;
        }
        break;
      }
      expect_punct(")", ") after arguments");
    }
    return a;
  }

  Literal parse_literal() {
    Literal l;
    if (at_punct("-")) {
      l.strong_neg = true;
      advance();
    }
    l.atom = parse_atom();
    return l;
  }

  bool at_cmp_op() const {
    if (tok_.kind != Token::Kind::punct) return false;
    return tok_.text == "=" || tok_.text == "!=" || tok_.text == "<" || tok_.text == "<=" ||
           tok_.text == ">" || tok_.text == ">=";
  }

  Comparison::Op take_cmp_op() {
    Comparison::Op op;
    if (tok_.text == "=") op = Comparison::Op::eq;
    else if (tok_.text == "!=") op = Comparison::Op::ne;
    else if (tok_.text == "<") op = Comparison::Op::lt;
    else if (tok_.text == "<=") op = Comparison::Op::le;
    else if (tok_.text == ">") op = Comparison::Op::gt;
    else op = Comparison::Op::ge;
    advance();
    return op;
  }

  BodyElem parse_body_elem() {
    if (tok_.kind == Token::Kind::ident && tok_.text == "not") {
      advance();
      return BodyElem::negated(parse_literal());
    }
    if (tok_.kind == Token::Kind::var || tok_.kind == Token::Kind::number) {
      Term lhs = parse_term();
      if (!at_cmp_op()) fail("expected comparison operator");
      Comparison c;
      c.lhs = lhs;
      c.op = take_cmp_op();
      c.rhs = parse_term();
      return BodyElem::compare(c);
    }
    if (at_punct("-")) {
      return BodyElem::positive(parse_literal());
    }
    // Lowercase ident: a 0-ary atom followed by a comparison op is really
    // a constant on the left of a comparison.
    Atom a = parse_atom();
    if (a.args.empty() && at_cmp_op()) {
      Comparison c;
      c.lhs = Term::constant(a.pred);
      c.op = take_cmp_op();
      c.rhs = parse_term();
      return BodyElem::compare(c);
    }
    return BodyElem::positive(Literal{false, std::move(a)});
  }

  void parse_rule() {
    Rule r;
    r.line = tok_.line;
    if (at_punct(":-")) {
      advance();
      parse_body(r);
    } else {
      r.head = parse_literal();
      if (at_punct(".")) {
        advance();
        prog_.rules.push_back(std::move(r));
        return;
      }
      if (at_punct(":-")) {
        advance();
        parse_body(r);
      } else if (at_punct(":+")) {
        r.cr = true;
        advance();
        if (at_punct(".")) {
          advance();
          prog_.rules.push_back(std::move(r));
          return;
        }
        parse_body(r);
      } else {
        fail("expected . :- or :+ after rule head");
      }
    }
    prog_.rules.push_back(std::move(r));
  }

  void parse_body(Rule& r) {
    for (;;) {
      r.body.push_back(parse_body_elem());
      if (at_punct(",")) {
        advance();
        continue;
      }
      break;
    }
    expect_punct(".", ". at end of rule");
  }

  void check_literal(const Literal& l, int line) {
    if (l.atom.pred == "not") fail_at("'not' is reserved", line, 1);
    auto it = prog_.signature.predicates.find(l.atom.pred);
    if (it != prog_.signature.predicates.end()) {
      if (it->second.size() != l.atom.args.size()) {
        fail_at("predicate " + l.atom.pred + " expects " + std::to_string(it->second.size()) +
                    " arguments, got " + std::to_string(l.atom.args.size()),
                line, 1);
      }
      for (size_t i = 0; i < l.atom.args.size(); ++i) {
        const Term& t = l.atom.args[i];
        if (t.kind == Term::Kind::variable) continue;
        if (!prog_.signature.term_in_sort(t, it->second[i])) {
          fail_at("argument " + t.text() + " of " + l.atom.pred + " is not in sort " +
                      it->second[i],
                  line, 1);
        }
      }
      return;
    }
    auto [use, inserted] = inferred_.try_emplace(l.atom.pred, PredUse{l.atom.args.size(), line, 1});
    if (!inserted && use->second.arity != l.atom.args.size()) {
      fail_at("predicate " + l.atom.pred + " used with inconsistent arities", line, 1);
    }
  }

  void validate() {
    for (const auto& r : prog_.rules) {
      if (r.cr && !r.head) fail_at("CR rule needs a head", r.line, 1);
      if (!r.head && r.body.empty()) fail_at("constraint needs a body", r.line, 1);
      if (r.head) check_literal(*r.head, r.line);
      for (const auto& b : r.body) {
        if (b.kind == BodyElem::Kind::literal) check_literal(b.lit, r.line);
      }
    }
  }
};

}  // namespace

Program parse_program(const std::string& text) {
  Parser parser(text);
  return parser.run();
}

}  // namespace relspace::logic
