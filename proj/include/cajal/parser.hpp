#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "cajal/ast.hpp"

namespace cajal {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

/// Concrete syntax:
///
///   e ::= x | tt | ff | <decimal> | succ s | iter a {x -> e} a
///       | \x:T. e | e e | if e then e else e | (e)
///   s ::= a | succ s
///   T ::= Bool | Nat | T -o T | (T)
///
/// Application is left-associative juxtaposition of atoms, `-o` is
/// right-associative, and `--` starts a line comment. Numerals desugar to
/// succ chains. The result is alpha-renamed so all binders are unique.
Expr parse(std::string_view source);

Ty parse_type(std::string_view source);

/// Canonical formatter. Numerals are printed in decimal.
std::string pretty(const Expr& e);

}  // namespace cajal
