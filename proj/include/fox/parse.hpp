#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "fox/syntax.hpp"

namespace fox {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Raised for polymorphic / recursive / existential type syntax in annotations.
class UnsupportedFragment : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnboundVariable : public std::runtime_error {
 public:
  explicit UnboundVariable(const std::string& name)
      : std::runtime_error("unbound variable: " + name), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Parses a program: zero or more `def name params = expr;;` bindings followed by one
/// expression. Sugar (let, ;, |||, fun, match, tuples, &&, ||, not) is
/// expanded. With `closed` set, free variables raise UnboundVariable.
Expr parse(std::string_view text, bool closed = true);

/// Parses a type annotation on its own ("ref nat -> unit").
Type parse_type(std::string_view text);

}  // namespace fox
