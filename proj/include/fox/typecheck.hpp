#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "fox/syntax.hpp"

namespace fox {

class TypeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TypeContext = std::map<std::string, Type>;

/// Monomorphic inference over unit, bool, nat, int, tape, *, +, -> and ref.
///
/// Non-negative literals and rand results start out as numeric variables that
/// may become nat or int; anything left undetermined defaults to int, and
/// unconstrained non-numeric variables default to unit.
Type typecheck(const TypeContext& ctx, const Expr& e);

inline Type typecheck(const Expr& e) { return typecheck({}, e); }

}  // namespace fox
