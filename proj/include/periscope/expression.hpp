#pragma once

#include <memory>
#include <string>

#include "periscope/jet.hpp"

namespace periscope {

/// A parsed closed-form expression in the variables x1, x2.
///
/// Grammar: numbers, x1, x2, pi, + - * / ^ (right associative), unary minus,
/// parentheses, and the functions exp log sin cos tan sqrt.
class Expression {
 public:
  /// Throws Error(parse_error) with the column of the offending token.
  static Expression parse(const std::string& text);

  const std::string& source() const { return source_; }

  double evaluate(const Vec2& x) const;
  /// Taylor expansion about x to the jet's order.
  Jet expand(const Vec2& x, int order) const;

  /// True when the expression is a polynomial in x1, x2 (no functions,
  /// only non-negative integer powers, division only by constants).
  bool is_polynomial() const;

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace periscope
