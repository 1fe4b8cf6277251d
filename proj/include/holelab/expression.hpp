#pragma once

#include "holelab/geometry.hpp"

#include <memory>
#include <string>

namespace holelab {

/// Arithmetic expression in the coordinates x1, x2 (aliases x, y) and
/// r = |x|. Operators + - * / ^ (right-associative), unary minus,
/// constants pi and e, and the functions sin cos tan exp log sqrt abs
/// tanh pos (positive part), min, max.
class Expression {
public:
  struct Node;

  /// Throws ConfigError naming the offending column.
  static Expression parse(const std::string& text);

  double operator()(const Point& x) const;
  /// Value of an expression without coordinates; throws ConfigError when
  /// it uses x1, x2 or r.
  double constant() const;
  bool uses_coordinates() const { return uses_coordinates_; }
  const std::string& text() const { return text_; }

private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  bool uses_coordinates_ = false;
};

/// Convenience: parse and evaluate a constant expression such as "1/16".
double parse_constant(const std::string& text);

}  // namespace holelab
