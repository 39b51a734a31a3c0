#pragma once

#include <memory>
#include <string>

#include "harnlab/geometry.hpp"

namespace harnlab {

// Closed-form scalar field over x1, x2 and r = |x|. Grammar:
//   expr  := term (('+' | '-') term)*
//   term  := unary (('*' | '/') unary)*
//   unary := ('-' | '+') unary | power
//   power := atom ('^' unary)?          right associative, -2^2 = -4
//   atom  := number | x1 | x2 | r | pi | f '(' expr ')' | m '(' expr ',' expr ')' | '(' expr ')'
// with f in {abs, ln, exp} and m in {min, max}.
class Expression {
 public:
  // Throws ConfigError naming the offending position.
  static Expression parse(const std::string& text);
  static Expression constant(double value);

  double operator()(const Point& x) const;
  const std::string& text() const { return text_; }
  // No variable occurs in the expression.
  bool is_constant() const;

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
};

}  // namespace harnlab
