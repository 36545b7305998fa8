#pragma once

#include <string>
#include <vector>

#include "geotess/geometry.hpp"

namespace geotess {

/// Compiled arithmetic expression over the coordinates x, y.
///
/// Supports + - * / ^, comparisons and && || ! (yielding 0/1), the constant
/// pi, and sqrt exp log sin cos tan abs atan2 hypot min max pow, chi(c) (1 if
/// c else 0) and if(c, a, b). Parse errors throw InvalidArgument.
class Expression {
 public:
  Expression() = default;
  explicit Expression(const std::string& source);

  double operator()(const Point2& p) const;
  const std::string& source() const { return source_; }

  enum class Op : unsigned char {
    Const, X, Y, Neg, Not, Add, Sub, Mul, Div, Pow, Lt, Le, Gt, Ge, Eq, Ne, And, Or,
    Sqrt, Exp, Log, Sin, Cos, Tan, Abs, Chi, Atan2, Hypot, Min, Max, If
  };

 private:
  struct Instr {
    Op op;
    double value;
  };
  std::string source_;
  std::vector<Instr> program_;
  int max_stack_ = 0;

  friend class ExprParser;
};

}  // namespace geotess
