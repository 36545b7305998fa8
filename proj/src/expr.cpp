#include "geotess/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "geotess/errors.hpp"

namespace geotess {

class ExprParser {
 public:
  using Op = Expression::Op;

  ExprParser(const std::string& s, Expression& out) : s_(s), out_(out) {}

  void parse() {
    parse_or();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
    if (out_.program_.empty()) fail("empty expression");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidArgument("expression '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(const char* tok) {
    skip_ws();
    const size_t n = std::char_traits<char>::length(tok);
    if (s_.compare(pos_, n, tok) == 0) {
      pos_ += n;
      return true;
    }
    return false;
  }

  void expect(const char* tok) {
    if (!accept(tok)) fail(std::string("expected '") + tok + "'");
  }

  void emit(Op op, int stack_delta, double v = 0.0) {
    out_.program_.push_back({op, v});
    depth_ += stack_delta;
    if (depth_ > out_.max_stack_) out_.max_stack_ = depth_;
  }

  void parse_or() {
    parse_and();
    while (accept("||")) {
      parse_and();
      emit(Op::Or, -1);
    }
  }

  void parse_and() {
    parse_cmp();
    while (accept("&&")) {
      parse_cmp();
      emit(Op::And, -1);
    }
  }

  void parse_cmp() {
    parse_add();
    static constexpr std::pair<const char*, Op> ops[] = {
        {"<=", Op::Le}, {">=", Op::Ge}, {"==", Op::Eq}, {"!=", Op::Ne}, {"<", Op::Lt}, {">", Op::Gt}};
    for (const auto& [tok, op] : ops) {
      if (accept(tok)) {
        parse_add();
        emit(op, -1);
        return;
      }
    }
  }

  void parse_add() {
    parse_mul();
    for (;;) {
      if (accept("+")) {
        parse_mul();
        emit(Op::Add, -1);
      } else if (accept("-")) {
        parse_mul();
        emit(Op::Sub, -1);
      } else {
        return;
      }
    }
  }

  void parse_mul() {
    parse_unary();
    for (;;) {
      if (accept("*")) {
        parse_unary();
        emit(Op::Mul, -1);
      } else if (accept("/")) {
        parse_unary();
        emit(Op::Div, -1);
      } else {
        return;
      }
    }
  }

  void parse_unary() {
    skip_ws();
    if (accept("-")) {
      parse_unary();
      emit(Op::Neg, 0);
    } else if (accept("+")) {
      parse_unary();
    } else if (s_.compare(pos_, 2, "!=") != 0 && accept("!")) {
      parse_unary();
      emit(Op::Not, 0);
    } else {
      parse_pow();
    }
  }

  void parse_pow() {
    parse_primary();
    if (accept("^")) {
      parse_unary();  // right associative, binds tighter than unary minus on the left
      emit(Op::Pow, -1);
    }
  }

  void parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<size_t>(end - begin);
      emit(Op::Const, 1, v);
      return;
    }
    if (accept("(")) {
      parse_or();
      expect(")");
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t end = pos_;
      while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
      const std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "x") return emit(Op::X, 1);
      if (name == "y") return emit(Op::Y, 1);
      if (name == "pi") return emit(Op::Const, 1, std::numbers::pi);
      if (name == "inf") return emit(Op::Const, 1, HUGE_VAL);
      call(name);
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void call(const std::string& name) {
    struct Fn {
      const char* name;
      Op op;
      int arity;
    };
    static constexpr Fn fns[] = {
        {"sqrt", Op::Sqrt, 1}, {"exp", Op::Exp, 1},     {"log", Op::Log, 1},     {"sin", Op::Sin, 1},
        {"cos", Op::Cos, 1},   {"tan", Op::Tan, 1},     {"abs", Op::Abs, 1},     {"chi", Op::Chi, 1},
        {"ind", Op::Chi, 1},   {"atan2", Op::Atan2, 2}, {"hypot", Op::Hypot, 2}, {"min", Op::Min, 2},
        {"max", Op::Max, 2},   {"pow", Op::Pow, 2},     {"if", Op::If, 3}};
    for (const auto& f : fns) {
      if (name != f.name) continue;
      expect("(");
      for (int a = 0; a < f.arity; ++a) {
        if (a > 0) expect(",");
        parse_or();
      }
      expect(")");
      emit(f.op, 1 - f.arity);
      return;
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  Expression& out_;
  size_t pos_ = 0;
  int depth_ = 0;
};

Expression::Expression(const std::string& source) : source_(source) {
  ExprParser(source_, *this).parse();
}

double Expression::operator()(const Point2& p) const {
  double stack[64] = {};
  std::vector<double> big;
  if (max_stack_ > 64) big.resize(max_stack_);
  double* st = big.empty() ? stack : big.data();
  int top = 0;
  for (const auto& in : program_) {
    switch (in.op) {
      case Op::Const: st[top++] = in.value; break;
      case Op::X: st[top++] = p.x; break;
      case Op::Y: st[top++] = p.y; break;
      case Op::Neg: st[top - 1] = -st[top - 1]; break;
      case Op::Not: st[top - 1] = st[top - 1] == 0.0 ? 1.0 : 0.0; break;
      case Op::Sqrt: st[top - 1] = std::sqrt(st[top - 1]); break;
      case Op::Exp: st[top - 1] = std::exp(st[top - 1]); break;
      case Op::Log: st[top - 1] = std::log(st[top - 1]); break;
      case Op::Sin: st[top - 1] = std::sin(st[top - 1]); break;
      case Op::Cos: st[top - 1] = std::cos(st[top - 1]); break;
      case Op::Tan: st[top - 1] = std::tan(st[top - 1]); break;
      case Op::Abs: st[top - 1] = std::abs(st[top - 1]); break;
      case Op::Chi: st[top - 1] = st[top - 1] != 0.0 ? 1.0 : 0.0; break;
      case Op::If: {
        const double c = st[top - 3], a = st[top - 2], b = st[top - 1];
        top -= 2;
        st[top - 1] = c != 0.0 ? a : b;
        break;
      }
      default: {
        const double b = st[--top];
        double& a = st[top - 1];
        switch (in.op) {
          case Op::Add: a = a + b; break;
          case Op::Sub: a = a - b; break;
          case Op::Mul: a = a * b; break;
          case Op::Div: a = a / b; break;
          case Op::Pow: a = std::pow(a, b); break;
          case Op::Lt: a = a < b; break;
          case Op::Le: a = a <= b; break;
          case Op::Gt: a = a > b; break;
          case Op::Ge: a = a >= b; break;
          case Op::Eq: a = a == b; break;
          case Op::Ne: a = a != b; break;
          case Op::And: a = (a != 0.0 && b != 0.0); break;
          case Op::Or: a = (a != 0.0 || b != 0.0); break;
          case Op::Atan2: a = std::atan2(a, b); break;
          case Op::Hypot: a = std::hypot(a, b); break;
          case Op::Min: a = std::min(a, b); break;
          case Op::Max: a = std::max(a, b); break;
          default: break;
        }
      }
    }
  }
  return st[0];
}

}  // namespace geotess
