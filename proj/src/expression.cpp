#include "harnlab/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "harnlab/errors.hpp"

namespace harnlab {

enum class Op { number, x1, x2, r, neg, add, sub, mul, div, pow, abs, ln, exp, min, max };

struct Expression::Node {
  Op op = Op::number;
  double value = 0.0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr leaf(Op op, double value = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->value = value;
  return n;
}

NodePtr branch(Op op, NodePtr a, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression '" + s_ + "' at position " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) {
        n = branch(Op::add, n, term());
      } else if (accept('-')) {
        n = branch(Op::sub, n, term());
      } else {
        return n;
      }
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) {
        n = branch(Op::mul, n, unary());
      } else if (accept('/')) {
        n = branch(Op::div, n, unary());
      } else {
        return n;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return branch(Op::neg, unary());
    if (accept('+')) return unary();
    NodePtr base = atom();
    if (accept('^')) return branch(Op::pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    double v = 0.0;
    const char* first = s_.data() + pos_;
    const auto [end, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc() || end == first) fail("bad number");
    pos_ += static_cast<std::size_t>(end - first);
    return leaf(Op::number, v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id == "x1") return leaf(Op::x1);
    if (id == "x2") return leaf(Op::x2);
    if (id == "r") return leaf(Op::r);
    if (id == "pi") return leaf(Op::number, std::numbers::pi);
    Op op;
    bool binary = false;
    if (id == "abs") {
      op = Op::abs;
    } else if (id == "ln") {
      op = Op::ln;
    } else if (id == "exp") {
      op = Op::exp;
    } else if (id == "min") {
      op = Op::min;
      binary = true;
    } else if (id == "max") {
      op = Op::max;
      binary = true;
    } else {
      pos_ = start;
      fail("unknown name '" + id + "'");
    }
    expect('(');
    NodePtr a = expr();
    NodePtr b;
    if (binary) {
      expect(',');
      b = expr();
    }
    expect(')');
    return branch(op, a, b);
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

double eval(const Expression::Node& n, const Point& x) {
  switch (n.op) {
    case Op::number: return n.value;
    case Op::x1: return x[0];
    case Op::x2: return x[1];
    case Op::r: return norm(x);
    case Op::neg: return -eval(*n.a, x);
    case Op::add: return eval(*n.a, x) + eval(*n.b, x);
    case Op::sub: return eval(*n.a, x) - eval(*n.b, x);
    case Op::mul: return eval(*n.a, x) * eval(*n.b, x);
    case Op::div: return eval(*n.a, x) / eval(*n.b, x);
    case Op::pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
    case Op::abs: return std::abs(eval(*n.a, x));
    case Op::ln: return std::log(eval(*n.a, x));
    case Op::exp: return std::exp(eval(*n.a, x));
    case Op::min: return std::min(eval(*n.a, x), eval(*n.b, x));
    case Op::max: return std::max(eval(*n.a, x), eval(*n.b, x));
  }
  return 0.0;
}

bool constant_node(const Expression::Node& n) {
  if (n.op == Op::x1 || n.op == Op::x2 || n.op == Op::r) return false;
  return (!n.a || constant_node(*n.a)) && (!n.b || constant_node(*n.b));
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.text_ = text;
  return e;
}

Expression Expression::constant(double value) {
  Expression e;
  e.root_ = leaf(Op::number, value);
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  e.text_ = ec == std::errc() ? std::string(buf, end) : "nan";
  return e;
}

double Expression::operator()(const Point& x) const { return eval(*root_, x); }

bool Expression::is_constant() const { return constant_node(*root_); }

}  // namespace harnlab
