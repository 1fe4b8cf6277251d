#include "holelab/expression.hpp"

#include "holelab/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <vector>

namespace holelab {

struct Expression::Node {
  enum Kind { number, var_x, var_y, var_r, neg, add, sub, mul, div, pow, call1, call2 } kind = number;
  double value = 0.0;
  double (*f1)(double) = nullptr;
  double (*f2)(double, double) = nullptr;
  std::shared_ptr<const Node> a, b;

  double eval(const Point& x) const {
    switch (kind) {
      case number: return value;
      case var_x: return x.x();
      case var_y: return x.y();
      case var_r: return x.norm();
      case neg: return -a->eval(x);
      case add: return a->eval(x) + b->eval(x);
      case sub: return a->eval(x) - b->eval(x);
      case mul: return a->eval(x) * b->eval(x);
      case div: return a->eval(x) / b->eval(x);
      case pow: return std::pow(a->eval(x), b->eval(x));
      case call1: return f1(a->eval(x));
      case call2: return f2(a->eval(x), b->eval(x));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }
double fmin2(double a, double b) { return std::fmin(a, b); }
double fmax2(double a, double b) { return std::fmax(a, b); }

struct Unary {
  const char* name;
  double (*f)(double);
};
const Unary unary_functions[] = {
    {"sin", [](double v) { return std::sin(v); }},   {"cos", [](double v) { return std::cos(v); }},
    {"tan", [](double v) { return std::tan(v); }},   {"exp", [](double v) { return std::exp(v); }},
    {"log", [](double v) { return std::log(v); }},   {"sqrt", [](double v) { return std::sqrt(v); }},
    {"abs", [](double v) { return std::fabs(v); }},  {"tanh", [](double v) { return std::tanh(v); }},
    {"pos", positive_part},
};

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr n = sum();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return n;
  }

  bool uses_coordinates = false;

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("expression \"" + s_ + "\": " + msg + " at column " + std::to_string(i_ + 1));
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }

  bool accept(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  static NodePtr make(Expression::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  static NodePtr number(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->value = v;
    return n;
  }

  NodePtr sum() {
    NodePtr n = product();
    for (;;) {
      if (accept('+'))
        n = make(Expression::Node::add, n, product());
      else if (accept('-'))
        n = make(Expression::Node::sub, n, product());
      else
        return n;
    }
  }

  NodePtr product() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Expression::Node::mul, n, unary());
      else if (accept('/'))
        n = make(Expression::Node::div, n, unary());
      else
        return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Expression::Node::neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Expression::Node::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    const char c = s_[i_];
    if (c == '(') {
      ++i_;
      NodePtr n = sum();
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + i_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      i_ += static_cast<std::size_t>(end - begin);
      return number(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      const std::string name = s_.substr(start, i_ - start);
      if (name == "x1" || name == "x") return coordinate(Expression::Node::var_x);
      if (name == "x2" || name == "y") return coordinate(Expression::Node::var_y);
      if (name == "r") return coordinate(Expression::Node::var_r);
      if (name == "pi") return number(pi);
      if (name == "e") return number(std::exp(1.0));
      for (const auto& u : unary_functions) {
        if (name != u.name) continue;
        if (!accept('(')) fail("expected '(' after " + name);
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::call1;
        n->f1 = u.f;
        n->a = sum();
        if (!accept(')')) fail("expected ')'");
        return n;
      }
      if (name == "min" || name == "max") {
        if (!accept('(')) fail("expected '(' after " + name);
        auto n = std::make_shared<Expression::Node>();
        n->kind = Expression::Node::call2;
        n->f2 = name == "min" ? fmin2 : fmax2;
        n->a = sum();
        if (!accept(',')) fail("expected ','");
        n->b = sum();
        if (!accept(')')) fail("expected ')'");
        return n;
      }
      i_ = start;
      fail("unknown name '" + name + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr coordinate(Expression::Node::Kind k) {
    uses_coordinates = true;
    return make(k);
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.parse_all();
  e.text_ = text;
  e.uses_coordinates_ = p.uses_coordinates;
  return e;
}

double Expression::operator()(const Point& x) const { return root_->eval(x); }

double Expression::constant() const {
  if (uses_coordinates_) throw ConfigError("expression \"" + text_ + "\" must not depend on the coordinates");
  return root_->eval(Point::Zero());
}

double parse_constant(const std::string& text) { return Expression::parse(text).constant(); }

}  // namespace holelab
