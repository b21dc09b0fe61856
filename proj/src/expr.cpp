#include "pseudogroup/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "pseudogroup/errors.hpp"

namespace pseudogroup {

struct Expression::Node {
  Op op = Op::Const;
  double value = 0.0;
  int exponent = 0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

Expression::Expression() : Expression(constant(0.0)) {}

Expression Expression::constant(double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Const;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable() {
  auto n = std::make_shared<Node>();
  n->op = Op::Var;
  return Expression(std::move(n));
}

Expression Expression::unary(Op op, Expression operand) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(operand.node_);
  return Expression(std::move(n));
}

Expression Expression::binary(Op op, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(lhs.node_);
  n->b = std::move(rhs.node_);
  return Expression(std::move(n));
}

Expression Expression::power(Expression base, int exponent) {
  auto n = std::make_shared<Node>();
  n->op = Op::Pow;
  n->exponent = exponent;
  n->a = std::move(base.node_);
  return Expression(std::move(n));
}

Op Expression::op() const noexcept { return node_->op; }
double Expression::value() const noexcept { return node_->value; }
int Expression::exponent() const noexcept { return node_->exponent; }
Expression Expression::lhs() const { return Expression(node_->a); }
Expression Expression::rhs() const { return Expression(node_->b); }

std::size_t Expression::size() const {
  std::size_t n = 1;
  if (node_->a) n += lhs().size();
  if (node_->b) n += rhs().size();
  return n;
}

double Expression::operator()(double x) const { return evaluate(*this, x); }

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Const:
      return a.value() == b.value() && std::signbit(a.value()) == std::signbit(b.value());
    case Op::Var:
      return true;
    case Op::Pow:
      return a.exponent() == b.exponent() && a.lhs() == b.lhs();
    case Op::Neg:
    case Op::Exp:
    case Op::Log:
      return a.lhs() == b.lhs();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

// ---------------------------------------------------------------------------
// Parser

namespace {

constexpr const char* kPrimaryExpected = "number, 'x', '(', 'exp' or 'log'";

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse_all() {
    Expression e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const {
    std::string found = pos_ < text_.size() ? "'" + std::string(1, text_[pos_]) + "'"
                                            : std::string("end of input");
    throw ParseError(pos_, expected,
                     "syntax error at offset " + std::to_string(pos_) + ": expected " +
                         expected + ", found " + found);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  Expression parse_sum() {
    Expression e = parse_product();
    for (;;) {
      if (accept('+')) {
        e = Expression::binary(Op::Add, e, parse_product());
      } else if (accept('-')) {
        e = Expression::binary(Op::Sub, e, parse_product());
      } else {
        return e;
      }
    }
  }

  Expression parse_product() {
    Expression e = parse_unary();
    for (;;) {
      if (accept('*')) {
        e = Expression::binary(Op::Mul, e, parse_unary());
      } else if (accept('/')) {
        e = Expression::binary(Op::Div, e, parse_unary());
      } else {
        return e;
      }
    }
  }

  Expression parse_unary() {
    if (accept('-')) {
      skip_space();
      // A bare literal directly after the minus becomes a negative constant.
      if (pos_ < text_.size() && starts_number(pos_)) {
        std::size_t save = pos_;
        double v = parse_number();
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != '^') return Expression::constant(-v);
        pos_ = save;
      }
      return Expression::unary(Op::Neg, parse_unary());
    }
    return parse_power();
  }

  Expression parse_power() {
    Expression base = parse_primary();
    if (!accept('^')) return base;
    bool paren = accept('(');
    bool negative = false;
    if (accept('-')) negative = true;
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("integer exponent");
    int exponent = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, exponent);
    if (ec != std::errc()) {
      pos_ = start;
      fail("integer exponent in int range");
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail("integer exponent");
    }
    if (paren) expect(')');
    return Expression::power(base, negative ? -exponent : exponent);
  }

  Expression parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail(kPrimaryExpected);
    if (starts_number(pos_)) return Expression::constant(parse_number());
    if (text_[pos_] == '(') {
      ++pos_;
      Expression e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string_view id = text_.substr(start, pos_ - start);
      if (id == "x") return Expression::variable();
      if (id == "exp" || id == "log") {
        expect('(');
        Expression arg = parse_sum();
        expect(')');
        return Expression::unary(id == "exp" ? Op::Exp : Op::Log, arg);
      }
      pos_ = start;
      fail(kPrimaryExpected);
    }
    fail(kPrimaryExpected);
  }

  bool starts_number(std::size_t p) const {
    char c = text_[p];
    if (std::isdigit(static_cast<unsigned char>(c))) return true;
    return c == '.' && p + 1 < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[p + 1]));
  }

  double parse_number() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < text_.size() && (text_[q] == '+' || text_[q] == '-')) ++q;
      if (q < text_.size() && std::isdigit(static_cast<unsigned char>(text_[q]))) {
        pos_ = q;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || !std::isfinite(v)) {
      pos_ = start;
      fail("finite number");
    }
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double checked(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("non-finite result in ") + what);
  return v;
}

}  // namespace

double evaluate(const Expression& e, double x) {
  switch (e.op()) {
    case Op::Const:
      return e.value();
    case Op::Var:
      return x;
    case Op::Neg:
      return -evaluate(e.lhs(), x);
    case Op::Add:
      return checked(evaluate(e.lhs(), x) + evaluate(e.rhs(), x), "addition");
    case Op::Sub:
      return checked(evaluate(e.lhs(), x) - evaluate(e.rhs(), x), "subtraction");
    case Op::Mul:
      return checked(evaluate(e.lhs(), x) * evaluate(e.rhs(), x), "multiplication");
    case Op::Div: {
      double num = evaluate(e.lhs(), x);
      double den = evaluate(e.rhs(), x);
      if (den == 0.0) throw DomainError("division by zero");
      return checked(num / den, "division");
    }
    case Op::Pow: {
      double b = evaluate(e.lhs(), x);
      if (b == 0.0 && e.exponent() < 0) throw DomainError("zero raised to a negative power");
      return checked(std::pow(b, e.exponent()), "power");
    }
    case Op::Exp:
      return checked(std::exp(evaluate(e.lhs(), x)), "exp");
    case Op::Log: {
      double y = evaluate(e.lhs(), x);
      if (y <= 0.0) throw DomainError("log of non-positive value");
      return std::log(y);
    }
  }
  throw DomainError("unknown node");
}

// ---------------------------------------------------------------------------
// Folding constructors

namespace {

Expression fold_or(double v, const Expression& fallback) {
  return std::isfinite(v) ? Expression::constant(v) : fallback;
}

}  // namespace

Expression operator+(const Expression& a, const Expression& b) {
  Expression raw = Expression::binary(Op::Add, a, b);
  if (a.is_constant() && b.is_constant()) return fold_or(a.value() + b.value(), raw);
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return raw;
}

Expression operator-(const Expression& a, const Expression& b) {
  Expression raw = Expression::binary(Op::Sub, a, b);
  if (a.is_constant() && b.is_constant()) return fold_or(a.value() - b.value(), raw);
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return raw;
}

Expression operator*(const Expression& a, const Expression& b) {
  Expression raw = Expression::binary(Op::Mul, a, b);
  if (a.is_constant() && b.is_constant()) return fold_or(a.value() * b.value(), raw);
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expression::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return raw;
}

Expression operator/(const Expression& a, const Expression& b) {
  Expression raw = Expression::binary(Op::Div, a, b);
  if (a.is_constant() && b.is_constant() && b.value() != 0.0)
    return fold_or(a.value() / b.value(), raw);
  if (a.is_constant(0.0)) return Expression::constant(0.0);
  if (b.is_constant(1.0)) return a;
  return raw;
}

Expression operator-(const Expression& a) {
  if (a.is_constant()) return Expression::constant(-a.value());
  if (a.op() == Op::Neg) return a.lhs();
  return Expression::unary(Op::Neg, a);
}

Expression pow(const Expression& base, int exponent) {
  if (exponent == 0) return Expression::constant(1.0);
  if (exponent == 1) return base;
  Expression raw = Expression::power(base, exponent);
  if (base.is_constant() && !(base.value() == 0.0 && exponent < 0))
    return fold_or(std::pow(base.value(), exponent), raw);
  return raw;
}

Expression exp(const Expression& a) {
  Expression raw = Expression::unary(Op::Exp, a);
  if (a.is_constant()) return fold_or(std::exp(a.value()), raw);
  return raw;
}

Expression log(const Expression& a) {
  Expression raw = Expression::unary(Op::Log, a);
  if (a.is_constant() && a.value() > 0.0) return fold_or(std::log(a.value()), raw);
  return raw;
}

// ---------------------------------------------------------------------------

Expression differentiate(const Expression& e) {
  using E = Expression;
  switch (e.op()) {
    case Op::Const:
      return E::constant(0.0);
    case Op::Var:
      return E::constant(1.0);
    case Op::Neg:
      return -differentiate(e.lhs());
    case Op::Add:
      return differentiate(e.lhs()) + differentiate(e.rhs());
    case Op::Sub:
      return differentiate(e.lhs()) - differentiate(e.rhs());
    case Op::Mul: {
      E u = e.lhs(), v = e.rhs();
      return differentiate(u) * v + u * differentiate(v);
    }
    case Op::Div: {
      E u = e.lhs(), v = e.rhs();
      return (differentiate(u) * v - u * differentiate(v)) / pow(v, 2);
    }
    case Op::Pow: {
      int n = e.exponent();
      E u = e.lhs();
      return E::constant(n) * pow(u, n - 1) * differentiate(u);
    }
    case Op::Exp:
      return exp(e.lhs()) * differentiate(e.lhs());
    case Op::Log:
      return differentiate(e.lhs()) / e.lhs();
  }
  return E::constant(0.0);
}

Expression substitute(const Expression& e, const Expression& x_value) {
  switch (e.op()) {
    case Op::Const:
      return e;
    case Op::Var:
      return x_value;
    case Op::Neg:
      return -substitute(e.lhs(), x_value);
    case Op::Add:
      return substitute(e.lhs(), x_value) + substitute(e.rhs(), x_value);
    case Op::Sub:
      return substitute(e.lhs(), x_value) - substitute(e.rhs(), x_value);
    case Op::Mul:
      return substitute(e.lhs(), x_value) * substitute(e.rhs(), x_value);
    case Op::Div:
      return substitute(e.lhs(), x_value) / substitute(e.rhs(), x_value);
    case Op::Pow:
      return pow(substitute(e.lhs(), x_value), e.exponent());
    case Op::Exp:
      return exp(substitute(e.lhs(), x_value));
    case Op::Log:
      return log(substitute(e.lhs(), x_value));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expression& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void print_to(const Expression& e, std::string& out);

void print_child(const Expression& child, bool parens, std::string& out) {
  if (parens) out += '(';
  print_to(child, out);
  if (parens) out += ')';
}

void print_to(const Expression& e, std::string& out) {
  switch (e.op()) {
    case Op::Const:
      if (std::signbit(e.value())) {
        out += "(-" + number(-e.value()) + ")";
      } else {
        out += number(e.value());
      }
      return;
    case Op::Var:
      out += 'x';
      return;
    case Op::Neg: {
      out += '-';
      Expression a = e.lhs();
      // "-3" would read back as a negative literal, so a positive constant
      // under negation keeps its parentheses.
      bool parens = precedence(a) < 3 || (a.is_constant() && !std::signbit(a.value()));
      print_child(a, parens, out);
      return;
    }
    case Op::Pow:
      print_child(e.lhs(), precedence(e.lhs()) < 5, out);
      out += '^' + std::to_string(e.exponent());
      return;
    case Op::Exp:
    case Op::Log:
      out += e.op() == Op::Exp ? "exp(" : "log(";
      print_to(e.lhs(), out);
      out += ')';
      return;
    default: {
      int p = precedence(e);
      print_child(e.lhs(), precedence(e.lhs()) < p, out);
      switch (e.op()) {
        case Op::Add: out += " + "; break;
        case Op::Sub: out += " - "; break;
        case Op::Mul: out += '*'; break;
        default: out += '/'; break;
      }
      print_child(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
  }
}

}  // namespace

std::string print(const Expression& e) {
  std::string out;
  print_to(e, out);
  return out;
}

}  // namespace pseudogroup
