#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace pseudogroup {

/// Node kinds of the one-variable expression grammar.
enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp, Log };

/// Immutable expression tree in the variable x. Copies share structure, so an
/// Expression is cheap to pass by value and safe to evaluate from many threads.
///
/// Grammar (highest precedence first):
///   primary := number | x | '(' sum ')' | exp '(' sum ')' | log '(' sum ')'
///   power   := primary [ '^' ['-'] integer ]
///   unary   := '-' unary | power
///   product := unary { ('*' | '/') unary }
///   sum     := product { ('+' | '-') product }
class Expression {
 public:
  /// The constant 0.
  Expression();

  static Expression constant(double value);
  static Expression variable();

  /// Raw node constructors. No folding: the tree is exactly what is asked for.
  static Expression unary(Op op, Expression operand);
  static Expression binary(Op op, Expression lhs, Expression rhs);
  static Expression power(Expression base, int exponent);

  Op op() const noexcept;
  double value() const noexcept;  // Const only
  int exponent() const noexcept;  // Pow only
  Expression lhs() const;         // operand of unary nodes, base of Pow
  Expression rhs() const;

  bool is_constant() const noexcept { return op() == Op::Const; }
  bool is_constant(double v) const noexcept { return is_constant() && value() == v; }

  /// Number of nodes in the tree.
  std::size_t size() const;

  double operator()(double x) const;

  /// Structural equality (constants compared bitwise-equal as doubles).
  friend bool operator==(const Expression& a, const Expression& b);
  friend bool operator!=(const Expression& a, const Expression& b) { return !(a == b); }

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Parses `text`; throws ParseError with the byte offset of the first bad token.
Expression parse(std::string_view text);

/// Recursive binary64 evaluation. Throws DomainError on division by zero,
/// log of a non-positive number, or a non-finite intermediate.
double evaluate(const Expression& e, double x);

/// Symbolic d/dx. Only constant folding and the 0/1 identities are applied.
Expression differentiate(const Expression& e);

/// Prints with the minimum parentheses needed for parse(print(e)) == e.
std::string print(const Expression& e);

/// Replaces every occurrence of x in `e` by `x_value` (composition e ∘ x_value).
Expression substitute(const Expression& e, const Expression& x_value);

// Folding constructors used by differentiate and substitute.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, int exponent);
Expression exp(const Expression& a);
Expression log(const Expression& a);

}  // namespace pseudogroup
