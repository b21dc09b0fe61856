#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pseudogroup/expr.hpp"
#include "pseudogroup/interval.hpp"

namespace pseudogroup {

/// Generators are given on the open interval only; endpoint limits are read
/// off at ±(1 - kEndpointInset).
inline constexpr double kEndpointInset = 1e-6;

inline constexpr double kDefaultInversionTol = 1e-12;
inline constexpr double kDefaultDomainTol = 1e-9;
inline constexpr int kDefaultC1Samples = 4096;

/// Estimated sup over (-1,1) of max(|f(x) - x|, |f'(x) - 1|) on a uniform grid
/// of `n_samples` points in [-1 + kEndpointInset, 1 - kEndpointInset]. This is
/// a lower bound for the true C¹ distance to the identity.
double c1_distance(const Expression& f, const Expression& df, int n_samples);

/// A C² increasing map (-1,1) -> R close to the identity.
class Generator {
 public:
  /// Throws NotIncreasing if f' <= 0 at a sample point, and Error if the
  /// sampled C¹ distance to the identity is not below 1.
  Generator(std::string name, Expression f, int c1_samples = kDefaultC1Samples);
  static Generator parse(std::string name, std::string_view text,
                         int c1_samples = kDefaultC1Samples);

  const std::string& name() const { return name_; }
  const Expression& f() const { return f_; }
  const Expression& df() const { return df_; }

  double operator()(double x) const { return evaluate(f_, x); }
  double derivative(double x) const { return evaluate(df_, x); }

  /// Image of (-1,1), with endpoints sampled at the inset.
  const Interval& range() const { return range_; }
  double c1_distance() const { return c1_; }

 private:
  std::string name_;
  Expression f_;
  Expression df_;
  Interval range_;
  double c1_ = 0.0;
};

double c1_distance(const Generator& g, int n_samples);

/// Returns x with |g(x) - y| < tol·(1 - ε), ε = g.c1_distance(), by safeguarded
/// Newton inside a bisection bracket. Throws NotInRange if y is outside g.range().
double invert_generator(const Generator& g, double y, double tol = kDefaultInversionTol);

struct Letter {
  int generator = 0;  // index into the generator set
  int sign = 1;       // +1 or -1

  friend bool operator==(const Letter&, const Letter&) = default;
};

/// A freely reduced composition of generators and inverses. Letters apply
/// right to left: Word{a, b, c} is a ∘ b ∘ c.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters);

  static Word letter(int generator, int sign = 1);
  /// The word for g^k (the inverse letter repeated when k < 0).
  static Word power(int generator, int k);

  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }

  Word inverse() const;
  Word pow(int k) const;

  /// Composition: (a * b)(x) = a(b(x)).
  friend Word operator*(const Word& a, const Word& b);
  friend bool operator==(const Word&, const Word&) = default;
  friend bool operator<(const Word& a, const Word& b);

 private:
  std::vector<Letter> letters_;
};

/// w1^-1 w2^-1 w1 w2, freely reduced.
Word commutator(const Word& w1, const Word& w2);

class GeneratorSet {
 public:
  GeneratorSet() = default;
  GeneratorSet(std::vector<Generator> generators, int claimed_order = 1,
               int c1_samples = kDefaultC1Samples);

  /// Convenience: generators named f1, f2, ... from expression strings.
  static GeneratorSet from_expressions(const std::vector<std::string>& exprs,
                                       int claimed_order = 1,
                                       int c1_samples = kDefaultC1Samples);

  std::size_t size() const { return generators_.size(); }
  const Generator& operator[](std::size_t i) const { return generators_[i]; }
  const std::vector<Generator>& generators() const { return generators_; }

  /// Measured ε: the largest sampled C¹ distance over the generators.
  double epsilon() const { return epsilon_; }
  int claimed_order() const { return claimed_order_; }
  int c1_samples() const { return c1_samples_; }

  /// Index of the generator called `name`, or -1.
  int index_of(std::string_view name) const;

 private:
  std::vector<Generator> generators_;
  double epsilon_ = 0.0;
  int claimed_order_ = 1;
  int c1_samples_ = kDefaultC1Samples;
};

/// Outcome of evaluating a word at one point.
struct WordValue {
  double value = 0.0;
  double derivative = 1.0;  // filled by eval_word_jet only
  int failed_letter = -1;   // index into Word::letters(), -1 when defined

  bool ok() const { return failed_letter < 0; }
};

/// Applies the letters right to left. Every input to a letter must lie in
/// (-1,1); an inverse letter additionally needs its input inside the
/// generator's image. The final output is unconstrained.
WordValue eval_word(const GeneratorSet& gens, const Word& w, double x,
                    double tol = kDefaultInversionTol);

/// eval_word plus the derivative of the word by the chain rule.
WordValue eval_word_jet(const GeneratorSet& gens, const Word& w, double x,
                        double tol = kDefaultInversionTol);

/// eval_word that throws OutOfDomain instead of reporting.
double apply(const GeneratorSet& gens, const Word& w, double x,
             double tol = kDefaultInversionTol);

inline bool is_defined(const GeneratorSet& gens, const Word& w, double x,
                       double tol = kDefaultInversionTol) {
  return eval_word(gens, w, x, tol).ok();
}

/// Maximal open interval on which `w` is defined, endpoints located by
/// bisection to `tol`. The set is an interval because every letter is
/// increasing. Returns Interval::empty() when no probe point is defined.
Interval word_domain(const GeneratorSet& gens, const Word& w, double tol = kDefaultDomainTol,
                     double inversion_tol = kDefaultInversionTol);

/// "f1^-1 f2^-1 f1 f2" style text; the empty word prints as "id".
std::string to_string(const Word& w, const GeneratorSet& gens);

/// Parses whitespace-separated tokens `name`, `name^k` (k a nonzero integer)
/// or `id`. Throws Error on unknown generator names or bad exponents.
Word parse_word(std::string_view text, const GeneratorSet& gens);

}  // namespace pseudogroup
