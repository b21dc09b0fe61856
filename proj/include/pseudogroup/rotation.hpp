#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pseudogroup/linearize.hpp"
#include "pseudogroup/monotone.hpp"
#include "pseudogroup/pmap.hpp"

namespace pseudogroup {

inline constexpr int kDefaultIterations = 10000;
inline constexpr int kDefaultQMax = 50;
inline constexpr double kDegreeOneTol = 1e-9;
/// Equalities in the case normalization and in k(n) are decided to this.
inline constexpr double kTieTol = 1e-12;

/// Increasing u with u(x + 1) = u(x) + 1, given by its restriction to [0,1].
class DegreeOneMap {
 public:
  /// Throws NotDegreeOne if |u(1) - 1 - u(0)| >= tol and NotIncreasing if a
  /// sampled check on [0,1] finds a decrease.
  explicit DegreeOneMap(std::function<double(double)> base, double tol = kDegreeOneTol);
  static DegreeOneMap from_samples(SampledMonotoneMap base, double tol = kDegreeOneTol);

  double operator()(double x) const;
  /// u restricted to [0,1].
  double base(double x) const { return base_(x); }
  /// Degree-one maps with u(0) in (0,1) after subtracting shift().
  int shift() const;

 private:
  std::function<double(double)> base_;
  double u0_ = 0.0;
};

struct Fraction {
  long long p = 0;
  long long q = 1;

  friend bool operator==(const Fraction&, const Fraction&) = default;
};

struct RotationEstimate {
  double value = 0.0;
  int iterations = 0;
  double error_bound = 0.0;
  std::optional<Fraction> rational;
  bool low_confidence = false;
  double cross_check = 0.0;      // orbit average for rotation_number; NaN if not computed
  std::string normalization;     // case reduction applied by relative_translation_number
};

/// Proportion estimator on the normalized map, cross-checked against the
/// orbit average U^n(0)/n. Throws EstimatorMismatch if they differ by more
/// than 2/n.
RotationEstimate rotation_number(const DegreeOneMap& u, int n_iters = kDefaultIterations);

struct TauTraceRow {
  int n = 0;
  double a = 0.0;
  int k = 0;
  long long p = 0;
};

struct TauOptions {
  int n_iters = kDefaultIterations;
  double commutator_tol = 1e-8;  // precondition on x0
  double tie_tol = kTieTol;
  std::vector<TauTraceRow>* trace = nullptr;  // rows of the canonical iteration
};

/// Relative translation number τ(f2, f1, x0). Non-canonical orderings are
/// reduced to f1^-1(x0) < x0 <= f2(x0) <= f1(x0) by
///   f1 moves left:        τ(f2, f1) = τ(f2^-1, f1^-1)
///   f2 moves left:        τ(f2, f1) = -τ(f2^-1, f1)
///   f2(x0) > f1(x0):      τ(f2, f1) = 1 / τ(f1, f2)
/// The steps applied are recorded in `normalization`.
/// Throws FixedPointInput if f1(x0) = x0, CommutatorNotFixed if some [f_i, f_j]
/// moves x0 by more than commutator_tol, InternalConsistency if k(n) leaves {0,1}.
RotationEstimate relative_translation_number(const GeneratorSet& gens, const Word& f1,
                                             const Word& f2, double x0,
                                             const TauOptions& options = {});

/// Checks that every order-1 commutator fixes x0 within tol; throws
/// CommutatorNotFixed naming the first one that does not.
void require_commutator_fixed(const GeneratorSet& gens, double x0, double tol);

/// Degree-one lift of ψ ∘ f2 ∘ ψ^-1 on [0,1], ψ the linearization of f1 at x0,
/// sampled at `segments` + 1 equispaced nodes. f1 is replaced by its inverse
/// if it moves x0 to the left.
DegreeOneMap circle_lift(const GeneratorSet& gens, const Word& f1, const Word& f2, double x0,
                         int segments = kDefaultSegments, double tol = kDegreeOneTol);

/// First continued-fraction convergent p/q with q <= q_max and
/// |value - p/q| <= max(error_bound, 1/(2 q q_max)). low_confidence is set when
/// error_bound >= 1/(2 q q_max), i.e. the estimate cannot separate p/q from
/// its neighbours at this q_max.
RotationEstimate rational_identify(const RotationEstimate& est, int q_max = kDefaultQMax);

}  // namespace pseudogroup
