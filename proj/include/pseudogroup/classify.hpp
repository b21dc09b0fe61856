#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pseudogroup/linearize.hpp"
#include "pseudogroup/monotone.hpp"
#include "pseudogroup/nilpotency.hpp"
#include "pseudogroup/pmap.hpp"
#include "pseudogroup/rotation.hpp"

namespace pseudogroup {

inline constexpr double kDefaultFixedTol = 1e-10;
inline constexpr int kDefaultFixedGrid = 4096;
inline constexpr double kDefaultChainTol = 1e-9;
inline constexpr int kDefaultResidualSamples = 1000;
/// |ψ| along an orbit must pass this before the end of J counts as infinite.
inline constexpr int kDivergenceBound = 1000;

/// Fixed points of a word, as sorted closed components. A component with
/// lo < hi is a plateau of fixed points.
struct FixedPointSet {
  std::vector<Segment> components;
  double tol = kDefaultFixedTol;
  Word source_word;  // empty for common fixed points of the generators

  bool empty() const { return components.empty(); }
  std::vector<double> points() const;  // isolated points only
  bool has_plateau() const;
  bool contains(double x, double slack) const;
};

/// Grid scan of w(x) - x on `interval`: runs of at least three samples with
/// |w(x) - x| < tol become plateaus (ends refined by bisection), sign changes
/// are refined by bisection and local minima of |w(x) - x| by golden-section
/// search. Points closer than max(2 tol, 1e-7) are merged. Throws EmptyDomain
/// for an empty interval.
FixedPointSet fixed_points(const GeneratorSet& gens, const Word& w, const Interval& interval,
                           double tol = kDefaultFixedTol, int grid = kDefaultFixedGrid);

/// Points fixed by every generator: candidates from each generator's scan,
/// intersected, then confirmed by evaluating all generators.
FixedPointSet common_fixed_points(const GeneratorSet& gens, double tol = kDefaultFixedTol,
                                  int grid = kDefaultFixedGrid);

/// Grid approximation of a closed invariant set on which the order-1
/// commutators are the identity.
struct InvariantSetApprox {
  double resolution = 0.0;  // grid cell width
  double tol = 0.0;
  std::vector<Segment> members;
  int removed = 0;  // grid points dropped by the invariance sweep

  bool contains(double x) const;
};

/// Starts from grid points where every defined order-1 commutator moves x by
/// less than tol, then repeatedly drops points having a generator image (or
/// inverse image) inside (-1,1) with no member within one grid cell. Common
/// fixed points are added as point members. Throws ResolutionFailure when
/// nothing survives.
InvariantSetApprox invariant_commuting_set(const GeneratorSet& gens, double tol = 1e-8,
                                           int grid = kDefaultFixedGrid,
                                           double fixed_tol = kDefaultFixedTol);

/// φ = ψ^-1 for the linearization ψ of `base` at x0, with f_i(φ(t)) compared
/// against φ(t + a_i) on sampled t.
struct SemiConjugacy {
  SampledMonotoneMap phi;
  Segment J;
  std::vector<double> a;
  double residual = 0.0;
  int residual_samples = 0;
  Word base;
  double x0 = 0.0;
};

SemiConjugacy build_semi_conjugacy(const GeneratorSet& gens, const Word& base,
                                   const std::vector<double>& a, double x0,
                                   int segments = kDefaultSegments,
                                   int residual_samples = kDefaultResidualSamples,
                                   int max_k = kDefaultMaxOrbit);

/// max over i and sampled t with t, t + a_i in J of |f_i(φ(t)) - φ(t + a_i)|.
/// `phase` in [0,1) shifts the sample grid.
double conjugacy_residual(const GeneratorSet& gens, const SampledMonotoneMap& phi,
                          const std::vector<double>& a, int samples, double phase = 0.5);

/// Case-3 witness: y_{-N} < ... < y_N with f_i(y_k) = y_{k + a_i}.
struct PeriodicChain {
  std::vector<double> y;  // y[k + N] = y_k
  int N = 0;
  std::vector<long long> a;
  long long q = 1;         // a of the base word
  Word base;               // generator or inverse maximizing base(x0)
  Word step;               // word advancing the chain by one index
  std::vector<RotationEstimate> tau;
  double max_defect = 0.0;

  double at(int k) const { return y.at(static_cast<std::size_t>(k + N)); }
};

struct ChainOptions {
  double tol = kDefaultChainTol;
  int q_max = kDefaultQMax;
  int n_iters = kDefaultIterations;
  double commutator_tol = 1e-8;
  double fixed_tol = kDefaultFixedTol;
  int grid = kDefaultFixedGrid;
};

/// Generator or inverse with the largest value at x. Ties go to the lower
/// generator index, then to the generator over its inverse.
Word maximizing_letter(const GeneratorSet& gens, double x);

/// Throws RationalityMismatch if some τ(f_i, base, x0) is not rational with a
/// common denominator <= q_max, ChainInconsistent if the chain relation
/// fails by more than tol or the chain cannot reach past ±(1 - ε).
PeriodicChain find_periodic_chain(const GeneratorSet& gens, double x0,
                                  const ChainOptions& options = {});

/// Words fixing y_0 and y_1: f~_i = F_{i,a_n} for i < n plus the order-1
/// commutators, C(n,2) + n - 1 words in all.
struct StabilizerReduction {
  std::vector<Word> reduced;       // f~_i, i < n
  std::vector<Word> commutators;   // [f_j, f_k], j < k
  int pivot = 0;                   // generator playing f_n
  int pivot_sign = 1;              // -1 when its inverse was used to make a_n > 0
  double max_defect = 0.0;

  std::vector<Word> all() const;
};

StabilizerReduction stabilizer_reduction(const GeneratorSet& gens, const PeriodicChain& chain,
                                         double tol = kDefaultChainTol);

enum class EndBehaviour { Infinite, Finite, Inconclusive };
const char* to_string(EndBehaviour e);

struct CaseOneInterval {
  Interval interval;
  double b = 0.0;
  Word base;
  std::vector<RotationEstimate> tau;
  SemiConjugacy conjugacy;
  EndBehaviour inf_J = EndBehaviour::Inconclusive;  // orbit under base^-1
  EndBehaviour sup_J = EndBehaviour::Inconclusive;  // orbit under base
  bool lo_interior = false;  // the lower end is a common fixed point
  bool hi_interior = false;
};

struct CaseTwo {
  double x0 = 0.0;
  Word base;
  std::vector<RotationEstimate> tau;
  SemiConjugacy conjugacy;
  bool J_exceeds_a = false;
  bool near_equality = false;  // |J| - max |a_i| below one node spacing of ψ
};

struct CaseThree {
  PeriodicChain chain;
  StabilizerReduction stabilizer;
};

struct ClassifyOptions {
  double identity_tol = kDefaultIdentityTol;
  int identity_samples = kDefaultIdentitySamples;
  double commutator_tol = 1e-8;
  double fixed_tol = kDefaultFixedTol;
  int grid = kDefaultFixedGrid;
  int n_iters = kDefaultIterations;
  int q_max = kDefaultQMax;
  int segments = kDefaultSegments;
  double chain_tol = kDefaultChainTol;
  int residual_samples = kDefaultResidualSamples;
  std::optional<double> x0;  // base point for cases 2 and 3
};

struct ClassificationReport {
  int case_id = 0;
  bool ambiguous = false;
  std::vector<int> candidate_cases;
  double epsilon = 0.0;
  VerificationReport nilpotency;
  VerificationReport abelian;
  VerificationReport metabelian;
  FixedPointSet common_fixed_points;
  std::vector<CaseOneInterval> case1;
  std::optional<CaseTwo> case2;
  std::optional<CaseThree> case3;
  std::vector<std::string> warnings;
};

/// Decision procedure for the three cases. Throws HypothesisFailure when a
/// commutator of the claimed order is not the identity; an ε above the
/// nilpotency bound is reported as a warning only.
ClassificationReport classify(const GeneratorSet& gens, const ClassifyOptions& options = {});

}  // namespace pseudogroup
