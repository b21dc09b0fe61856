#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pseudogroup/pmap.hpp"

namespace pseudogroup {

inline constexpr double kDefaultIdentityTol = 1e-8;
inline constexpr int kDefaultIdentitySamples = 2048;
inline constexpr int kDefaultMaxCommutators = 4096;

/// A commutator [left, right] together with how it was built. Order 1
/// entries are [f_i, f_j]; for order m > 1 the right child has order m - 1
/// and the left child is a generator or a commutator of order < m.
struct CommutatorTree {
  Word word;
  int order = 1;
  int left_generator = -1;  // set when the left child is a generator
  std::shared_ptr<const CommutatorTree> left;
  std::shared_ptr<const CommutatorTree> right;  // null for order 1
  int right_generator = -1;                     // order 1 only
};

struct CommutatorEnumeration {
  std::vector<CommutatorTree> commutators;
  bool truncated = false;
};

/// All order-m commutator words, freely reduced, with w and w^-1 identified
/// and trivially reducing words dropped. At most max_count entries are kept
/// per order; `truncated` records whether any order hit the cap.
CommutatorEnumeration enumerate_commutators(const GeneratorSet& gens, int m,
                                            int max_count = kDefaultMaxCommutators);

/// Sampled check that a word equals the identity on its domain.
struct IdentityCheckReport {
  Word word;
  std::string label;  // text form of the word
  int order = 0;      // commutator order when known, 0 otherwise
  Interval checked_interval;
  double max_deviation = 0.0;
  double worst_x = 0.0;
  int sample_count = 0;
  double tol = kDefaultIdentityTol;
  bool verdict = true;
};

/// Samples |w(x) - x| on n_samples points of word_domain(w) ∩ (-1+10ε, 1-10ε).
/// A word that reduces to the empty word is reported as the identity without
/// numerical work. Throws EmptyDomain if the checked interval is empty.
IdentityCheckReport check_identity(const GeneratorSet& gens, const Word& w,
                                   double tol = kDefaultIdentityTol,
                                   int n_samples = kDefaultIdentitySamples);

struct VerificationReport {
  std::string property;  // "nilpotent", "abelian" or "metabelian"
  int order = 1;
  double epsilon = 0.0;
  int c1_samples = 0;
  double epsilon_bound = 0.0;
  bool epsilon_ok = true;
  std::vector<IdentityCheckReport> checks;
  bool truncated = false;
  bool commutators_ok = true;
  bool passed = true;
  std::string failure;  // empty when passed
};

/// ε < 10^-(m+1) and every order-m commutator is the identity on the checked
/// interval. Orders above m follow: an order-(m+1) commutator has an order-m
/// right child, and [g, id] = id.
VerificationReport verify_near_identity_nilpotent(const GeneratorSet& gens, int m,
                                                  double tol = kDefaultIdentityTol,
                                                  int n_samples = kDefaultIdentitySamples,
                                                  int max_count = kDefaultMaxCommutators);

/// The generators commute. `passed` reflects the commutator checks only; the
/// ε < 1/100 test is reported in `epsilon_ok` without gating the verdict.
VerificationReport verify_abelian(const GeneratorSet& gens, double tol = kDefaultIdentityTol,
                                  int n_samples = kDefaultIdentitySamples);

/// All order-1 commutators commute with each other.
VerificationReport verify_metabelian(const GeneratorSet& gens, double tol = kDefaultIdentityTol,
                                     int n_samples = kDefaultIdentitySamples);

/// Order-1 commutator words [f_i, f_j], i < j, including ones that reduce to
/// the empty word (needed for indexing by pair).
std::vector<Word> order_one_commutators(std::size_t n_generators);

}  // namespace pseudogroup
