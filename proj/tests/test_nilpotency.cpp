#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "pseudogroup/errors.hpp"
#include "pseudogroup/nilpotency.hpp"
#include "test_support.hpp"

using namespace pseudogroup;
using namespace pseudogroup::testing;

namespace {

// Closed-form commutator of f1 = x + 0.003 and f2 = x + 0.003 + 0.0005 x²,
// with the quadratic inverted by the root formula.
double quadratic_pair_commutator(double x) {
  auto f1 = [](double v) { return v + 0.003; };
  auto f1i = [](double v) { return v - 0.003; };
  auto f2 = [](double v) { return v + 0.003 + 0.0005 * v * v; };
  auto f2i = [](double y) { return (-1 + std::sqrt(1 - 4 * 0.0005 * (0.003 - y))) / (2 * 0.0005); };
  return f1i(f2i(f1(f2(x))));
}

}  // namespace

TEST_CASE("enumerate_commutators") {
  auto three = GeneratorSet::from_expressions({"x + 0.001", "x + 0.002", "x + 0.003"});
  auto two = GeneratorSet::from_expressions({"x + 0.001", "x + 0.002"});
  auto one = GeneratorSet::from_expressions({"x + 0.001"});

  SUBCASE("order 1 gives one word per unordered pair") {
    auto e = enumerate_commutators(three, 1);
    REQUIRE(e.commutators.size() == 3);
    CHECK(to_string(e.commutators[0].word, three) == "f1^-1 f2^-1 f1 f2");
    CHECK(to_string(e.commutators[1].word, three) == "f1^-1 f3^-1 f1 f3");
    CHECK(to_string(e.commutators[2].word, three) == "f2^-1 f3^-1 f2 f3");
    CHECK_FALSE(e.truncated);
  }
  SUBCASE("order 2 with two generators, worked by hand") {
    auto e = enumerate_commutators(two, 2);
    Word c = commutator(Word::letter(0), Word::letter(1));
    std::set<Word> expected{commutator(Word::letter(0), c), commutator(Word::letter(1), c)};
    std::set<Word> got;
    for (const auto& t : e.commutators) {
      got.insert(t.word);
      CHECK(t.order == 2);
      REQUIRE(t.right);
      CHECK(t.right->order == 1);
    }
    CHECK(got == expected);
  }
  SUBCASE("one generator has no commutators") {
    CHECK(enumerate_commutators(one, 1).commutators.empty());
    CHECK(enumerate_commutators(one, 4).commutators.empty());
  }
  SUBCASE("truncation flag") {
    auto e = enumerate_commutators(three, 2, 4);
    CHECK(e.truncated);
    CHECK(e.commutators.size() == 4);
  }
  SUBCASE("no two returned words coincide up to inversion") {
    auto e = enumerate_commutators(three, 3, 2000);
    std::set<Word> seen;
    for (const auto& t : e.commutators) {
      CHECK_FALSE(t.word.empty());
      CHECK(seen.insert(t.word).second);
      CHECK(seen.count(t.word.inverse()) == (t.word == t.word.inverse() ? 1u : 0u));
    }
  }
}

TEST_CASE("check_identity") {
  SUBCASE("commuting translations") {
    auto gens = GeneratorSet::from_expressions({"x + 0.01", "x + 0.02"});
    auto r = check_identity(gens, commutator(Word::letter(0), Word::letter(1)));
    CHECK(r.verdict);
    CHECK(r.max_deviation < 1e-10);
    CHECK(r.sample_count == kDefaultIdentitySamples);
    CHECK(r.checked_interval.lo >= -1 + 10 * gens.epsilon() - 1e-15);
  }
  SUBCASE("non-commuting quadratic pair") {
    auto gens = GeneratorSet::from_expressions({"x + 0.003", "x + 0.003 + 0.0005*x*x"});
    Word c = commutator(Word::letter(0), Word::letter(1));
    CHECK(apply(gens, c, 0.5) - 0.5 == doctest::Approx(quadratic_pair_commutator(0.5) - 0.5).epsilon(1e-6));
    double oracle = 0;
    for (int k = 0; k <= 20000; ++k) {
      double x = -1 + 10 * gens.epsilon() + (2 - 20 * gens.epsilon()) * k / 20000.0;
      oracle = std::max(oracle, std::abs(quadratic_pair_commutator(x) - x));
    }
    auto r = check_identity(gens, c);
    CHECK_FALSE(r.verdict);
    CHECK(r.max_deviation == doctest::Approx(oracle).epsilon(1e-3));
    CHECK(r.max_deviation > 1e-6);
  }
  SUBCASE("empty word") {
    auto gens = GeneratorSet::from_expressions({"x + 0.01"});
    auto r = check_identity(gens, Word());
    CHECK(r.verdict);
    CHECK(r.max_deviation == 0.0);
  }
  SUBCASE("empty checked interval") {
    auto gens = GeneratorSet::from_expressions({"x + 0.6"});
    CHECK_THROWS_AS(check_identity(gens, Word::power(0, 5)), EmptyDomain);
  }
}

TEST_CASE("verify_near_identity_nilpotent") {
  auto commuting = GeneratorSet::from_expressions({"x + 0.001", "x + 0.0007"});
  auto r1 = verify_near_identity_nilpotent(commuting, 1);
  CHECK(r1.passed);
  CHECK(r1.epsilon == doctest::Approx(0.001).epsilon(1e-9));

  auto r2 = verify_near_identity_nilpotent(commuting, 2);
  CHECK_FALSE(r2.passed);
  CHECK_FALSE(r2.epsilon_ok);
  CHECK(r2.commutators_ok);
  CHECK(r2.failure.find("epsilon") != std::string::npos);

  auto quad = GeneratorSet::from_expressions({"x + 0.003", "x + 0.003 + 0.0005*x*x"});
  auto r3 = verify_near_identity_nilpotent(quad, 1);
  CHECK_FALSE(r3.passed);
  CHECK(r3.epsilon_ok);
  CHECK(r3.failure.find("f1^-1 f2^-1 f1 f2") != std::string::npos);
}

TEST_CASE("verify_abelian") {
  CHECK(verify_abelian(GeneratorSet::from_expressions({"x + 0.004", "x - 0.002", "x + 0.001"})).passed);
  // f_a ∘ f_b = f_{a+b} for x/(1 - a x).
  auto mob = GeneratorSet::from_expressions({mobius(0.003), mobius(0.005)});
  double x = 0.37;
  CHECK(apply(mob, Word::letter(0) * Word::letter(1), x) ==
        doctest::Approx(x / (1 - 0.008 * x)).epsilon(1e-14));
  CHECK(verify_abelian(mob).passed);
  auto mixed = GeneratorSet::from_expressions({"x + 0.003", mobius(0.003)});
  auto r = verify_abelian(mixed);
  CHECK_FALSE(r.passed);
  // Deviation at 0.5 by direct composition with closed-form inverses.
  auto t = [](double v) { return v + 0.003; };
  auto ti = [](double v) { return v - 0.003; };
  auto m = [](double v) { return v / (1 - 0.003 * v); };
  auto mi = [](double v) { return v / (1 + 0.003 * v); };
  double dev = std::abs(ti(mi(t(m(0.5)))) - 0.5);
  CHECK(dev > 1e-6);
  CHECK(r.checks.at(0).max_deviation >= dev * 0.99);
}

TEST_CASE("verify_metabelian") {
  CHECK(verify_metabelian(GeneratorSet::from_expressions({"x + 0.004", "x + 0.001"})).passed);
  CHECK(verify_metabelian(GeneratorSet::from_expressions({"x + 0.004"})).passed);
  auto r = verify_metabelian(GeneratorSet::from_expressions({mobius(0.002), mobius(0.001), mobius(-0.003)}));
  CHECK(r.passed);
  CHECK(r.checks.size() == 3);
  // Second-level commutators are fourth order in ε, so a tighter tolerance
  // is needed to see them. Inversion noise sits near 2e-12.
  auto two_commute = verify_metabelian(
      GeneratorSet::from_expressions({"x + 0.003", "x + 0.002", mobius(0.003)}), 1e-10);
  CHECK(two_commute.passed);
  auto bad = verify_metabelian(
      GeneratorSet::from_expressions({"x + 0.005", "x + 0.005*x*x", "x + 0.005*x*x*x"}), 1e-10);
  CHECK_FALSE(bad.passed);
  CHECK(bad.failure.find("f1^-1 f2^-1 f1 f2") != std::string::npos);
}

TEST_CASE("property: verdicts are invariant under smooth conjugation") {
  // h(x) = exp(x) - 1, h^-1(y) = log(1 + y); gens' = h^-1 ∘ f ∘ h.
  const Expression h = parse("exp(x) - 1");
  auto conjugate = [&](const std::string& f) {
    return print(substitute(parse("log(1 + x)"), substitute(parse(f), h)));
  };
  std::vector<std::vector<std::string>> families = {
      {"x + 0.002", "x + 0.001"},
      {mobius(0.002), mobius(0.001)},
      {"x + 0.002", mobius(0.002)},
      {"x + 0.002", "x + 0.002 + 0.0005*x*x"},
  };
  for (const auto& fam : families) {
    auto gens = GeneratorSet::from_expressions(fam);
    auto conj = GeneratorSet::from_expressions({conjugate(fam[0]), conjugate(fam[1])});
    auto a = verify_abelian(gens);
    auto b = verify_abelian(conj);
    CHECK(a.passed == b.passed);
    if (!a.passed) {
      double ratio = b.checks[0].max_deviation / a.checks[0].max_deviation;
      CHECK(ratio < 2.0 * std::exp(1.0));
      CHECK(ratio > 0.5 / std::exp(1.0));
    }
  }
}

TEST_CASE("property: order monotonicity") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    std::uniform_real_distribution<double> a(-0.003, 0.003);
    auto gens = GeneratorSet::from_expressions({mobius(a(rng)), mobius(a(rng)), mobius(a(rng))});
    auto m1 = verify_near_identity_nilpotent(gens, 1);
    REQUIRE(m1.commutators_ok);
    auto m2 = verify_near_identity_nilpotent(gens, 2, 3 * kDefaultIdentityTol, 512);
    CHECK(m2.commutators_ok);
  }
}
