#include <cmath>
#include <random>

#include "doctest.h"
#include "pseudogroup/errors.hpp"
#include "pseudogroup/linearize.hpp"
#include "pseudogroup/monotone.hpp"
#include "test_support.hpp"

using namespace pseudogroup;
using namespace pseudogroup::testing;

TEST_CASE("SampledMonotoneMap") {
  SUBCASE("exact slopes reproduce a cubic") {
    std::vector<double> t, v, d;
    for (int i = 0; i <= 10; ++i) {
      double x = i / 10.0;
      t.push_back(x);
      v.push_back(x + 0.1 * x * x * x);
      d.push_back(1 + 0.3 * x * x);
    }
    auto m = SampledMonotoneMap::hermite(t, v, d);
    for (double x : {0.0, 0.033, 0.5, 0.77, 1.0}) {
      CHECK(m(x) == doctest::Approx(x + 0.1 * x * x * x).epsilon(1e-14));
      CHECK(m.derivative(x) == doctest::Approx(1 + 0.3 * x * x).epsilon(1e-12));
      CHECK(m.inverse(m(x)) == doctest::Approx(x).epsilon(1e-14));
    }
    auto inv = m.inverted();
    CHECK(inv(m(0.42)) == doctest::Approx(0.42).epsilon(1e-6));
    CHECK_THROWS_AS(m(1.5), DomainError);
    CHECK_THROWS_AS(m.inverse(-0.1), DomainError);
  }
  SUBCASE("limiter keeps steps monotone") {
    std::vector<double> t{0, 1, 2, 3}, v{0, 0.01, 0.02, 3};
    auto m = SampledMonotoneMap::fritsch_carlson(t, v);
    double prev = -1;
    for (int i = 0; i <= 3000; ++i) {
      double y = m(i / 1000.0);
      CHECK(y >= prev);
      prev = y;
    }
  }
  SUBCASE("rejects non-increasing data") {
    CHECK_THROWS_AS(SampledMonotoneMap::fritsch_carlson({0, 1, 1}, {0, 1, 2}), NotIncreasing);
    CHECK_THROWS_AS(SampledMonotoneMap::fritsch_carlson({0, 1, 2}, {0, 1, 0.5}), NotIncreasing);
  }
}

TEST_CASE("linearize") {
  SUBCASE("translation with affine base: psi(x) = x / 0.04 at nodes") {
    auto gens = GeneratorSet::from_expressions({"x + 0.04"});
    auto lin = linearize(gens, Word::letter(0), 0.0, 16, 10);
    CHECK(lin.k_lo == -10);
    CHECK(lin.k_hi == 10);
    CHECK(lin.psi.domain().lo == doctest::Approx(-0.4));
    CHECK(lin.psi.domain().hi == doctest::Approx(0.4));
    for (std::size_t i = 0; i < lin.psi.size(); ++i) {
      CHECK(lin.psi.values()[i] == doctest::Approx(lin.psi.nodes()[i] / 0.04).epsilon(1e-10));
    }
    CHECK(lin.residual < 1e-8);
  }
  SUBCASE("Mobius map away from its fixed point") {
    // The map fixes 0, so the base point is moved to 0.5.
    auto gens = GeneratorSet::from_expressions({mobius(0.04)});
    auto lin = linearize(gens, Word::letter(0), 0.5, 64, 8);
    CHECK(lin.residual < 1e-6);
    // Direct evaluation oracle on a grid of I_8 that stays inside I_8 after f.
    double lo = lin.orbit_point(-8), hi = lin.orbit_point(7);
    double worst = 0;
    for (int i = 0; i <= 1000; ++i) {
      double x = lo + (hi - lo) * i / 1000.0;
      double fx = x / (1 - 0.04 * x);
      worst = std::max(worst, std::abs(lin.psi(fx) - lin.psi(x) - 1));
    }
    CHECK(worst < 1e-6);
    const auto& v = lin.psi.values();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) CHECK(v[i] < v[i + 1]);
    CHECK(lin.psi(0.5) == 0.0);
  }
  SUBCASE("errors") {
    auto gens = GeneratorSet::from_expressions({mobius(0.04), "x + 0.2"});
    CHECK_THROWS_AS(linearize(gens, Word::letter(0), 0.0), FixedPointInput);
    CHECK_THROWS_AS(linearize(gens, Word::letter(0, -1), 0.5), FixedPointInput);
    CHECK_THROWS_AS(linearize(gens, Word::letter(1), 0.0, 8, 10), OutOfDomain);
    CHECK_THROWS_AS(linearize(gens, Word::letter(1), 0.0, 8, 11), Error);
  }
  SUBCASE("full-domain variant reaches the ends of (-1,1)") {
    auto gens = GeneratorSet::from_expressions({"x + 0.02"});
    auto lin = linearize_domain(gens, Word::letter(0), 0.0, 8);
    CHECK(lin.k_hi == 49);
    CHECK(lin.k_lo == -49);
    CHECK(lin.psi.domain().hi > 0.99);
    CHECK(lin.psi.domain().lo < -0.99);
    CHECK(lin.psi(0.5) == doctest::Approx(25.0).epsilon(1e-12));
  }
}

TEST_CASE("property: linearization residual on random maps") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    auto gens = GeneratorSet::from_expressions({random_near_identity(rng)});
    Word f = Word::letter(0);
    if (apply(gens, f, 0.0) < 0.0) f = f.inverse();
    if (std::abs(apply(gens, f, 0.0)) < 1e-4) continue;
    auto lin = linearize(gens, f, 0.0, 64, 8);
    CHECK(lin.residual < 1e-6);
    // ψ' matches the functional equation ψ'(f(x)) f'(x) = ψ'(x) at orbit points.
    for (int j = -7; j < 7; ++j) {
      double x = lin.orbit_point(j);
      auto jet = eval_word_jet(gens, f, x);
      CHECK(lin.psi.derivative(jet.value) * jet.derivative ==
            doctest::Approx(lin.psi.derivative(x)).epsilon(1e-8));
    }
  }
}
