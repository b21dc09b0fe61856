#include <cmath>
#include <random>

#include "doctest.h"
#include "pseudogroup/errors.hpp"
#include "pseudogroup/pmap.hpp"
#include "test_support.hpp"

using namespace pseudogroup;
using namespace pseudogroup::testing;

namespace {

Word w(std::initializer_list<std::pair<int, int>> letters) {
  std::vector<Letter> out;
  for (auto [g, s] : letters) out.push_back(Letter{g, s});
  return Word(out);
}

}  // namespace

TEST_CASE("eval_word applies letters right to left with the domain convention") {
  auto gens = GeneratorSet::from_expressions({"x + 0.01", "x + 0.02"});
  SUBCASE("final value may leave (-1,1)") {
    auto r = eval_word(gens, Word::letter(0), 0.995);
    REQUIRE(r.ok());
    CHECK(r.value == doctest::Approx(1.005).epsilon(1e-15));
  }
  SUBCASE("translations commute") {
    Word c = w({{0, -1}, {1, -1}, {0, 1}, {1, 1}});
    CHECK(std::abs(apply(gens, c, 0.0)) < 1e-12);
  }
  SUBCASE("input outside (-1,1) fails at the letter") {
    auto r = eval_word(gens, Word::letter(0), 1.5);
    CHECK_FALSE(r.ok());
    CHECK(r.failed_letter == 0);
    CHECK_THROWS_AS(apply(gens, Word::letter(0), 1.5), OutOfDomain);
  }
  SUBCASE("order of application") {
    auto g2 = GeneratorSet::from_expressions({"1.5*x", "x + 0.1"});
    // f1 f2 (x) = 1.5 (x + 0.1)
    CHECK(apply(g2, w({{0, 1}, {1, 1}}), 0.2) == doctest::Approx(0.45));
    // f2 f1 at 0.7: the outer letter (index 0) receives 1.05.
    auto r = eval_word(g2, w({{1, 1}, {0, 1}}), 0.7);
    CHECK(r.failed_letter == 0);
  }
  SUBCASE("inverse letter needs its input inside the image") {
    auto g = GeneratorSet::from_expressions({"x + 0.01"});
    auto r = eval_word(g, Word::letter(0, -1), -0.995);
    CHECK(r.failed_letter == 0);
    CHECK(apply(g, Word::letter(0, -1), -0.98) == doctest::Approx(-0.99));
  }
}

TEST_CASE("invert_generator") {
  auto gens = GeneratorSet::from_expressions(
      {"x + 0.01", "x/(1 - 0.02*x)", "x + 0.005 + 0.004*x*x"});
  CHECK(invert_generator(gens[0], 0.5) == doctest::Approx(0.49).epsilon(1e-14));
  CHECK(std::abs(invert_generator(gens[1], 0.0)) < 1e-12);
  // Oracle: forward evaluation of the returned preimage.
  double x = invert_generator(gens[2], 0.2);
  CHECK(std::abs(gens[2](x) - 0.2) < 1e-12);
  // Closed form root of 0.004 x² + x - 0.195 = 0 as a second oracle.
  double root = (-1 + std::sqrt(1 + 4 * 0.004 * 0.195)) / (2 * 0.004);
  CHECK(std::abs(x - root) < 1e-12);
  CHECK_THROWS_AS(invert_generator(gens[0], -0.995), NotInRange);
  CHECK_THROWS_AS(invert_generator(gens[0], 1.2), NotInRange);
}

TEST_CASE("word_domain") {
  auto gens = GeneratorSet::from_expressions({"x + 0.01", "x + 0.003 + 0.002*x*x"});
  SUBCASE("empty word is the whole interval") {
    Interval d = word_domain(gens, Word());
    CHECK(d.lo == -1.0);
    CHECK(d.hi == 1.0);
  }
  SUBCASE("f1 f1 f1: intermediate constraints bind, final output is free") {
    // Dense-scan oracle written directly in the arithmetic of the translation:
    // inputs x, x + 0.01, x + 0.02 must all lie in (-1,1).
    double oracle_hi = -1;
    for (double x = -1 + 1e-4; x < 1; x += 1e-4) {
      bool ok = x > -1 && x < 1 && x + 0.01 < 1 && x + 0.02 < 1;
      if (ok) oracle_hi = x;
    }
    Interval d = word_domain(gens, Word::power(0, 3));
    CHECK(d.lo == -1.0);
    CHECK(std::abs(d.hi - oracle_hi) < 1.01e-4);
    CHECK(std::abs(d.hi - 0.98) < 1e-8);
  }
  SUBCASE("commutator domain contains (-0.96, 0.96)") {
    Interval d = word_domain(gens, commutator(Word::letter(0), Word::letter(1)));
    CHECK(d.lo <= -0.96);
    CHECK(d.hi >= 0.96);
  }
  SUBCASE("nowhere-defined word") {
    auto big = GeneratorSet::from_expressions({"x + 0.6"});
    CHECK(word_domain(big, Word::power(0, 5)).is_empty());
    Interval d4 = word_domain(big, Word::power(0, 4));
    CHECK(std::abs(d4.hi + 0.8) < 1e-8);
  }
}

TEST_CASE("commutator and free reduction") {
  Word f1 = Word::letter(0), f2 = Word::letter(1);
  CHECK(commutator(f1, f2) == w({{0, -1}, {1, -1}, {0, 1}, {1, 1}}));
  CHECK(commutator(f1 * f2, f1 * f2).empty());
  CHECK(commutator(Word(), f1 * f2.inverse()).empty());
  CHECK((f1 * f1.inverse()).empty());
  CHECK(commutator(f2, f1) == commutator(f1, f2).inverse());
  CHECK(Word::power(0, -2) == f1.inverse() * f1.inverse());
  CHECK(Word::power(0, 3).pow(-1) == Word::power(0, -3));
}

TEST_CASE("word text form") {
  auto gens = GeneratorSet::from_expressions({"x + 0.01", "x + 0.02"});
  Word c = commutator(Word::letter(0), Word::letter(1));
  CHECK(to_string(c, gens) == "f1^-1 f2^-1 f1 f2");
  CHECK(parse_word("f1^-1 f2^-1 f1 f2", gens) == c);
  CHECK(parse_word("f1^3 f1^-2", gens) == Word::letter(0));
  CHECK(parse_word("id", gens).empty());
  CHECK(to_string(Word(), gens) == "id");
  CHECK_THROWS_AS(parse_word("f3", gens), Error);
  CHECK_THROWS_AS(parse_word("f1^x", gens), Error);
}

TEST_CASE("c1_distance") {
  CHECK(c1_distance(Generator::parse("id", "x"), 1000) == 0.0);
  CHECK(c1_distance(Generator::parse("t", "x + 0.003"), 1000) == doctest::Approx(0.003).epsilon(1e-12));
  // Analytic maximum of max(|0.002 + 0.001 x²|, |0.002 x|) is 0.003 at x -> ±1;
  // the grid stops at the inset, so the estimate is 0.003 - O(inset).
  double d = c1_distance(Generator::parse("q", "x + 0.002 + 0.001*x*x"), 1000);
  CHECK(d <= 0.003);
  CHECK(d > 0.003 - 1e-8);
  CHECK_THROWS_AS(Generator::parse("dec", "0.5 - x"), NotIncreasing);
}

TEST_CASE("property: words are increasing where defined") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto gens = GeneratorSet::from_expressions(
        {random_near_identity(rng), random_near_identity(rng), random_near_identity(rng)});
    std::uniform_int_distribution<int> len(1, 12), gen(0, 2), sgn(0, 1);
    std::vector<Letter> letters;
    int n = len(rng);
    for (int i = 0; i < n; ++i) letters.push_back(Letter{gen(rng), sgn(rng) ? 1 : -1});
    Word word(letters);
    Interval dom = word_domain(gens, word);
    REQUIRE_FALSE(dom.is_empty());
    std::uniform_real_distribution<double> u(dom.lo + 1e-6, dom.hi - 1e-6);
    for (int k = 0; k < 50; ++k) {
      double x = u(rng), y = u(rng);
      if (x > y) std::swap(x, y);
      if (y - x < 1e-9) continue;
      CHECK(apply(gens, word, x) < apply(gens, word, y));
    }
    // Inversion consistency: w^-1(w(x)) = x within 10·tol.
    Word inv = word.inverse();
    for (int k = 0; k < 50; ++k) {
      double x = u(rng);
      double y = apply(gens, word, x);
      auto back = eval_word(gens, inv, y);
      if (!back.ok()) continue;
      CHECK(std::abs(back.value - x) < 10 * kDefaultInversionTol * (1 + n));
    }
  }
}

TEST_CASE("property: free reduction preserves values") {
  std::mt19937 rng(5);
  auto gens = GeneratorSet::from_expressions({random_near_identity(rng), random_near_identity(rng)});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Letter> letters;
    std::uniform_int_distribution<int> gen(0, 1), sgn(0, 1);
    for (int i = 0; i < 10; ++i) letters.push_back(Letter{gen(rng), sgn(rng) ? 1 : -1});
    // Evaluate the unreduced sequence letter by letter.
    double x = 0.3, v = x;
    bool ok = true;
    for (auto it = letters.rbegin(); it != letters.rend() && ok; ++it) {
      auto r = eval_word(gens, Word::letter(it->generator, it->sign), v);
      ok = r.ok();
      v = r.value;
    }
    if (!ok) continue;
    CHECK(apply(gens, Word(letters), x) == doctest::Approx(v).epsilon(1e-11));
  }
}

TEST_CASE("property: interval geometry for canonical pairs") {
  std::mt19937 rng(3);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto gens = GeneratorSet::from_expressions({random_near_identity(rng), random_near_identity(rng)});
    REQUIRE(gens.epsilon() < 0.01);
    const double x0 = 0.0;
    Word f1, f2;
    if (!canonical_pair(gens, x0, f1, f2)) continue;
    ++checked;
    auto iter = [&](int k) { return apply(gens, f1.pow(k), x0); };
    const double delta = iter(1) - x0;
    const double eps = gens.epsilon();
    // Growth bounds on consecutive orbit gaps.
    for (int k = -10; k < 10; ++k) {
      double gap = iter(k + 1) - iter(k);
      CHECK(gap > delta * std::pow(1 - eps, std::abs(k) + 1) - 1e-15);
      CHECK(gap < delta * std::pow(1 + eps, std::abs(k) + 1) + 1e-15);
    }
    // f2(I_k) and f2^-1(I_k) inside I_{k+2}.
    for (int k = 1; k <= 8; ++k) {
      for (const Word& g : {f2, f2.inverse()}) {
        CHECK(apply(gens, g, iter(k)) <= iter(k + 2) + 1e-9);
        CHECK(apply(gens, g, iter(-k)) >= iter(-k - 2) - 1e-9);
      }
    }
    Word g = commutator(f1, f2);
    for (int k = 1; k < 6; ++k) {
      for (const Word& h : {g, g.inverse()}) {
        CHECK(apply(gens, h, iter(k)) <= iter(k + 4) + 1e-9);
        CHECK(apply(gens, h, iter(-k)) >= iter(-k - 4) - 1e-9);
      }
    }
  }
  CHECK(checked >= 8);
}
