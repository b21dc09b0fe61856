// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pseudogroup/classify.hpp"
#include "pseudogroup/cli.hpp"
#include "pseudogroup/nilpotency.hpp"
#include "pseudogroup/pmap.hpp"
#include "pseudogroup/rotation.hpp"
#include "test_support.hpp"

#ifndef PSEUDOGROUP_SOURCE_DIR
#define PSEUDOGROUP_SOURCE_DIR "."
#endif

using namespace pseudogroup;
using namespace pseudogroup::testing;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

cli::Config load(const char* name) {
  auto c = cli::load_config(std::filesystem::path(PSEUDOGROUP_SOURCE_DIR) / "configs" / name);
  c.output_dir = (std::filesystem::temp_directory_path() / "pseudogroup-acceptance").string();
  return c;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome criterion1() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  auto gens = GeneratorSet::from_expressions({"x + 0.001", "x + 0.0007"});
  auto m1 = verify_near_identity_nilpotent(gens, 1);
  auto m2 = verify_near_identity_nilpotent(gens, 2);
  o.require(m1.passed, "m = 1 failed: " + m1.failure);
  o.require(!m2.passed, "m = 2 passed");
  o.require(m2.commutators_ok && !m2.epsilon_ok, "m = 2 did not fail on the epsilon test alone");
  double t = elapsed(t0);
  o.require(t < 1.0, "runtime " + fmt6(t) + " s");
  if (o.ok) o.detail = "eps = " + fmt6(gens.epsilon()) + ", m=2 bound " + fmt6(m2.epsilon_bound) + ", " + fmt6(t) + " s";
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(2024);
  double worst_lo = -1.0, worst_hi = 1.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto gens = GeneratorSet::from_expressions({random_near_identity(rng), random_near_identity(rng)});
    o.require(gens.epsilon() < 0.01, "trial " + std::to_string(trial) + " has eps >= 1/100");
    Interval d = word_domain(gens, commutator(Word::letter(0), Word::letter(1)));
    worst_lo = std::max(worst_lo, d.lo);
    worst_hi = std::min(worst_hi, d.hi);
    o.require(d.lo <= -0.96 && d.hi >= 0.96,
              "trial " + std::to_string(trial) + ": domain (" + fmt6(d.lo) + ", " + fmt6(d.hi) + ")");
  }
  double t = elapsed(t0);
  o.require(t < 10.0, "runtime " + fmt6(t) + " s");
  if (o.ok) o.detail = "20 pairs, tightest domain (" + fmt6(worst_lo) + ", " + fmt6(worst_hi) + "), " + fmt6(t) + " s";
  return o;
}

Outcome criterion3() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::mt19937 rng(3);
  int checked = 0;
  while (checked < 10) {
    auto gens = GeneratorSet::from_expressions({random_near_identity(rng), random_near_identity(rng)});
    const double x0 = 0.0;
    Word f1, f2;
    if (gens.epsilon() >= 0.01 || !canonical_pair(gens, x0, f1, f2)) continue;
    ++checked;
    auto iter = [&](int k) { return apply(gens, f1.pow(k), x0); };
    const std::string tag = "pair " + std::to_string(checked);
    for (int k = 1; k <= 8; ++k) {
      o.require(apply(gens, f2, iter(k)) <= iter(k + 2) + 1e-9 && apply(gens, f2, iter(-k)) >= iter(-k - 2) - 1e-9,
                tag + ": f2(I_" + std::to_string(k) + ") not inside I_" + std::to_string(k + 2));
    }
    Word g = commutator(f1, f2);
    for (int k = 1; k < 6; ++k) {
      o.require(apply(gens, g, iter(k)) <= iter(k + 4) + 1e-9 && apply(gens, g, iter(-k)) >= iter(-k - 4) - 1e-9,
                tag + ": [f1,f2](I_" + std::to_string(k) + ") not inside I_" + std::to_string(k + 4));
    }
  }
  double t = elapsed(t0);
  o.require(t < 10.0, "runtime " + fmt6(t) + " s");
  if (o.ok) o.detail = "10 pairs, " + fmt6(t) + " s";
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  const int n = 10000;
  for (double alpha : {0.25, (std::sqrt(5.0) - 1.0) / 2.0, 0.137}) {
    auto est = rotation_number(DegreeOneMap([alpha](double x) { return x + alpha; }), n);
    o.require(std::abs(est.value - alpha) <= 1.0 / n, "alpha = " + fmt6(alpha) + ": estimate " + fmt6(est.value));
  }
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> c(-2.0, 2.0), b(-0.9, 0.9);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    double cc = c(rng), bb = b(rng);
    DegreeOneMap u([cc, bb](double x) {
      return x + cc + bb * std::sin(2 * std::numbers::pi * x) / (2 * std::numbers::pi);
    });
    try {
      auto est = rotation_number(u, n);
      worst = std::max(worst, std::abs(est.value - est.cross_check));
    } catch (const EstimatorMismatch& e) {
      o.require(false, e.what());
    }
  }
  o.require(worst <= 2.0 / n, "estimators differ by " + fmt6(worst));
  double t = elapsed(t0);
  o.require(t < 5.0, "runtime " + fmt6(t) + " s");
  if (o.ok) o.detail = "max estimator gap " + fmt6(worst) + ", " + fmt6(t) + " s";
  return o;
}

Outcome criterion5() {
  Outcome o;
  const int n = 10000;
  TauOptions opt;
  opt.n_iters = n;
  for (auto [t1, t2] : std::vector<std::pair<double, double>>{{0.04, 0.01}, {0.02, 0.013}, {0.01, 0.007}, {0.005, 0.0031}}) {
    auto gens = GeneratorSet::from_expressions({translation(t1), translation(t2)});
    double v = relative_translation_number(gens, Word::letter(0), Word::letter(1), 0.0, opt).value;
    o.require(std::abs(v - t2 / t1) <= 2e-4, "translations " + fmt6(t1) + ", " + fmt6(t2) + ": " + fmt6(v));
  }
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> amount(0.002, 0.009), base(-0.5, 0.5);
  double worst_rec = 0.0, worst_neg = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    double a1 = amount(rng), a2 = amount(rng), x0 = base(rng);
    auto gens = GeneratorSet::from_expressions({"log(exp(x) + " + fmt(a1) + ")", "log(exp(x) + " + fmt(a2) + ")"});
    Word f1 = Word::letter(0), f2 = Word::letter(1);
    double t21 = relative_translation_number(gens, f1, f2, x0, opt).value;
    double t12 = relative_translation_number(gens, f2, f1, x0, opt).value;
    double neg = relative_translation_number(gens, f1, f2.inverse(), x0, opt).value;
    double rec = std::abs(t21 - 1.0 / t12);
    worst_rec = std::max(worst_rec, rec);
    worst_neg = std::max(worst_neg, std::abs(t21 + neg));
  }
  o.require(worst_rec <= 3.0 / n, "reciprocal identity off by " + fmt6(worst_rec));
  o.require(worst_neg <= 3.0 / n, "negation identity off by " + fmt6(worst_neg));
  if (o.ok) o.detail = "reciprocal " + fmt6(worst_rec) + ", negation " + fmt6(worst_neg);
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto gens = GeneratorSet::from_expressions({mobius(0.003), mobius(0.005)});
  TauOptions opt;
  opt.n_iters = 10000;
  double lo = 1e9, hi = -1e9;
  for (double x0 : {0.1, 0.25, 0.4, 0.6, 0.8}) {
    double v = relative_translation_number(gens, Word::letter(1), Word::letter(0), x0, opt).value;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  o.require(hi - lo <= 2e-4, "spread " + fmt6(hi - lo));
  if (o.ok) o.detail = "tau in [" + fmt6(lo) + ", " + fmt6(hi) + "], spread " + fmt6(hi - lo);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const char* files[] = {"mobius.json", "golden.json", "integer_ratio.json"};
  int expected = 1;
  std::string detail;
  for (const char* f : files) {
    cli::Config c = load(f);
    std::ostringstream out, err;
    int code = cli::cmd_classify(c, out, err);
    o.require(code == cli::kExitOk, std::string(f) + ": exit " + std::to_string(code) + " " + err.str());
    GeneratorSet gens = cli::build_generators(c);
    auto rep = classify(gens, cli::classify_options(c));
    o.require(rep.case_id == expected, std::string(f) + ": case " + std::to_string(rep.case_id));
    if (expected == 2 && rep.case2) {
      o.require(rep.case2->conjugacy.residual_samples >= 1000, "case 2 sampled fewer than 10^3 points");
      o.require(rep.case2->conjugacy.residual < 1e-6, "case 2 residual " + fmt6(rep.case2->conjugacy.residual));
      detail += "case-2 residual " + fmt6(rep.case2->conjugacy.residual) + "; ";
    }
    if (expected == 3 && rep.case3) {
      const auto& ch = rep.case3->chain;
      double worst = 0.0;
      for (std::size_t i = 0; i < gens.size(); ++i) {
        int ai = static_cast<int>(ch.a[i]);
        for (int k = -ch.N; k <= ch.N; ++k) {
          if (k + ai < -ch.N || k + ai > ch.N) continue;
          worst = std::max(worst, std::abs(apply(gens, Word::letter(static_cast<int>(i)), ch.at(k)) - ch.at(k + ai)));
        }
      }
      o.require(worst <= 1e-9, "case 3 chain defect " + fmt6(worst));
      detail += "case-3 defect " + fmt6(worst) + ", N = " + std::to_string(ch.N);
    }
    ++expected;
  }
  if (o.ok) o.detail = "cases 1, 2, 3; " + detail;
  return o;
}

Outcome criterion8() {
  Outcome o;
  Expression f = parse("x + 0.002 + 0.001*x*x");
  Expression f2 = substitute(f, f), f3 = substitute(f, f2);
  std::vector<std::vector<std::string>> corpus = {
      {"x + 0.001", "x + 0.0007"},
      {"x + 0.004", "x + 0.003"},
      {"x + 0.002", "x + 0.003", "x + 0.005"},
      {mobius(0.002), mobius(0.004)},
      {mobius(0.001), mobius(0.002), mobius(0.0035)},
      {print(f), print(f2)},
      {print(f), print(f2), print(f3)},
      {"log(exp(x) + 0.002)", "log(exp(x) + 0.003)"},
      {"log(exp(x) + 0.001)", "log(exp(x) + 0.0025)"},
      {"0.5*log(exp(2*x) + 0.002)", "0.5*log(exp(2*x) + 0.0013)"},
      {"x + 0.004*x*x"},
      {"x + 0.004", "x + 0.004*x*x"},  // does not commute; excluded by the gate
  };
  int passing = 0, classified = 0;
  for (const auto& exprs : corpus) {
    auto gens = GeneratorSet::from_expressions(exprs);
    if (!verify_near_identity_nilpotent(gens, 1).passed) continue;
    ++passing;
    std::string tag = exprs.front() + (exprs.size() > 1 ? ", ..." : "");
    o.require(verify_metabelian(gens).passed, tag + ": not metabelian");
    auto rep = classify(gens);
    if (rep.case_id == 1 || rep.case_id == 2) {
      ++classified;
      o.require(rep.abelian.passed, tag + ": case " + std::to_string(rep.case_id) + " but not abelian");
    }
  }
  o.require(passing >= 10, "only " + std::to_string(passing) + " families pass the gate");
  if (o.ok) {
    o.detail = std::to_string(passing) + " passing families metabelian; " + std::to_string(classified) +
               " in cases 1-2 abelian";
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  cli::Config c = load("integer_ratio.json");
  GeneratorSet gens = cli::build_generators(c);
  auto rep = classify(gens, cli::classify_options(c));
  o.require(rep.case3.has_value(), "integer-ratio family did not reach case 3");
  if (!rep.case3) return o;
  const auto& ch = rep.case3->chain;
  const auto& st = rep.case3->stabilizer;
  double worst = 0.0;
  for (const Word& w : st.reduced) {
    worst = std::max(worst, std::abs(apply(gens, w, ch.at(0)) - ch.at(0)));
    worst = std::max(worst, std::abs(apply(gens, w, ch.at(1)) - ch.at(1)));
  }
  const std::size_t n = gens.size();
  o.require(worst <= 1e-9, "reduced words move y0 or y1 by " + fmt6(worst));
  o.require(st.all().size() == n * (n - 1) / 2 + n - 1, "output count " + std::to_string(st.all().size()));
  if (o.ok) {
    o.detail = to_string(st.reduced.front(), gens) + ", defect " + fmt6(worst) + ", count " +
               std::to_string(st.all().size());
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  cli::Config c = load("noncommuting.json");
  GeneratorSet gens = cli::build_generators(c);
  auto rep = verify_near_identity_nilpotent(gens, 1);
  double dev = 0.0;
  for (const auto& ch : rep.checks) dev = std::max(dev, ch.max_deviation);
  o.require(!rep.passed, "verify passed");
  o.require(dev >= 1e-6, "reported deviation " + fmt6(dev));
  std::ostringstream out, err;
  int code = cli::cmd_classify(c, out, err);
  o.require(code == cli::kExitHypothesis, "classify exit " + std::to_string(code));
  if (o.ok) o.detail = "deviation " + fmt6(dev) + ", classify exit 2";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu: %s\n", o.ok ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
