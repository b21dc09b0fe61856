#include "pseudogroup/nilpotency.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "pseudogroup/errors.hpp"
#include "pseudogroup/parallel.hpp"

namespace pseudogroup {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Word canonical(const Word& w) {
  Word inv = w.inverse();
  return inv < w ? inv : w;
}

}  // namespace

std::vector<Word> order_one_commutators(std::size_t n_generators) {
  std::vector<Word> out;
  for (std::size_t i = 0; i < n_generators; ++i) {
    for (std::size_t j = i + 1; j < n_generators; ++j) {
      out.push_back(commutator(Word::letter(static_cast<int>(i)),
                               Word::letter(static_cast<int>(j))));
    }
  }
  return out;
}

CommutatorEnumeration enumerate_commutators(const GeneratorSet& gens, int m, int max_count) {
  if (m < 1) throw Error("commutator order must be >= 1");
  CommutatorEnumeration result;
  const int n = static_cast<int>(gens.size());
  std::vector<std::vector<std::shared_ptr<const CommutatorTree>>> levels(
      static_cast<std::size_t>(m) + 1);

  auto add = [&](int order, CommutatorTree node, std::set<Word>& seen) {
    if (node.word.empty()) return;
    if (!seen.insert(canonical(node.word)).second) return;
    auto& level = levels[static_cast<std::size_t>(order)];
    if (static_cast<int>(level.size()) >= max_count) {
      result.truncated = true;
      return;
    }
    level.push_back(std::make_shared<const CommutatorTree>(std::move(node)));
  };

  {
    std::set<Word> seen;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        CommutatorTree node;
        node.word = commutator(Word::letter(i), Word::letter(j));
        node.order = 1;
        node.left_generator = i;
        node.right_generator = j;
        add(1, std::move(node), seen);
      }
    }
  }

  for (int order = 2; order <= m; ++order) {
    std::set<Word> seen;
    for (const auto& right : levels[static_cast<std::size_t>(order) - 1]) {
      for (int i = 0; i < n; ++i) {
        CommutatorTree node;
        node.word = commutator(Word::letter(i), right->word);
        node.order = order;
        node.left_generator = i;
        node.right = right;
        add(order, std::move(node), seen);
      }
      for (int lower = 1; lower < order; ++lower) {
        for (const auto& left : levels[static_cast<std::size_t>(lower)]) {
          CommutatorTree node;
          node.word = commutator(left->word, right->word);
          node.order = order;
          node.left = left;
          node.right = right;
          add(order, std::move(node), seen);
        }
      }
    }
  }

  for (const auto& c : levels[static_cast<std::size_t>(m)]) result.commutators.push_back(*c);
  return result;
}

IdentityCheckReport check_identity(const GeneratorSet& gens, const Word& w, double tol,
                                   int n_samples) {
  if (!(tol > 0.0)) throw Error("identity tolerance must be positive");
  if (n_samples < 1) throw Error("identity check needs at least one sample");
  IdentityCheckReport report;
  report.word = w;
  report.label = to_string(w, gens);
  report.tol = tol;
  const double eps = gens.epsilon();
  const Interval clip{-1.0 + 10.0 * eps, 1.0 - 10.0 * eps};
  if (w.empty()) {
    report.checked_interval = clip;
    return report;
  }
  report.checked_interval = word_domain(gens, w).intersect(clip);
  if (report.checked_interval.is_empty()) {
    throw EmptyDomain("no common domain to compare " + report.label + " with the identity");
  }
  const Interval& iv = report.checked_interval;
  struct Sample {
    double x = 0.0;
    double deviation = -1.0;  // negative when the word was undefined there
  };
  auto samples = parallel_map(static_cast<std::size_t>(n_samples), [&](std::size_t k) {
    Sample s;
    s.x = iv.lo + (iv.hi - iv.lo) * (static_cast<double>(k) + 1.0) / (n_samples + 1.0);
    WordValue r = eval_word(gens, w, s.x);
    if (r.ok()) s.deviation = std::abs(r.value - s.x);
    return s;
  });
  for (const Sample& s : samples) {
    if (s.deviation < 0.0) continue;
    ++report.sample_count;
    if (s.deviation > report.max_deviation) {
      report.max_deviation = s.deviation;
      report.worst_x = s.x;
    }
  }
  report.verdict = report.sample_count > 0 && report.max_deviation < tol;
  return report;
}

VerificationReport verify_near_identity_nilpotent(const GeneratorSet& gens, int m, double tol,
                                                  int n_samples, int max_count) {
  if (m < 1) throw Error("nilpotency order must be >= 1");
  VerificationReport report;
  report.property = "nilpotent";
  report.order = m;
  report.epsilon = gens.epsilon();
  report.c1_samples = gens.c1_samples();
  report.epsilon_bound = std::pow(10.0, -(m + 1));
  report.epsilon_ok = report.epsilon < report.epsilon_bound;

  CommutatorEnumeration commutators = enumerate_commutators(gens, m, max_count);
  report.truncated = commutators.truncated;
  for (const CommutatorTree& c : commutators.commutators) {
    IdentityCheckReport check = check_identity(gens, c.word, tol, n_samples);
    check.order = c.order;
    if (!check.verdict && report.commutators_ok) {
      report.commutators_ok = false;
      report.failure = "commutator " + check.label + " deviates from the identity by " +
                       num(check.max_deviation);
    }
    report.checks.push_back(std::move(check));
  }
  if (!report.epsilon_ok) {
    std::string eps_failure = "epsilon " + num(report.epsilon) +
                              " violates epsilon < 1/10^" + std::to_string(m + 1);
    report.failure = report.failure.empty() ? eps_failure : eps_failure + "; " + report.failure;
  }
  report.passed = report.epsilon_ok && report.commutators_ok;
  return report;
}

VerificationReport verify_abelian(const GeneratorSet& gens, double tol, int n_samples) {
  VerificationReport report = verify_near_identity_nilpotent(gens, 1, tol, n_samples);
  report.property = "abelian";
  report.passed = report.commutators_ok;
  if (report.passed) report.failure.clear();
  return report;
}

VerificationReport verify_metabelian(const GeneratorSet& gens, double tol, int n_samples) {
  VerificationReport report;
  report.property = "metabelian";
  report.order = 1;
  report.epsilon = gens.epsilon();
  report.c1_samples = gens.c1_samples();
  report.epsilon_bound = 0.01;
  report.epsilon_ok = report.epsilon < report.epsilon_bound;

  std::vector<Word> firsts;
  for (const Word& c : order_one_commutators(gens.size())) {
    if (!c.empty()) firsts.push_back(c);
  }
  for (std::size_t a = 0; a < firsts.size(); ++a) {
    for (std::size_t b = a + 1; b < firsts.size(); ++b) {
      IdentityCheckReport check = check_identity(gens, commutator(firsts[a], firsts[b]), tol,
                                                 n_samples);
      check.order = 2;
      if (!check.verdict && report.commutators_ok) {
        report.commutators_ok = false;
        report.failure = "commutators " + to_string(firsts[a], gens) + " and " +
                         to_string(firsts[b], gens) + " do not commute (deviation " +
                         num(check.max_deviation) + ")";
      }
      report.checks.push_back(std::move(check));
    }
  }
  report.passed = report.commutators_ok;
  return report;
}

}  // namespace pseudogroup
