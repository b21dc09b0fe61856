#include "pseudogroup/pmap.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "pseudogroup/errors.hpp"
#include "pseudogroup/parallel.hpp"

namespace pseudogroup {

double c1_distance(const Expression& f, const Expression& df, int n_samples) {
  if (n_samples < 2) throw Error("c1_distance needs at least 2 samples");
  const double lo = -1.0 + kEndpointInset;
  const double hi = 1.0 - kEndpointInset;
  auto dist = parallel_map(static_cast<std::size_t>(n_samples), [&](std::size_t k) {
    double x = lo + (hi - lo) * static_cast<double>(k) / (n_samples - 1);
    return std::max(std::abs(evaluate(f, x) - x), std::abs(evaluate(df, x) - 1.0));
  });
  return *std::max_element(dist.begin(), dist.end());
}

double c1_distance(const Generator& g, int n_samples) {
  return c1_distance(g.f(), g.df(), n_samples);
}

Generator::Generator(std::string name, Expression f, int c1_samples)
    : name_(std::move(name)), f_(std::move(f)), df_(differentiate(f_)) {
  const double lo = -1.0 + kEndpointInset;
  const double hi = 1.0 - kEndpointInset;
  for (int k = 0; k < c1_samples; ++k) {
    double x = lo + (hi - lo) * k / (c1_samples - 1);
    if (!(evaluate(df_, x) > 0.0)) {
      throw NotIncreasing("generator " + name_ + " is not increasing near x = " +
                          std::to_string(x));
    }
  }
  c1_ = pseudogroup::c1_distance(f_, df_, c1_samples);
  if (!(c1_ < 1.0)) {
    throw Error("generator " + name_ + " is too far from the identity (C1 distance " +
                std::to_string(c1_) + ")");
  }
  range_ = Interval{evaluate(f_, lo), evaluate(f_, hi)};
}

Generator Generator::parse(std::string name, std::string_view text, int c1_samples) {
  return Generator(std::move(name), pseudogroup::parse(text), c1_samples);
}

double invert_generator(const Generator& g, double y, double tol) {
  if (!(tol > 0.0)) throw Error("inversion tolerance must be positive");
  if (!g.range().contains(y)) {
    throw NotInRange("value " + std::to_string(y) + " is outside the image of " + g.name());
  }
  const double target = tol * (1.0 - g.c1_distance());
  double lo = -1.0 + kEndpointInset;
  double hi = 1.0 - kEndpointInset;
  double x = std::clamp(y, lo, hi);
  double best = x;
  double best_res = INFINITY;
  for (int iter = 0; iter < 200; ++iter) {
    const double r = g(x) - y;
    if (std::abs(r) < best_res) {
      best_res = std::abs(r);
      best = x;
    }
    if (std::abs(r) < target) return x;
    if (r > 0.0) {
      hi = x;
    } else {
      lo = x;
    }
    const double d = g.derivative(x);
    double next = d > 0.0 ? x - r / d : lo;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) break;
    x = next;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Words

Word::Word(std::vector<Letter> letters) {
  letters_.reserve(letters.size());
  for (const Letter& l : letters) {
    if (l.sign != 1 && l.sign != -1) throw Error("letter sign must be +1 or -1");
    if (!letters_.empty() && letters_.back().generator == l.generator &&
        letters_.back().sign == -l.sign) {
      letters_.pop_back();
    } else {
      letters_.push_back(l);
    }
  }
}

Word Word::letter(int generator, int sign) { return Word({Letter{generator, sign}}); }

Word Word::power(int generator, int k) {
  return Word(std::vector<Letter>(static_cast<std::size_t>(std::abs(k)),
                                  Letter{generator, k < 0 ? -1 : 1}));
}

Word Word::inverse() const {
  std::vector<Letter> out(letters_.rbegin(), letters_.rend());
  for (Letter& l : out) l.sign = -l.sign;
  return Word(std::move(out));
}

Word Word::pow(int k) const {
  Word base = k < 0 ? inverse() : *this;
  Word out;
  for (int i = 0; i < std::abs(k); ++i) out = out * base;
  return out;
}

Word operator*(const Word& a, const Word& b) {
  std::vector<Letter> letters = a.letters_;
  letters.insert(letters.end(), b.letters_.begin(), b.letters_.end());
  return Word(std::move(letters));
}

bool operator<(const Word& a, const Word& b) {
  return std::lexicographical_compare(
      a.letters_.begin(), a.letters_.end(), b.letters_.begin(), b.letters_.end(),
      [](const Letter& l, const Letter& r) {
        return l.generator != r.generator ? l.generator < r.generator : l.sign < r.sign;
      });
}

Word commutator(const Word& w1, const Word& w2) {
  return w1.inverse() * w2.inverse() * w1 * w2;
}

// ---------------------------------------------------------------------------

GeneratorSet::GeneratorSet(std::vector<Generator> generators, int claimed_order, int c1_samples)
    : generators_(std::move(generators)), claimed_order_(claimed_order), c1_samples_(c1_samples) {
  if (generators_.empty()) throw Error("a generator set needs at least one generator");
  if (claimed_order_ < 1) throw Error("claimed nilpotency order must be >= 1");
  for (const Generator& g : generators_) epsilon_ = std::max(epsilon_, g.c1_distance());
}

GeneratorSet GeneratorSet::from_expressions(const std::vector<std::string>& exprs,
                                            int claimed_order, int c1_samples) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < exprs.size(); ++i) {
    gens.push_back(Generator::parse("f" + std::to_string(i + 1), exprs[i], c1_samples));
  }
  return GeneratorSet(std::move(gens), claimed_order, c1_samples);
}

int GeneratorSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].name() == name) return static_cast<int>(i);
  }
  return -1;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

template <bool WithDerivative>
WordValue eval_impl(const GeneratorSet& gens, const Word& w, double x, double tol) {
  WordValue out;
  double v = x;
  double d = 1.0;
  const auto& letters = w.letters();
  for (int i = static_cast<int>(letters.size()) - 1; i >= 0; --i) {
    const Letter& l = letters[static_cast<std::size_t>(i)];
    const Generator& g = gens[static_cast<std::size_t>(l.generator)];
    if (!(v > -1.0 && v < 1.0)) {
      out.value = v;
      out.failed_letter = i;
      return out;
    }
    if (l.sign > 0) {
      if constexpr (WithDerivative) d *= g.derivative(v);
      v = g(v);
    } else {
      if (!g.range().contains(v)) {
        out.value = v;
        out.failed_letter = i;
        return out;
      }
      v = invert_generator(g, v, tol);
      if constexpr (WithDerivative) d /= g.derivative(v);
    }
  }
  out.value = v;
  out.derivative = d;
  return out;
}

}  // namespace

WordValue eval_word(const GeneratorSet& gens, const Word& w, double x, double tol) {
  return eval_impl<false>(gens, w, x, tol);
}

WordValue eval_word_jet(const GeneratorSet& gens, const Word& w, double x, double tol) {
  return eval_impl<true>(gens, w, x, tol);
}

double apply(const GeneratorSet& gens, const Word& w, double x, double tol) {
  WordValue r = eval_word(gens, w, x, tol);
  if (!r.ok()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "word " << to_string(w, gens) << " undefined at x = " << x << " (letter "
        << r.failed_letter << " gets input " << r.value << ")";
    throw OutOfDomain(r.failed_letter, msg.str());
  }
  return r.value;
}

Interval word_domain(const GeneratorSet& gens, const Word& w, double tol, double inversion_tol) {
  if (!(tol > 0.0)) throw Error("domain tolerance must be positive");
  if (w.empty()) return Interval::unit();
  auto defined = [&](double x) { return eval_word(gens, w, x, inversion_tol).ok(); };

  // Probe 0 first, then successively finer dyadic grids.
  double inside = NAN;
  if (defined(0.0)) {
    inside = 0.0;
  } else {
    for (int level = 1; level <= 14 && std::isnan(inside); ++level) {
      const int cells = 1 << level;
      for (int j = 1; j < cells; j += 2) {
        double x = -1.0 + 2.0 * j / cells;
        if (defined(x)) {
          inside = x;
          break;
        }
      }
    }
  }
  if (std::isnan(inside)) return Interval::empty();

  double a = -1.0, b = inside;
  while (b - a > tol) {
    double m = 0.5 * (a + b);
    if (defined(m)) {
      b = m;
    } else {
      a = m;
    }
  }
  double lo = a;
  a = inside;
  b = 1.0;
  while (b - a > tol) {
    double m = 0.5 * (a + b);
    if (defined(m)) {
      a = m;
    } else {
      b = m;
    }
  }
  return Interval{lo, b};
}

// ---------------------------------------------------------------------------
// Text form

std::string to_string(const Word& w, const GeneratorSet& gens) {
  if (w.empty()) return "id";
  std::string out;
  const auto& ls = w.letters();
  // Runs of one letter print as a power, matching parse_word.
  for (std::size_t i = 0; i < ls.size();) {
    std::size_t j = i;
    while (j + 1 < ls.size() && ls[j + 1] == ls[i]) ++j;
    const Letter& l = ls[i];
    if (!out.empty()) out += ' ';
    out += l.generator >= 0 && static_cast<std::size_t>(l.generator) < gens.size()
               ? gens[static_cast<std::size_t>(l.generator)].name()
               : "g" + std::to_string(l.generator + 1);
    long k = static_cast<long>(j - i + 1) * l.sign;
    if (k != 1) out += "^" + std::to_string(k);
    i = j + 1;
  }
  return out;
}

Word parse_word(std::string_view text, const GeneratorSet& gens) {
  std::vector<Letter> letters;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
    std::string_view token = text.substr(pos, end - pos);
    pos = end;
    if (token == "id") continue;
    std::string_view name = token;
    int k = 1;
    if (auto caret = token.find('^'); caret != std::string_view::npos) {
      name = token.substr(0, caret);
      std::string_view e = token.substr(caret + 1);
      if (!e.empty() && e.front() == '+') e.remove_prefix(1);
      auto [ptr, ec] = std::from_chars(e.data(), e.data() + e.size(), k);
      if (ec != std::errc() || ptr != e.data() + e.size() || k == 0) {
        throw Error("bad exponent in word token '" + std::string(token) + "'");
      }
    }
    int idx = gens.index_of(name);
    if (idx < 0) throw Error("unknown generator '" + std::string(name) + "' in word");
    for (int i = 0; i < std::abs(k); ++i) letters.push_back(Letter{idx, k < 0 ? -1 : 1});
  }
  return Word(std::move(letters));
}

}  // namespace pseudogroup
