#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "pseudogroup/cli.hpp"
#include "pseudogroup/parallel.hpp"
#include "pseudogroup/report.hpp"

namespace pseudogroup::cli {

namespace fs = std::filesystem;

namespace {

Json header(const Config& c, const GeneratorSet& gens, const char* command) {
  return Json{{"schema_version", kReportSchemaVersion},
              {"command", command},
              {"config_hash", config_hash(c)},
              {"claimed_order", c.claimed_order},
              {"epsilon", gens.epsilon()},
              {"generators", to_json(gens)}};
}

fs::path prepare(const Config& c) {
  fs::path dir = run_directory(c);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create run directory " + dir.string() + ": " + ec.message());
  return dir;
}

int resolve_index(const GeneratorSet& gens, const std::string& s) {
  int idx = gens.index_of(s);
  if (idx >= 0) return idx;
  char* end = nullptr;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end && *end == '\0' && !s.empty() && v >= 1 && v <= static_cast<long>(gens.size())) {
    return static_cast<int>(v - 1);
  }
  throw Error("no generator '" + s + "' (use a name or a 1-based index)");
}

std::string fixed4(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// Which of the ordering reductions applies at x0, for precondition messages.
std::string ordering(const GeneratorSet& gens, int i, int j, double x0) {
  WordValue a = eval_word(gens, Word::letter(i), x0);
  WordValue b = eval_word(gens, Word::letter(j), x0);
  if (!a.ok() || !b.ok()) return "generator undefined at x0";
  double d1 = a.value - x0, d2 = b.value - x0;
  std::string s = gens[static_cast<std::size_t>(i)].name() + "(x0) - x0 = " + format_double(d1) + ", " +
                  gens[static_cast<std::size_t>(j)].name() + "(x0) - x0 = " + format_double(d2) + "; ";
  if (std::abs(d1) <= kFixedPointTol) return s + "x0 is fixed by the reference map";
  if (d1 < 0) return s + "reference map moves left (invert both)";
  if (d2 < 0) return s + "measured map moves left (negate)";
  if (d2 > d1) return s + "measured map moves further (reciprocal)";
  return s + "canonical ordering";
}

}  // namespace

void apply_thread_env() {
  const char* env = std::getenv("PSEUDOGROUP_THREADS");
  if (!env) return;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end && *end == '\0' && v > 0) set_max_threads(static_cast<unsigned>(v));
}

std::string format_tau(const RotationEstimate& e, int q_max) {
  std::string s = fixed4(e.value) + " ± " + fixed4(e.error_bound);
  if (e.rational) {
    s += " (rational " + std::to_string(e.rational->p) + "/" + std::to_string(e.rational->q);
    s += e.low_confidence ? ", low confidence)" : ")";
  } else {
    s += " (no rational p/q with q <= " + std::to_string(q_max) + ")";
  }
  return s;
}

int cmd_verify(const Config& c, std::ostream& out, std::ostream& err) {
  try {
    GeneratorSet gens = build_generators(c);
    auto nil = verify_near_identity_nilpotent(gens, c.claimed_order, c.identity_tol, c.identity_samples);
    auto ab = verify_abelian(gens, c.identity_tol, c.identity_samples);
    auto meta = verify_metabelian(gens, c.identity_tol, c.identity_samples);
    Json j = header(c, gens, "verify");
    j["passed"] = nil.passed;
    j["nilpotent"] = to_json(nil);
    j["abelian"] = to_json(ab);
    j["metabelian"] = to_json(meta);
    fs::path dir = prepare(c);
    write_text(dir / "verify.json", dump_json(j));
    out << "nilpotent of order " << c.claimed_order << ": " << (nil.passed ? "pass" : "FAIL") << "\n";
    if (!nil.passed) out << "  " << nil.failure << "\n";
    out << "abelian: " << (ab.passed ? "yes" : "no") << "\n";
    out << "metabelian: " << (meta.passed ? "yes" : "no") << "\n";
    out << "report: " << (dir / "verify.json").string() << "\n";
    return nil.passed ? kExitOk : kExitHypothesis;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_tau(const Config& c, const std::string& i_name, const std::string& j_name, double x0,
            std::ostream& out, std::ostream& err) {
  GeneratorSet gens;
  int i = 0, j = 0;
  try {
    gens = build_generators(c);
    i = resolve_index(gens, i_name);
    j = resolve_index(gens, j_name);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  try {
    std::vector<TauTraceRow> trace;
    RotationEstimate est;
    if (i == j) {
      // τ(f, f) = 1 without iterating.
      est.value = 1.0;
      est.rational = Fraction{1, 1};
      est.normalization = "trivial";
    } else {
      TauOptions opt;
      opt.n_iters = c.tau_iterations;
      opt.commutator_tol = c.commutator_tol;
      opt.trace = &trace;
      est = rational_identify(
          relative_translation_number(gens, Word::letter(i), Word::letter(j), x0, opt), c.q_max);
    }
    fs::path dir = prepare(c);
    std::vector<std::vector<double>> rows;
    for (const auto& r : trace) {
      rows.push_back({static_cast<double>(r.n), r.a, static_cast<double>(r.k), static_cast<double>(r.p)});
    }
    write_csv(dir / "tau_trace.csv", {"n", "a", "k", "p"}, rows);
    Json jr = header(c, gens, "tau");
    jr["reference"] = gens[static_cast<std::size_t>(i)].name();
    jr["measured"] = gens[static_cast<std::size_t>(j)].name();
    jr["x0"] = x0;
    jr["tau"] = to_json(est);
    write_text(dir / "tau.json", dump_json(jr));
    out << format_tau(est, c.q_max) << "\n";
    return kExitOk;
  } catch (const CommutatorNotFixed& e) {
    err << "CommutatorNotFixed: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const FixedPointInput& e) {
    err << "FixedPointInput: " << e.what() << " [" << ordering(gens, i, j, x0) << "]\n";
    return kExitHypothesis;
  } catch (const InternalConsistency& e) {
    err << "InternalConsistency: " << e.what() << " [" << ordering(gens, i, j, x0) << "]\n";
    return kExitHypothesis;
  } catch (const OutOfDomain& e) {
    err << "OutOfDomain: " << e.what() << " [" << ordering(gens, i, j, x0) << "]\n";
    return kExitHypothesis;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_classify(const Config& c, std::ostream& out, std::ostream& err) {
  GeneratorSet gens;
  try {
    gens = build_generators(c);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  try {
    ClassificationReport rep;
    try {
      rep = classify(gens, classify_options(c));
    } catch (const HypothesisFailure& e) {
      fs::path dir = prepare(c);
      Json j = header(c, gens, "classify");
      j["error"] = Json{{"kind", "HypothesisFailure"}, {"message", e.what()}};
      write_text(dir / "report.json", dump_json(j));
      err << "HypothesisFailure: " << e.what() << "\n";
      return kExitHypothesis;
    }
    fs::path dir = prepare(c);
    Json j = header(c, gens, "classify");
    j["classification"] = to_json(rep, gens);
    write_text(dir / "report.json", dump_json(j));
    for (std::size_t k = 0; k < rep.case1.size(); ++k) {
      const auto& phi = rep.case1[k].conjugacy.phi;
      write_map_csv(dir / ("phi_interval_" + std::to_string(k + 1) + ".csv"), phi);
      write_inverse_map_csv(dir / ("psi_interval_" + std::to_string(k + 1) + ".csv"), phi);
    }
    if (rep.case2) {
      write_map_csv(dir / "phi.csv", rep.case2->conjugacy.phi);
      write_inverse_map_csv(dir / "psi.csv", rep.case2->conjugacy.phi);
    }
    if (rep.case3) write_chain_csv(dir / "chain.csv", rep.case3->chain);

    out << "case " << rep.case_id;
    if (rep.ambiguous) {
      out << " (ambiguous; candidates";
      for (int cand : rep.candidate_cases) out << " " << cand;
      out << ")";
    }
    out << "\n";
    if (rep.case_id == 1) {
      out << "common fixed points: " << rep.common_fixed_points.components.size() << " component(s)\n";
      for (const auto& ci : rep.case1) {
        out << "  (" << format_double(ci.interval.lo) << ", " << format_double(ci.interval.hi) << "): a =";
        for (double a : ci.conjugacy.a) out << " " << format_double(a);
        out << "\n";
      }
    } else if (rep.case3) {
      out << "a =";
      for (long long a : rep.case3->chain.a) out << " " << a;
      out << ", N = " << rep.case3->chain.N << "\n";
    } else if (rep.case2) {
      out << "a =";
      for (double a : rep.case2->conjugacy.a) out << " " << format_double(a);
      out << ", residual = " << format_double(rep.case2->conjugacy.residual) << "\n";
    }
    for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
    out << "report: " << (dir / "report.json").string() << "\n";
    return rep.ambiguous ? kExitAmbiguous : kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

int cmd_orbit(const Config& c, const std::string& word_text, double x0, int n, std::ostream& out,
              std::ostream& err) {
  try {
    GeneratorSet gens = build_generators(c);
    Word w = parse_word(word_text, gens);
    if (n < 0) throw Error("orbit length must be >= 0");
    std::string csv = "k,x,status\n";
    double x = x0;
    int k = 0;
    std::string status = x > -1.0 && x < 1.0 ? "ok" : "left_domain";
    csv += "0," + format_double(x) + "," + status + "\n";
    while (status == "ok" && k < n) {
      ++k;
      WordValue r = eval_word(gens, w, x, c.inversion_tol);
      if (!r.ok()) {
        status = "undefined";
        csv += std::to_string(k) + ",nan," + status + "\n";
        break;
      }
      x = r.value;
      if (!(x > -1.0 && x < 1.0)) status = "left_domain";
      csv += std::to_string(k) + "," + format_double(x) + "," + status + "\n";
    }
    fs::path dir = prepare(c);
    write_text(dir / "orbit.csv", csv);
    out << k << " steps";
    if (status != "ok") out << ", stopped: " << status << " at k = " << k;
    out << "\norbit: " << (dir / "orbit.csv").string() << "\n";
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace pseudogroup::cli
