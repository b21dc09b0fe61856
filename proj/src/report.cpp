#include "pseudogroup/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "pseudogroup/errors.hpp"

namespace pseudogroup {

namespace {

void dump(const Json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump(it.value(), depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += flat ? "[" : "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",\n";
        first = false;
        if (!flat) out += pad;
        dump(e, depth + 1, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Interval& i) {
  if (i.is_empty()) return nullptr;
  return Json{{"lo", i.lo}, {"hi", i.hi}};
}

Json to_json(const Segment& s) {
  return Json{{"lo", s.lo}, {"hi", s.hi}, {"plateau", !s.is_point()}};
}

Json to_json(const Word& w, const GeneratorSet& gens) { return to_string(w, gens); }

Json to_json(const GeneratorSet& gens) {
  Json arr = Json::array();
  for (const Generator& g : gens.generators()) {
    arr.push_back(Json{{"name", g.name()},
                       {"expr", print(g.f())},
                       {"c1_distance", g.c1_distance()},
                       {"range", to_json(g.range())}});
  }
  return arr;
}

Json to_json(const IdentityCheckReport& r) {
  return Json{{"word", r.label},
              {"order", r.order},
              {"checked_interval", to_json(r.checked_interval)},
              {"max_deviation", r.max_deviation},
              {"worst_x", r.worst_x},
              {"samples", r.sample_count},
              {"tol", r.tol},
              {"identity", r.verdict}};
}

Json to_json(const VerificationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return Json{{"property", r.property},
              {"order", r.order},
              {"passed", r.passed},
              {"epsilon", r.epsilon},
              {"epsilon_bound", r.epsilon_bound},
              {"epsilon_ok", r.epsilon_ok},
              {"c1_samples", r.c1_samples},
              {"commutators_ok", r.commutators_ok},
              {"truncated", r.truncated},
              {"failure", r.failure},
              {"checks", checks}};
}

Json to_json(const RotationEstimate& e) {
  Json j{{"value", e.value},
         {"error_bound", e.error_bound},
         {"iterations", e.iterations},
         {"rational", nullptr},
         {"low_confidence", e.low_confidence},
         {"normalization", e.normalization}};
  if (e.rational) j["rational"] = Json{{"p", e.rational->p}, {"q", e.rational->q}};
  if (!std::isnan(e.cross_check)) j["cross_check"] = e.cross_check;
  return j;
}

Json to_json(const FixedPointSet& s, const GeneratorSet& gens) {
  Json comps = Json::array();
  for (const auto& c : s.components) comps.push_back(to_json(c));
  return Json{{"source_word", s.source_word.empty() ? Json("generators") : to_json(s.source_word, gens)},
              {"tol", s.tol},
              {"components", comps}};
}

Json to_json(const SampledMonotoneMap& m) {
  if (m.empty()) return nullptr;
  return Json{{"domain", Json{{"lo", m.domain().lo}, {"hi", m.domain().hi}}},
              {"range", Json{{"lo", m.range().lo}, {"hi", m.range().hi}}},
              {"nodes", m.size()},
              {"scheme", std::string(m.scheme_name())}};
}

Json to_json(const PeriodicChain& c, const GeneratorSet& gens) {
  Json tau = Json::array();
  for (const auto& t : c.tau) tau.push_back(to_json(t));
  return Json{{"N", c.N},
              {"a", c.a},
              {"q", c.q},
              {"base", to_json(c.base, gens)},
              {"step", to_json(c.step, gens)},
              {"y_minus_N", c.y.front()},
              {"y_0", c.at(0)},
              {"y_N", c.y.back()},
              {"max_defect", c.max_defect},
              {"tau", tau}};
}

Json to_json(const StabilizerReduction& s, const GeneratorSet& gens) {
  Json reduced = Json::array(), comms = Json::array();
  for (const auto& w : s.reduced) reduced.push_back(to_json(w, gens));
  for (const auto& w : s.commutators) comms.push_back(to_json(w, gens));
  return Json{{"pivot", gens[static_cast<std::size_t>(s.pivot)].name()},
              {"pivot_sign", s.pivot_sign},
              {"reduced", reduced},
              {"commutators", comms},
              {"count", s.reduced.size() + s.commutators.size()},
              {"max_defect", s.max_defect}};
}

namespace {

Json conjugacy_json(const SemiConjugacy& sc, const GeneratorSet& gens) {
  return Json{{"base", to_json(sc.base, gens)},
              {"x0", sc.x0},
              {"a", sc.a},
              {"J", Json{{"lo", sc.J.lo}, {"hi", sc.J.hi}}},
              {"phi", to_json(sc.phi)},
              {"residual", sc.residual},
              {"residual_samples", sc.residual_samples}};
}

Json taus_json(const std::vector<RotationEstimate>& tau) {
  Json arr = Json::array();
  for (const auto& t : tau) arr.push_back(to_json(t));
  return arr;
}

}  // namespace

Json to_json(const ClassificationReport& r, const GeneratorSet& gens) {
  Json j{{"case", r.case_id},
         {"ambiguous", r.ambiguous},
         {"candidate_cases", r.candidate_cases},
         {"epsilon", r.epsilon},
         {"abelian", r.abelian.passed},
         {"metabelian", r.metabelian.passed},
         {"common_fixed_points", to_json(r.common_fixed_points, gens)}};
  if (!r.case1.empty()) {
    Json arr = Json::array();
    for (const auto& c : r.case1) {
      arr.push_back(Json{{"interval", to_json(c.interval)},
                         {"b", c.b},
                         {"tau", taus_json(c.tau)},
                         {"conjugacy", conjugacy_json(c.conjugacy, gens)},
                         {"lo_interior", c.lo_interior},
                         {"hi_interior", c.hi_interior},
                         {"inf_J", to_string(c.inf_J)},
                         {"sup_J", to_string(c.sup_J)}});
    }
    j["case1"] = arr;
  }
  if (r.case2) {
    j["case2"] = Json{{"x0", r.case2->x0},
                      {"tau", taus_json(r.case2->tau)},
                      {"conjugacy", conjugacy_json(r.case2->conjugacy, gens)},
                      {"J_exceeds_a", r.case2->J_exceeds_a},
                      {"near_equality", r.case2->near_equality}};
  }
  if (r.case3) {
    j["case3"] = Json{{"chain", to_json(r.case3->chain, gens)},
                      {"stabilizer", to_json(r.case3->stabilizer, gens)}};
  }
  j["verification"] = Json{{"nilpotent", to_json(r.nilpotency)},
                           {"abelian", to_json(r.abelian)},
                           {"metabelian", to_json(r.metabelian)}};
  j["warnings"] = r.warnings;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("write to " + path.string() + " failed");
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string text;
  for (std::size_t i = 0; i < header.size(); ++i) text += (i ? "," : "") + header[i];
  text += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) text += (i ? "," : "") + format_double(row[i]);
    text += "\n";
  }
  write_text(path, text);
}

void write_map_csv(const std::filesystem::path& path, const SampledMonotoneMap& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m.size(); ++i) rows.push_back({m.nodes()[i], m.values()[i]});
  write_csv(path, {"t", "value"}, rows);
}

void write_inverse_map_csv(const std::filesystem::path& path, const SampledMonotoneMap& m) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m.size(); ++i) rows.push_back({m.values()[i], m.nodes()[i]});
  write_csv(path, {"t", "value"}, rows);
}

void write_chain_csv(const std::filesystem::path& path, const PeriodicChain& c) {
  std::vector<std::vector<double>> rows;
  for (int k = -c.N; k <= c.N; ++k) rows.push_back({static_cast<double>(k), c.at(k)});
  write_csv(path, {"t", "value"}, rows);
}

}  // namespace pseudogroup
