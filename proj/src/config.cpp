#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pseudogroup/cli.hpp"
#include "pseudogroup/report.hpp"

namespace pseudogroup::cli {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Field path, with the line of the first occurrence of `needle` when found.
std::string locate(const std::string& path, const std::string& text, const std::string& needle) {
  if (needle.empty()) return path;
  std::size_t pos = text.find(needle);
  if (pos == std::string::npos) return path;
  return path + " (line " + std::to_string(line_of_offset(text, pos)) + ")";
}

std::string key_token(const std::string& key) { return "\"" + key + "\""; }

class Reader {
 public:
  Reader(const json& obj, std::string path, const std::string& text)
      : obj_(obj), path_(std::move(path)), text_(text) {
    if (!obj_.is_object()) fail(path_, "", "expected an object");
  }

  template <class T>
  void number(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    bool ok = std::is_integral_v<T> ? it->is_number_integer() : it->is_number();
    if (!ok) fail(field(key), key_token(key), std::is_integral_v<T> ? "expected an integer" : "expected a number");
    out = it->template get<T>();
  }

  void string(const char* key, std::string& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    if (!it->is_string()) fail(field(key), key_token(key), "expected a string");
    out = it->get<std::string>();
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(field(it.key()), key_token(it.key()), "unknown field");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const std::string& where, const std::string& needle, const std::string& msg) const {
    throw ConfigError(locate(where, text_, needle), msg);
  }

 private:
  const json& obj_;
  std::string path_;
  const std::string& text_;
  std::set<std::string> seen_;
};

bool valid_name(const std::string& s) {
  if (s.empty() || s == "id") return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(),
                     [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
}

}  // namespace

Config parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    std::size_t line_start = text.rfind('\n', byte == 0 ? 0 : byte - 1);
    line_start = line_start == std::string::npos ? 0 : line_start + 1;
    std::string where = source + ": line " + std::to_string(line_of_offset(text, byte)) +
                        ", column " + std::to_string(byte - line_start + 1);
    std::string msg = e.what();
    // Drop the library's "[json.exception.parse_error.101] parse error at ...: " prefix.
    std::size_t colon = msg.find(": ", msg.find("parse error"));
    throw ConfigError(where, colon == std::string::npos ? msg : msg.substr(colon + 2));
  }

  Config c;
  c.text = text;
  Reader top(root, "", text);
  const json* gens = top.child("generators");
  if (!gens) throw ConfigError("generators", "missing required field");
  if (!gens->is_array()) top.fail("generators", key_token("generators"), "expected an array");
  for (std::size_t i = 0; i < gens->size(); ++i) {
    const json& g = (*gens)[i];
    std::string path = "generators[" + std::to_string(i) + "]";
    if (g.is_string()) {
      c.generators.emplace_back("f" + std::to_string(i + 1), g.get<std::string>());
      continue;
    }
    Reader r(g, path, text);
    std::string name = "f" + std::to_string(i + 1), expr;
    r.string("name", name);
    r.string("expr", expr);
    if (!g.contains("expr")) throw ConfigError(path + ".expr", "missing required field");
    r.reject_unknown();
    c.generators.emplace_back(name, expr);
  }
  top.number("claimed_order", c.claimed_order);
  if (const json* t = top.child("tolerances")) {
    Reader r(*t, "tolerances", text);
    r.number("identity", c.identity_tol);
    r.number("inversion", c.inversion_tol);
    r.number("fixed_point", c.fixed_point_tol);
    r.number("commutator", c.commutator_tol);
    r.number("chain", c.chain_tol);
    r.reject_unknown();
  }
  if (const json* it = top.child("iterations")) {
    Reader r(*it, "iterations", text);
    r.number("tau", c.tau_iterations);
    r.number("identity_samples", c.identity_samples);
    r.number("c1_samples", c.c1_samples);
    r.number("fixed_point_grid", c.fixed_point_grid);
    r.number("segments", c.segments);
    r.number("residual_samples", c.residual_samples);
    r.reject_unknown();
  }
  top.number("q_max", c.q_max);
  if (const json* x0 = top.child("x0")) {
    if (!x0->is_null()) {
      if (!x0->is_number()) top.fail("x0", key_token("x0"), "expected a number or null");
      c.x0 = x0->get<double>();
    }
  }
  top.string("output_dir", c.output_dir);
  top.reject_unknown();
  validate(c);
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.string());
}

void validate(const Config& c) {
  auto where = [&](const std::string& path, const std::string& key) {
    return locate(path, c.text, key.empty() ? "" : key_token(key));
  };
  if (c.generators.empty()) throw ConfigError(where("generators", "generators"), "at least one generator is required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto& [name, expr] = c.generators[i];
    std::string path = "generators[" + std::to_string(i) + "]";
    if (!valid_name(name)) {
      throw ConfigError(locate(path + ".name", c.text, Json(name).dump()),
                        "generator name '" + name + "' must be an identifier other than 'id'");
    }
    if (!names.insert(name).second) {
      throw ConfigError(locate(path + ".name", c.text, Json(name).dump()), "duplicate generator name '" + name + "'");
    }
  }
  if (c.claimed_order < 1) throw ConfigError(where("claimed_order", "claimed_order"), "must be >= 1");
  const std::pair<const char*, double> tols[] = {{"identity", c.identity_tol},
                                                 {"inversion", c.inversion_tol},
                                                 {"fixed_point", c.fixed_point_tol},
                                                 {"commutator", c.commutator_tol},
                                                 {"chain", c.chain_tol}};
  for (const auto& [key, v] : tols) {
    if (!(v > 0.0)) throw ConfigError(where(std::string("tolerances.") + key, key), "must be positive");
  }
  const std::pair<const char*, int> counts[] = {{"tau", c.tau_iterations},
                                                {"identity_samples", c.identity_samples},
                                                {"c1_samples", c.c1_samples},
                                                {"fixed_point_grid", c.fixed_point_grid},
                                                {"segments", c.segments},
                                                {"residual_samples", c.residual_samples}};
  for (const auto& [key, v] : counts) {
    int min = std::string(key) == "segments" || std::string(key) == "fixed_point_grid" ? 3 : 1;
    if (v < min) {
      throw ConfigError(where(std::string("iterations.") + key, key), "must be >= " + std::to_string(min));
    }
  }
  if (c.q_max < 1) throw ConfigError(where("q_max", "q_max"), "must be >= 1");
  if (c.x0 && !(*c.x0 > -1.0 && *c.x0 < 1.0)) throw ConfigError(where("x0", "x0"), "must lie in (-1,1)");
}

std::string canonical_json(const Config& c) {
  Json gens = Json::array();
  for (const auto& [name, expr] : c.generators) gens.push_back(Json{{"name", name}, {"expr", expr}});
  Json j{{"generators", gens},
         {"claimed_order", c.claimed_order},
         {"tolerances",
          Json{{"identity", c.identity_tol},
               {"inversion", c.inversion_tol},
               {"fixed_point", c.fixed_point_tol},
               {"commutator", c.commutator_tol},
               {"chain", c.chain_tol}}},
         {"iterations",
          Json{{"tau", c.tau_iterations},
               {"identity_samples", c.identity_samples},
               {"c1_samples", c.c1_samples},
               {"fixed_point_grid", c.fixed_point_grid},
               {"segments", c.segments},
               {"residual_samples", c.residual_samples}}},
         {"q_max", c.q_max},
         {"x0", c.x0 ? Json(*c.x0) : Json(nullptr)}};
  return dump_json(j);
}

std::string config_hash(const Config& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path run_directory(const Config& c) {
  return std::filesystem::path(c.output_dir) / ("run-" + config_hash(c));
}

GeneratorSet build_generators(const Config& c) {
  std::vector<Generator> gens;
  for (std::size_t i = 0; i < c.generators.size(); ++i) {
    const auto& [name, expr] = c.generators[i];
    try {
      gens.push_back(Generator::parse(name, expr, c.c1_samples));
    } catch (const ParseError& e) {
      std::string where = locate("generators[" + std::to_string(i) + "].expr", c.text, Json(expr).dump());
      std::string caret = expr + "\n" + std::string(e.offset(), ' ') + "^";
      throw ConfigError(where, std::string(e.what()) + "\n" + caret);
    }
  }
  return GeneratorSet(std::move(gens), c.claimed_order, c.c1_samples);
}

ClassifyOptions classify_options(const Config& c) {
  ClassifyOptions o;
  o.identity_tol = c.identity_tol;
  o.identity_samples = c.identity_samples;
  o.commutator_tol = c.commutator_tol;
  o.fixed_tol = c.fixed_point_tol;
  o.grid = c.fixed_point_grid;
  o.n_iters = c.tau_iterations;
  o.q_max = c.q_max;
  o.segments = c.segments;
  o.chain_tol = c.chain_tol;
  o.residual_samples = c.residual_samples;
  o.x0 = c.x0;
  return o;
}

}  // namespace pseudogroup::cli
