#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudogroup/classify.hpp"
#include "pseudogroup/monotone.hpp"
#include "pseudogroup/nilpotency.hpp"
#include "pseudogroup/rotation.hpp"

namespace pseudogroup {

/// Bumped when a report field changes meaning or is removed.
inline constexpr int kReportSchemaVersion = 1;

using Json = nlohmann::ordered_json;

/// Pretty JSON with every floating-point number printed with 17 significant
/// digits; non-finite numbers become null.
std::string dump_json(const Json& j);

/// %.17g, with "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double v);

Json to_json(const Interval& i);
Json to_json(const Segment& s);
Json to_json(const Word& w, const GeneratorSet& gens);
Json to_json(const GeneratorSet& gens);
Json to_json(const IdentityCheckReport& r);
Json to_json(const VerificationReport& r);
Json to_json(const RotationEstimate& e);
Json to_json(const FixedPointSet& s, const GeneratorSet& gens);
/// Summary only (domain, node count, scheme); node data goes to CSV.
Json to_json(const SampledMonotoneMap& m);
Json to_json(const PeriodicChain& c, const GeneratorSet& gens);
Json to_json(const StabilizerReduction& s, const GeneratorSet& gens);
Json to_json(const ClassificationReport& r, const GeneratorSet& gens);

/// Header row plus one row per sample; values with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
/// Nodes of a sampled map as columns t,value.
void write_map_csv(const std::filesystem::path& path, const SampledMonotoneMap& m);
/// Swapped nodes: the inverse map as t,value.
void write_inverse_map_csv(const std::filesystem::path& path, const SampledMonotoneMap& m);
/// Chain points as t,value with t the chain index.
void write_chain_csv(const std::filesystem::path& path, const PeriodicChain& c);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace pseudogroup
