#pragma once

#include <map>
#include <string>
#include <vector>

#include "carousel/dirac.hpp"
#include "carousel/szego.hpp"

namespace carousel {

inline constexpr const char* kLibraryVersion = "0.1.0";

// Shortest round-trip decimal representation.
std::string format_double(double v);

// Spectrum CSV: header `lambda`, one value per row.  The pooled variant adds
// a leading `path` column.
std::string spectrum_to_csv(const PointSample& sample);
std::string pooled_spectrum_to_csv(const std::vector<PointSample>& samples);
std::string spectrum_to_json(const PointSample& sample);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Coefficient files: JSON with an `n` field and an array of [re, im] pairs
// under `alpha` (standard) or `gamma` (deformed).
std::string coeffs_to_json(const VerblunskyCoefficients& c);
std::string coeffs_to_json(const DeformedVerblunsky& c);
VerblunskyCoefficients verblunsky_from_json(const std::string& text);
DeformedVerblunsky deformed_from_json(const std::string& text);
bool coeff_json_is_deformed(const std::string& text);

// Operator descriptor: driving path, weight, boundary data.  Used by the
// `oracle hs-norm` subcommand.
std::string operator_to_json(const DiracOperator& op);
DiracOperator operator_from_json(const std::string& text);

// Run manifest serialized alongside every CLI output.
struct RunManifest {
  std::string subcommand;
  std::map<std::string, std::string> flags;
  uint64_t seed = 0;
  std::vector<std::string> outputs;
};
std::string manifest_to_json(const RunManifest& m);

}  // namespace carousel
