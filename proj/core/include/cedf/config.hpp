#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "cedf/model.hpp"

namespace cedf {

// Validated run configuration. The document is kept verbatim (as parsed), so
// parse(emit(config)) round-trips exactly; emission is canonical (sorted
// keys, shortest round-trip numbers), which is also what the hash covers.
//
// Schema (JSON object):
//   model:      { family: "constant"|"bounded"|"semiparametric", k, d, z,
//                 gamma?, y0?, mean_base?, mean_slope?, sd?, y_lo?, y_hi? }
//   schedule:   { mode: "nonstandard"|"consistent"|"custom", c?, table? }
//   experiment: { name: string, params?: object }
//   output:     { dir?: string }            (optional, default ".")
//   seed:       unsigned integer
//   replications?: unsigned integer         (optional, default 10000)
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig from_json(nlohmann::json j);

  std::string emit() const;       // canonical serialization
  std::uint64_t hash() const;     // FNV-1a 64 over emit()
  std::string hash_hex() const;   // 16 lowercase hex digits, for file names

  ModelSpec model() const;
  BandwidthSchedule schedule() const;
  std::string experiment() const;
  nlohmann::json params() const;  // experiment.params, {} when absent
  std::string out_dir() const;
  std::uint64_t seed() const;
  std::uint64_t replications() const;

  const nlohmann::json& doc() const { return doc_; }

 private:
  nlohmann::json doc_;
};

// FNV-1a 64-bit over a byte string.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace cedf
