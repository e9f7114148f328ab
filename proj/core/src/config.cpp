#include "cedf/config.hpp"

#include <string>
#include <vector>

#include "cedf/errors.hpp"

namespace cedf {

namespace {

std::vector<double> get_vector(const nlohmann::json& j, const std::string& key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<double>>();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= static_cast<std::uint64_t>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

RunConfig RunConfig::parse(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw config_error("config: not valid JSON");
  return from_json(std::move(j));
}

RunConfig RunConfig::from_json(nlohmann::json j) {
  if (!j.is_object()) throw config_error("config: top level must be a JSON object");
  std::string missing;
  auto require = [&](const char* key) {
    if (!j.contains(key)) {
      if (!missing.empty()) missing += ", ";
      missing += key;
    }
  };
  require("model");
  require("schedule");
  require("experiment");
  require("seed");
  if (!missing.empty()) throw config_error("config: missing required keys: " + missing);
  if (!j.at("model").is_object()) throw config_error("config: model must be an object");
  if (!j.at("schedule").is_object()) throw config_error("config: schedule must be an object");
  if (!j.at("experiment").is_object() || !j.at("experiment").contains("name"))
    throw config_error("config: experiment must be an object with a name");
  const nlohmann::json& seed = j.at("seed");
  const bool seed_ok = seed.is_number_unsigned() ||
                       (seed.is_number_integer() && seed.get<std::int64_t>() >= 0);
  if (!seed_ok) throw config_error("config: seed must be an unsigned integer");
  RunConfig cfg;
  cfg.doc_ = std::move(j);
  // Eagerly build the model and schedule so structural errors surface at
  // parse time with exit-status-2 semantics, not midway through a run.
  (void)cfg.model();
  (void)cfg.schedule();
  return cfg;
}

std::string RunConfig::emit() const {
  // nlohmann::json objects iterate in sorted key order, so dump() is already
  // canonical for equal documents.
  return doc_.dump(2) + "\n";
}

std::uint64_t RunConfig::hash() const { return fnv1a64(emit()); }

std::string RunConfig::hash_hex() const {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = hash();
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return out;
}

ModelSpec RunConfig::model() const {
  const nlohmann::json& m = doc_.at("model");
  for (const char* key : {"family", "k", "d", "z"}) {
    if (!m.contains(key)) throw config_error(std::string("config: model missing key: ") + key);
  }
  ModelSpec spec;
  spec.family = family_from_name(m.at("family").get<std::string>());
  spec.k = m.at("k").get<int>();
  spec.d = m.at("d").get<int>();
  spec.z = m.at("z").get<std::vector<double>>();
  spec.gamma = get_vector(m, "gamma");
  if (spec.gamma.empty()) spec.gamma.assign(static_cast<std::size_t>(spec.d), 0.0);
  spec.y0 = get_vector(m, "y0");
  spec.mean_base = get_vector(m, "mean_base");
  spec.mean_slope = get_vector(m, "mean_slope");
  spec.sd = get_vector(m, "sd");
  spec.y_lo = get_vector(m, "y_lo");
  spec.y_hi = get_vector(m, "y_hi");
  double dens = 1.0;
  for (int a = 0; a < spec.d; ++a)
    dens *= 1.0 + spec.gamma[static_cast<std::size_t>(a)] *
                      (spec.z[static_cast<std::size_t>(a)] - 0.5);
  spec.density_at_z = dens;
  spec.validate();
  return spec;
}

BandwidthSchedule RunConfig::schedule() const {
  const nlohmann::json& s = doc_.at("schedule");
  if (!s.contains("mode")) throw config_error("config: schedule missing key: mode");
  const std::string mode = s.at("mode").get<std::string>();
  if (mode == "nonstandard") {
    const double c = s.contains("c") ? s.at("c").get<double>() : 1.0;
    return BandwidthSchedule::nonstandard(c);
  }
  if (mode == "consistent") return BandwidthSchedule::consistent();
  if (mode == "custom") {
    if (!s.contains("table")) throw config_error("config: custom schedule needs a table");
    return BandwidthSchedule::custom(s.at("table").get<std::vector<double>>());
  }
  throw config_error("config: unknown schedule mode: " + mode);
}

std::string RunConfig::experiment() const {
  return doc_.at("experiment").at("name").get<std::string>();
}

nlohmann::json RunConfig::params() const {
  const nlohmann::json& e = doc_.at("experiment");
  if (!e.contains("params")) return nlohmann::json::object();
  return e.at("params");
}

std::string RunConfig::out_dir() const {
  if (doc_.contains("output") && doc_.at("output").contains("dir"))
    return doc_.at("output").at("dir").get<std::string>();
  return ".";
}

std::uint64_t RunConfig::seed() const { return doc_.at("seed").get<std::uint64_t>(); }

std::uint64_t RunConfig::replications() const {
  if (doc_.contains("replications")) return doc_.at("replications").get<std::uint64_t>();
  return 10000;
}

}  // namespace cedf
