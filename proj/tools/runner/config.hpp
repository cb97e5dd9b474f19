#pragma once

// Experiment configuration: a JSON document whose real numbers are decimal
// strings. Every key is checked; unknown keys raise ConfigInvalid naming the
// JSON path.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "invp/skew_model.hpp"

namespace invp::runner {

inline constexpr int kSchemaVersion = 1;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
  std::optional<unsigned> jobs;
};

struct ExperimentConfig {
  std::string experiment;
  nlohmann::json model;
  nlohmann::json params;
  std::optional<std::uint64_t> seed;
  std::size_t cap = kDefaultEnumerationCap;
  unsigned jobs = 1;
  std::string output;        // empty: caller decides
  std::string canonical;     // compact sorted-key dump used for hashing
};

// Parses and schema-checks the top level. Model and params are checked by
// build_model and ParamReader respectively.
ExperimentConfig parse_config(const nlohmann::json& doc, const Overrides& ov = {});
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& ov = {});

// Builds the system; library validation errors are reported as ConfigInvalid
// at $.model with the original code in the message.
SkewSystem build_model(const nlohmann::json& model);

// Typed access to one JSON object, tracking which keys were read.
class ParamReader {
 public:
  ParamReader(const nlohmann::json& obj, std::string path);

  bool has(const std::string& key) const;
  double real(const std::string& key) const;
  double real(const std::string& key, double fallback) const;
  std::vector<double> reals(const std::string& key) const;
  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::vector<std::size_t> sizes(const std::string& key) const;
  std::vector<std::size_t> sizes(const std::string& key, std::vector<std::size_t> fallback) const;
  // [lo, hi] inclusive range of positive integers.
  std::vector<std::size_t> range(const std::string& key) const;
  std::vector<std::size_t> range(const std::string& key, std::vector<std::size_t> fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  // Throws ConfigInvalid for the first key never read.
  void finish() const;

 private:
  const nlohmann::json& at(const std::string& key) const;
  std::string where(const std::string& key) const { return path_ + "." + key; }

  const nlohmann::json& obj_;
  std::string path_;
  mutable std::set<std::string> used_;
};

// Strict decimal parse of a whole string.
double parse_decimal(const std::string& s, const std::string& path);

}  // namespace invp::runner
