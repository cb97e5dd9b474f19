#include "config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "invp/error.hpp"
#include "invp/zoo.hpp"

namespace invp::runner {

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::kConfigInvalid, path + ": " + msg);
}

void require_keys(const nlohmann::json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(path, "expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid(path + "." + key, "unknown key");
  }
}

std::uint64_t parse_u64(const nlohmann::json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      invalid(path, "expected an unsigned integer");
    }
    errno = 0;
    const auto x = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) invalid(path, "integer out of range");
    return x;
  }
  invalid(path, "expected an unsigned integer");
}

FiberMap parse_fiber(const nlohmann::json& f, const std::string& path) {
  if (!f.is_object()) invalid(path, "expected an object");
  if (f.contains("ratio")) {
    require_keys(f, path, {"ratio", "offset"});
    const double r = parse_decimal(f.at("ratio").get<std::string>(), path + ".ratio");
    const double o = f.contains("offset")
                         ? parse_decimal(f.at("offset").get<std::string>(), path + ".offset")
                         : 0.0;
    return FiberMap::affine(r, o);
  }
  require_keys(f, path, {"c0", "c1", "c2"});
  auto coef = [&](const char* k) {
    if (!f.contains(k)) invalid(path + "." + k, "missing");
    if (!f.at(k).is_string()) invalid(path + "." + k, "expected a decimal string");
    return parse_decimal(f.at(k).get<std::string>(), path + "." + k);
  };
  return FiberMap::quadratic(coef("c0"), coef("c1"), coef("c2"));
}

}  // namespace

double parse_decimal(const std::string& s, const std::string& path) {
  if (s.empty()) invalid(path, "empty number");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    invalid(path, "'" + s + "' is not a finite decimal number");
  }
  return v;
}

ExperimentConfig parse_config(const nlohmann::json& doc, const Overrides& ov) {
  require_keys(doc, "$", {"schema_version", "experiment", "model", "params", "seed", "caps", "output"});
  ExperimentConfig cfg;
  if (!doc.contains("schema_version")) invalid("$.schema_version", "missing");
  if (!doc.at("schema_version").is_number_integer() ||
      doc.at("schema_version").get<int>() != kSchemaVersion) {
    invalid("$.schema_version", "expected " + std::to_string(kSchemaVersion));
  }
  if (!doc.contains("experiment") || !doc.at("experiment").is_string()) {
    invalid("$.experiment", "expected a string");
  }
  cfg.experiment = doc.at("experiment").get<std::string>();
  if (!doc.contains("model")) invalid("$.model", "missing");
  cfg.model = doc.at("model");
  cfg.params = doc.value("params", nlohmann::json::object());
  if (!cfg.params.is_object()) invalid("$.params", "expected an object");
  if (doc.contains("seed")) cfg.seed = parse_u64(doc.at("seed"), "$.seed");
  if (doc.contains("caps")) {
    const auto& caps = doc.at("caps");
    require_keys(caps, "$.caps", {"branches", "jobs"});
    if (caps.contains("branches")) cfg.cap = parse_u64(caps.at("branches"), "$.caps.branches");
    if (caps.contains("jobs")) cfg.jobs = static_cast<unsigned>(parse_u64(caps.at("jobs"), "$.caps.jobs"));
  }
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) invalid("$.output", "expected a string");
    cfg.output = doc.at("output").get<std::string>();
  }
  if (ov.seed) cfg.seed = ov.seed;
  if (ov.cap) cfg.cap = *ov.cap;
  if (ov.jobs) cfg.jobs = *ov.jobs;
  if (cfg.cap == 0) invalid("$.caps.branches", "must be positive");
  if (cfg.jobs == 0) cfg.jobs = 1;

  // Hash input: everything that can change primary outputs.
  nlohmann::json canon = doc;
  canon.erase("output");
  if (canon.contains("caps")) canon["caps"].erase("jobs");
  if (cfg.seed) canon["seed"] = std::to_string(*cfg.seed);
  canon["caps"]["branches"] = std::to_string(cfg.cap);
  cfg.canonical = canon.dump();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigInvalid, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kConfigInvalid, path.string() + ": " + e.what());
  }
  return parse_config(doc, ov);
}

SkewSystem build_model(const nlohmann::json& model) {
  const std::string path = "$.model";
  if (!model.is_object()) invalid(path, "expected an object");
  try {
    if (model.contains("zoo")) {
      require_keys(model, path, {"zoo", "sigma"});
      const auto name = model.at("zoo").get<std::string>();
      if (model.contains("sigma")) {
        if (name != "M1-smooth") invalid(path + ".sigma", "only valid for M1-smooth");
        return zoo::smooth_m1(parse_decimal(model.at("sigma").get<std::string>(), path + ".sigma"));
      }
      return zoo::by_name(name);
    }
    require_keys(model, path, {"id", "intervals", "slopes", "transitions", "fibers", "eps0"});
    for (const char* k : {"intervals", "slopes", "transitions", "fibers"}) {
      if (!model.contains(k) || !model.at(k).is_array()) invalid(path + "." + k, "expected an array");
    }
    BranchSpec spec;
    const auto& ivs = model.at("intervals");
    for (std::size_t i = 0; i < ivs.size(); ++i) {
      const auto p = path + ".intervals[" + std::to_string(i) + "]";
      if (!ivs[i].is_array() || ivs[i].size() != 2) invalid(p, "expected [lo, hi]");
      spec.intervals.push_back({parse_decimal(ivs[i][0].get<std::string>(), p + "[0]"),
                                parse_decimal(ivs[i][1].get<std::string>(), p + "[1]")});
    }
    const auto& sl = model.at("slopes");
    for (std::size_t i = 0; i < sl.size(); ++i) {
      spec.slopes.push_back(
          parse_decimal(sl[i].get<std::string>(), path + ".slopes[" + std::to_string(i) + "]"));
    }
    std::vector<std::vector<int>> rows;
    const auto& tr = model.at("transitions");
    for (std::size_t i = 0; i < tr.size(); ++i) {
      const auto p = path + ".transitions[" + std::to_string(i) + "]";
      if (!tr[i].is_array()) invalid(p, "expected a 0/1 row");
      std::vector<int> row;
      for (const auto& v : tr[i]) {
        if (!v.is_number_integer()) invalid(p, "entries must be 0 or 1");
        row.push_back(v.get<int>());
      }
      rows.push_back(std::move(row));
    }
    spec.admissibility = TransitionMatrix(rows);
    std::vector<FiberMap> fibers;
    const auto& fb = model.at("fibers");
    for (std::size_t i = 0; i < fb.size(); ++i) {
      fibers.push_back(parse_fiber(fb[i], path + ".fibers[" + std::to_string(i) + "]"));
    }
    std::optional<double> eps0;
    if (model.contains("eps0")) eps0 = parse_decimal(model.at("eps0").get<std::string>(), path + ".eps0");
    return build_system(std::move(spec), std::move(fibers), eps0, model.value("id", "custom"));
  } catch (const nlohmann::json::exception& e) {
    invalid(path, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfigInvalid) throw;
    invalid(path, e.what());
  }
}

ParamReader::ParamReader(const nlohmann::json& obj, std::string path)
    : obj_(obj), path_(std::move(path)) {
  if (!obj_.is_object()) invalid(path_, "expected an object");
}

bool ParamReader::has(const std::string& key) const {
  used_.insert(key);
  return obj_.contains(key);
}

const nlohmann::json& ParamReader::at(const std::string& key) const {
  used_.insert(key);
  if (!obj_.contains(key)) invalid(where(key), "missing");
  return obj_.at(key);
}

double ParamReader::real(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_string()) invalid(where(key), "expected a decimal string");
  return parse_decimal(v.get<std::string>(), where(key));
}

double ParamReader::real(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

std::vector<double> ParamReader::reals(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_array() || v.empty()) invalid(where(key), "expected a nonempty array of decimal strings");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = where(key) + "[" + std::to_string(i) + "]";
    if (!v[i].is_string()) invalid(p, "expected a decimal string");
    out.push_back(parse_decimal(v[i].get<std::string>(), p));
  }
  return out;
}

std::vector<double> ParamReader::reals(const std::string& key, std::vector<double> fallback) const {
  return has(key) ? reals(key) : fallback;
}

std::int64_t ParamReader::integer(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_number_integer()) invalid(where(key), "expected an integer");
  return v.get<std::int64_t>();
}

std::int64_t ParamReader::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::vector<std::size_t> ParamReader::sizes(const std::string& key) const {
  const auto& v = at(key);
  if (!v.is_array() || v.empty()) invalid(where(key), "expected a nonempty integer array");
  std::vector<std::size_t> out;
  for (const auto& x : v) {
    if (!x.is_number_unsigned()) invalid(where(key), "entries must be nonnegative integers");
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

std::vector<std::size_t> ParamReader::sizes(const std::string& key,
                                            std::vector<std::size_t> fallback) const {
  return has(key) ? sizes(key) : fallback;
}

std::vector<std::size_t> ParamReader::range(const std::string& key) const {
  const auto r = sizes(key);
  if (r.size() != 2 || r[0] < 1 || r[1] < r[0]) invalid(where(key), "expected [lo, hi] with 1 <= lo <= hi");
  std::vector<std::size_t> out;
  for (auto m = r[0]; m <= r[1]; ++m) out.push_back(m);
  return out;
}

std::vector<std::size_t> ParamReader::range(const std::string& key,
                                            std::vector<std::size_t> fallback) const {
  return has(key) ? range(key) : fallback;
}

std::string ParamReader::text(const std::string& key, const std::string& fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_string()) invalid(where(key), "expected a string");
  return v.get<std::string>();
}

bool ParamReader::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = at(key);
  if (!v.is_boolean()) invalid(where(key), "expected true or false");
  return v.get<bool>();
}

void ParamReader::finish() const {
  for (const auto& [key, value] : obj_.items()) {
    if (!used_.count(key)) invalid(where(key), "unknown key");
  }
}

}  // namespace invp::runner
