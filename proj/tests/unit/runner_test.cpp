#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_util.hpp"

#include "config.hpp"
#include "experiments.hpp"

using namespace invp;
using namespace invp::runner;
using nlohmann::json;

namespace fs = std::filesystem;

namespace {

json two_branch(const char* ratio) {
  auto m = json::parse(R"({
    "intervals": [["0", "0.5"], ["0.5", "1"]],
    "slopes": ["2", "2"],
    "transitions": [[1, 1], [1, 1]],
    "fibers": [{"ratio": "0.3", "offset": "0"}, {"ratio": "0.3", "offset": "0.7"}]
  })");
  m["fibers"][0]["ratio"] = ratio;
  return m;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigInvalid);
    return e.what();
  }
  FAIL("expected ConfigInvalid");
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("parse_config: unknown keys name their path") {
  auto doc = json::parse(R"({"schema_version": 1, "experiment": "validate",
                             "model": {"zoo": "M1"}, "seed": "1", "colour": 3})");
  CHECK(message_of([&] { parse_config(doc); }).find("$.colour") != std::string::npos);

  doc = json::parse(R"({"schema_version": 1, "experiment": "inverse-pressure",
                        "model": {"zoo": "S2"}, "params": {"t": "0", "mrange": [4, 6]}})");
  const auto cfg = parse_config(doc);
  CHECK(message_of([&] { check_config(cfg); }).find("$.params.mrange") != std::string::npos);
}

TEST_CASE("parse_config: schema version and decimal strings") {
  auto doc = json::parse(R"({"schema_version": 2, "experiment": "validate", "model": {"zoo": "M1"}})");
  CHECK(message_of([&] { parse_config(doc); }).find("schema_version") != std::string::npos);
  CHECK(message_of([] { parse_decimal("0.5x", "$.x"); }).find("$.x") != std::string::npos);
  CHECK(parse_decimal("0.25", "$.x") == 0.25);
}

TEST_CASE("build_model: library errors surface as ConfigInvalid") {
  CHECK(message_of([] { build_model(two_branch("1.2")); }).find("ContractionViolated") !=
        std::string::npos);
  CHECK(build_model(two_branch("0.3")).alphabet_size() == 2);
  CHECK(build_model(json{{"zoo", "M2"}}).id() == "M2");
}

TEST_CASE("check_config: sampling experiments need a seed") {
  auto doc = json::parse(R"({"schema_version": 1, "experiment": "distortion-propC",
                             "model": {"zoo": "M1-smooth"}})");
  const auto cfg = parse_config(doc);
  CHECK(message_of([&] { check_config(cfg); }).find("$.seed") != std::string::npos);
  Overrides ov;
  ov.seed = 4;
  CHECK_NOTHROW(check_config(parse_config(doc, ov)));
}

TEST_CASE("registry lists the mandated experiments") {
  std::vector<std::string> names;
  for (const auto& e : registry()) {
    names.push_back(e.name);
    CHECK(!e.description.empty());
    CHECK(!e.anchor.empty());
  }
  for (const char* want : {"verify-prop4a", "verify-cor-ultimul", "distortion-propC", "validate",
                           "pressure", "inverse-pressure", "dimension", "verify-theorems"}) {
    CHECK(std::find(names.begin(), names.end(), want) != names.end());
  }
}

TEST_CASE("bundled configs are valid") {
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(INVP_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CHECK_NOTHROW(check_config(load_config(entry.path())));
    ++n;
  }
  CHECK(n >= 8);
}

TEST_CASE("run_experiment: m1_theorem2 reproduces the closed form and is deterministic") {
  const auto cfg = load_config(fs::path(INVP_CONFIG_DIR) / "m1_theorem2.json");
  const auto base = fs::temp_directory_path() / "invp_runner_test";
  fs::remove_all(base);
  const auto a = run_experiment(cfg, base / "a", false);
  const auto b = run_experiment(cfg, base / "b", false);
  CHECK(a.exit_code == 0);
  bool found = false;
  for (const auto& [k, v] : a.summary) {
    if (k == "t_s0(d')") {
      CHECK(std::abs(std::stod(v) - 0.630929753571) <= 1e-6);
      found = true;
    }
  }
  CHECK(found);
  REQUIRE(a.files == b.files);
  for (const auto& f : a.files) {
    if (fs::path(f).extension() != ".csv") continue;
    CHECK_MESSAGE(slurp(base / "a" / f) == slurp(base / "b" / f), f);
  }
  CHECK(fs::exists(base / "a" / "run_record.json"));
  fs::remove_all(base);
}
