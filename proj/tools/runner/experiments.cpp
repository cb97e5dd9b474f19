#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "invp/error.hpp"
#include "invp/inverse_pressure.hpp"
#include "invp/pressure.hpp"
#include "output.hpp"

namespace invp::runner {

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolkitVersion = "0.1.0";

class Ctx {
 public:
  Ctx(const ExperimentConfig& cfg, fs::path out)
      : cfg(cfg), sys(build_model(cfg.model)), params(cfg.params, "$.params"), out_(std::move(out)) {}

  CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
    files.push_back(name);
    return CsvWriter(out_ / name, header);
  }
  void plot(const std::string& name, const std::vector<std::pair<double, double>>& pts) {
    files.push_back(name);
    write_plot(out_ / name, pts);
  }
  void text(const std::string& name, const std::string& body) {
    files.push_back(name);
    std::ofstream(out_ / name, std::ios::binary) << body;
  }
  void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
  void note(const std::string& key, double value) { note(key, fmt(value)); }
  void verdict(Verdict v) { verdicts.push_back(std::move(v)); }
  void lap(const std::string& what) {
    const auto now = std::chrono::steady_clock::now();
    timings.emplace_back(what, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }
  CoverOptions cover(const std::string& offset_key = "anchor_offset", std::int64_t offset = 4) {
    CoverOptions o;
    o.cap = cfg.cap;
    o.jobs = cfg.jobs;
    o.anchor_offset = static_cast<std::size_t>(params.integer(offset_key, offset));
    return o;
  }
  ProfileOptions profile() const {
    ProfileOptions p;
    if (cfg.seed) p.seed = *cfg.seed;
    return p;
  }

  const ExperimentConfig& cfg;
  SkewSystem sys;
  ParamReader params;
  std::vector<std::string> files;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<Verdict> verdicts;
  std::vector<std::pair<std::string, double>> timings;

 private:
  fs::path out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

void run_validate(Ctx& c) {
  const auto& info = c.sys.base().info();
  const auto prof = preimage_profile(c.sys, c.profile());
  std::vector<std::pair<std::string, std::string>> rows = {
      {"alphabet", std::to_string(info.d)},
      {"h_top", fmt(info.h_top)},
      {"chi_u", fmt(info.chi_u)},
      {"min_slope", fmt(info.min_slope)},
      {"chi_s", fmt(c.sys.chi_s())},
      {"lambda_s", fmt(c.sys.lambda_s())},
      {"eps0", fmt(c.sys.eps0())},
      {"affine", c.sys.affine() ? "true" : "false"},
      {"d_prime", std::to_string(prof.d_prime)},
      {"d_dprime", std::to_string(prof.d_dprime)},
      {"profile_certified", prof.certified ? "true" : "false"},
  };
  auto w = c.csv("validate.csv", {"quantity", "value"});
  for (const auto& [k, v] : rows) {
    w.cell(k).cell(v).end_row();
    c.note(k, v);
  }
}

void run_pressure(Ctx& c) {
  const auto kind = c.params.text("potential", "stable");
  std::vector<double> values;
  if (kind == "stable") {
    values = stable_potential(c.sys);
  } else if (kind == "zero") {
    values.assign(c.sys.alphabet_size(), 0.0);
  } else {
    throw Error(ErrorCode::kConfigInvalid, "$.params.potential: expected \"stable\" or \"zero\"");
  }
  const auto phi = Potential::depth1(values, kind);
  const auto ts = c.params.reals("t_grid", {0.0, 0.5, 1.0, 1.5, 2.0});
  const double shift = c.params.real("c", 0.0);
  const bool spanning = c.params.has("spanning_n");
  std::size_t n = 0;
  double eps = 0.0;
  if (spanning) {
    n = static_cast<std::size_t>(c.params.integer("spanning_n"));
    eps = c.params.real("spanning_eps");
  }
  std::vector<std::string> header{"t", "exact"};
  if (spanning) header.insert(header.end(), {"spanning_raw", "spanning_bias", "spanning"});
  auto w = c.csv("pressure.csv", header);
  std::vector<std::pair<double, double>> pts;
  for (double t : ts) {
    const auto p = pressure_exact(c.sys.transitions(), phi, t, shift);
    w.cell(t).cell(p.value);
    if (spanning) {
      const auto s = pressure_spanning(c.sys, phi, t, shift, n, eps, c.cfg.cap);
      w.cell(s.raw).cell(s.bias).cell(s.value);
      c.note("spanning(t=" + fmt(t) + ")", s.value);
    }
    w.end_row();
    pts.emplace_back(t, p.value);
    c.note("P(t=" + fmt(t) + ")", p.value);
  }
  c.plot("pressure.dat", pts);
  if (c.params.flag("roots", kind == "stable")) {
    const auto prof = preimage_profile(c.sys, c.profile());
    c.note("d_prime", std::to_string(prof.d_prime));
    c.note("d_dprime", std::to_string(prof.d_dprime));
    c.note("t_s0(d')", t_s0(c.sys, static_cast<double>(prof.d_prime), 1e-10).t_star);
    c.note("t_s0(d'')", t_s0(c.sys, static_cast<double>(prof.d_dprime), 1e-10).t_star);
  }
  c.lap("pressure");
}

void run_inverse_pressure(Ctx& c) {
  const LinearPotential phi{c.params.real("t", 0.0), c.params.real("shift", 0.0)};
  const double e0 = c.sys.eps0();
  const auto eps_list = c.params.reals("eps", {e0 / 2.0, e0 / 4.0, e0 / 8.0});
  const auto m_range = c.params.range("m_range");
  auto opt = c.cover();
  opt.breakdown = c.params.flag("breakdown", false);
  const bool has_expect = c.params.has("expect");
  const double expect = has_expect ? c.params.real("expect") : 0.0;
  const double expect_tol = c.params.real("expect_tol", 0.1);

  auto seq = c.csv("inverse_pressure.csv", {"eps", "m", "log_q", "rate"});
  auto est = c.csv("estimates.csv", {"eps", "extrapolated", "limsup_proxy", "aitken", "band"});
  std::optional<CsvWriter> rows;
  if (opt.breakdown) {
    rows.emplace(c.csv("q_breakdown.csv", {"eps", "cylinder", "m", "cover_size", "cover_weight"}));
  }
  std::vector<std::pair<double, double>> estimates;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const double eps = eps_list[i];
    InversePressureEngine engine(c.sys, eps, opt);
    const auto e = engine.estimate(phi, m_range);
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : e.sequence) {
      seq.cell(eps).cell(r.m).cell(r.log_q).cell(r.rate).end_row();
      pts.emplace_back(static_cast<double>(r.m), r.rate);
    }
    est.cell(eps).cell(e.extrapolated).cell(e.limsup_proxy).cell(e.aitken).cell(e.band).end_row();
    c.plot("rates_eps" + std::to_string(i) + ".dat", pts);
    c.note("P^-(eps=" + fmt(eps) + ")", fmt(e.extrapolated) + " +/- " + fmt(e.band));
    estimates.emplace_back(eps, e.extrapolated);
    if (rows) {
      for (auto m : m_range) {
        for (const auto& b : engine.q_m_minus(phi, m).breakdown) {
          rows->cell(eps).cell(b.cylinder).cell(b.m).cell(b.cover_size).cell(std::exp(b.log_weight));
          rows->end_row();
        }
      }
    }
    if (has_expect) {
      c.verdict({"expect-eps" + std::to_string(i), "estimated P^-(phi, eps) = expected value",
                 e.extrapolated, expect, expect_tol, std::abs(e.extrapolated - expect) <= expect_tol,
                 true});
    }
  }
  // P^-(phi, eps) should not decrease as eps decreases.
  std::sort(estimates.begin(), estimates.end(), std::greater<>());
  double worst = 0.0;
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    worst = std::min(worst, estimates[i].second - estimates[i - 1].second);
  }
  c.verdict({"eps-monotone", "P^-(phi, eps) nondecreasing as eps decreases", worst, 0.0, 1e-9,
             worst >= -1e-9, false});
  c.note("eps_monotone", worst >= -1e-9 ? "true" : "false");
  c.lap("inverse_pressure");
}

void run_dimension(Ctx& c) {
  const auto depth = static_cast<std::size_t>(c.params.integer("depth", 8));
  const double base = c.params.real("scale_base", c.sys.chi_s());
  const auto first = static_cast<int>(c.params.integer("scale_first", 2));
  const auto last = static_cast<int>(c.params.integer("scale_last", static_cast<int>(depth) - 2));
  const auto scales = geometric_scales(base, first, last);
  const double eps = c.params.real("eps", scales.front());
  const double eta = c.params.real("eta", 0.5);
  const double osc_tol = c.params.real("oscillation_tol", 0.05);

  const auto slice = slice_dimension(c.sys, 0, depth, scales);
  const auto boxes = lambda_outer_approximation(c.sys, depth, c.cfg.cap);
  const auto planar = box_counting(boxes, scales, std::pow(c.sys.chi_s(), static_cast<double>(depth)));
  auto w = c.csv("box_counts.csv", {"set", "scale", "count"});
  for (std::size_t i = 0; i < scales.size(); ++i) w.cell("slice").cell(scales[i]).cell(std::size_t{slice.counts[i]}).end_row();
  for (std::size_t i = 0; i < scales.size(); ++i) w.cell("lambda").cell(scales[i]).cell(std::size_t{planar.counts[i]}).end_row();

  const auto th = n_of_eps_eta(planar, c.sys.chi_s(), eps, eta);
  auto t = c.csv("threshold.csv", {"eps", "eta", "N0", "n_min", "n_formula"});
  t.cell(eps).cell(eta).cell(std::size_t{planar.count_at(eps)}).cell(th.n_min).cell(th.n_formula).end_row();
  const auto osc = oscillation_check(c.sys, planar.dimension, depth, scales);

  c.note("slice_dimension", slice.dimension);
  c.note("lambda_box_dimension", planar.dimension);
  c.note("N0(eps)", std::to_string(planar.count_at(eps)));
  c.note("n_min", std::to_string(th.n_min));
  c.note("n_formula", std::to_string(th.n_formula));
  c.note("oscillation_bound", osc.bound);
  c.note("oscillation_observed", osc.observed);
  c.verdict({"threshold-order", "n_formula >= n_min when N0 <= eps^-4",
             static_cast<double>(th.n_formula), static_cast<double>(th.n_min), 0.0, th.consistent, true});
  c.verdict({"oscillation-bound", "|delta_s(x) - delta_s(y)| <= dimB log chi_u / log(1/chi_s)",
             osc.observed, osc.bound, 0.0, osc.passed, true});
  c.verdict({"oscillation-observed", "observed stable-dimension oscillation is small", osc.observed,
             0.0, osc_tol, osc.observed <= osc_tol, true});
  c.lap("dimension");
}

void run_theorems(Ctx& c, bool bracket_only) {
  DimensionConfig dc;
  dc.slice_depth = static_cast<std::size_t>(c.params.integer("slice_depth", 8));
  if (c.params.has("eps")) dc.eps = c.params.real("eps");
  dc.m_range = c.params.range("m_range", dc.m_range);
  dc.n_values = c.params.sizes("n", dc.n_values);
  dc.eta = c.params.real("eta", dc.eta);
  dc.tol = c.params.real("tol", dc.tol);
  dc.tol_eq = c.params.real("tol_eq", dc.tol_eq);
  dc.tol_box = c.params.real("tol_box", dc.tol_box);
  dc.compute_tsn = c.params.flag("compute_tsn", !bracket_only);
  dc.cover = c.cover();
  dc.profile = c.profile();
  const auto r = stable_dimension_report(c.sys, dc);
  c.text("report.txt", to_text(r));
  if (!r.tsn.empty()) {
    auto w = c.csv("tsn.csv", {"n", "eps", "root", "lo", "hi"});
    for (const auto& row : r.tsn) w.cell(row.n).cell(row.eps).cell(row.root).cell(row.lo).cell(row.hi).end_row();
  }
  c.note("delta_box", r.delta_box.dimension);
  c.note("delta_oracle", r.delta_oracle ? fmt(*r.delta_oracle) : "none");
  c.note("d_prime", std::to_string(r.d_prime));
  c.note("d_dprime", std::to_string(r.d_dprime));
  c.note("t_s0(d')", r.t_s0_dprime);
  c.note("t_s0(d'')", r.t_s0_ddprime);
  for (const auto& row : r.tsn) c.note("t_s_n(n=" + std::to_string(row.n) + ")", row.root);
  for (const auto& v : r.verdicts) {
    if (!bracket_only || v.id.rfind("bracket", 0) == 0) c.verdict(v);
  }
  c.lap("report");
}

void run_prop4a(Ctx& c) {
  const double eps = c.params.real("eps", c.sys.eps0() / 4.0);
  const auto ns = c.params.sizes("n", {1, 2});
  const auto m1 = c.params.range("m_range", {4, 5, 6, 7, 8});
  const auto mn = c.params.range("m_range_iterate", {2, 3, 4, 5});
  const double tol = c.params.real("tol", 0.05);
  const auto ts = c.params.reals("t_grid", {0.0, 0.5, 1.0});
  const auto opt1 = c.cover();
  const auto optn = c.cover("anchor_offset_iterate", 2);
  const bool has_rho = c.params.has("rho");
  const double rho = has_rho ? c.params.real("rho") : 0.0;

  auto w = c.csv("prop4a.csv", {"n", "eps", "root", "lo", "hi"});
  std::map<std::size_t, double> roots;
  for (auto n : ns) {
    const auto r = t_s_n_eps(c.sys, n, eps, n == 1 ? m1 : mn, 1e-6, n == 1 ? opt1 : optn);
    w.cell(n).cell(eps).cell(r.root.t_star).cell(r.root.lo).cell(r.root.hi).end_row();
    roots[n] = r.root.t_star;
    c.note("t_s_n(eps, n=" + std::to_string(n) + ")", r.root.t_star);
  }
  for (auto [n, root] : roots) {
    if (n == 1 || !roots.count(1)) continue;
    c.verdict({"order-n" + std::to_string(n), "t_s_1(eps) >= t_s_n(eps)", roots[1], root, tol,
               roots[1] >= root - tol, true});
  }
  c.lap("roots");

  if (c.sys.affine()) {
    const auto phi = Potential::depth1(stable_potential(c.sys), "phi_s");
    auto p = c.csv("pressure_identity.csv", {"n", "t", "iterate", "n_times_base"});
    double worst = 0.0;
    for (auto n : ns) {
      const auto it = iterate_system(c.sys, n);
      const auto phin = Potential::depth1(stable_potential(it), "phi_s^n");
      for (double t : ts) {
        const double a = pressure_exact(it.transitions(), phin, t, 0.0).value;
        const double b = static_cast<double>(n) * pressure_exact(c.sys.transitions(), phi, t, 0.0).value;
        p.cell(n).cell(t).cell(a).cell(b).end_row();
        worst = std::max(worst, std::abs(a - b));
      }
    }
    c.verdict({"iterate-pressure", "P_{f^n}(t phi_s^n) = n P_f(t phi_s)", worst, 0.0, 1e-9,
               worst <= 1e-9, true});
    c.lap("pressure_identity");
  }

  if (has_rho) {
    auto r = c.csv("rho_schedule.csv", {"n", "rho_n", "root"});
    std::vector<double> rs;
    for (auto n : ns) {
      const double rn = rho_schedule(eps, rho, n, c.sys.chi_u(), c.sys.eps0());
      const auto res = t_s_n_eps(c.sys, n, rn, n == 1 ? m1 : mn, 1e-6, n == 1 ? opt1 : optn);
      r.cell(n).cell(rn).cell(res.root.t_star).end_row();
      rs.push_back(res.root.t_star);
      c.note("t_s_n(rho_n, n=" + std::to_string(n) + ")", res.root.t_star);
    }
    const double spread = *std::max_element(rs.begin(), rs.end()) - *std::min_element(rs.begin(), rs.end());
    c.verdict({"rho-stability", "t_s_n(rho_n) independent of n", spread, 0.0, 0.1, spread <= 0.1, false});
    c.lap("rho_schedule");
  }
}

void run_distortion(Ctx& c) {
  const double eps = c.params.real("eps", c.sys.eps0() / 4.0);
  const auto max_len = static_cast<std::size_t>(c.params.integer("max_len", 12));
  const auto pairs = static_cast<std::size_t>(c.params.integer("pairs", 2000));
  const double tol = c.params.real("stability_tol", 0.05);
  auto w = c.csv("distortion.csv", {"pairs", "c1", "min_ratio", "max_ratio"});
  std::vector<DistortionSample> samples;
  for (std::size_t n : {pairs, 2 * pairs}) {
    const auto s = measure_distortion(c.sys, eps, max_len, n, *c.cfg.seed);
    w.cell(n).cell(s.c1).cell(s.min_ratio).cell(s.max_ratio).end_row();
    samples.push_back(s);
    c.note("C1(pairs=" + std::to_string(n) + ")", s.c1);
  }
  const double rel = std::abs(samples[1].c1 - samples[0].c1) / samples[0].c1;
  c.verdict({"c1-stable", "C1 stable under doubling the sample", rel, 0.0, tol, rel <= tol, true});
  for (const auto& s : samples) {
    if (!(s.min_ratio >= 1.0 / s.c1 && s.max_ratio <= s.c1)) {
      c.verdict({"c1-range", "ratios within [1/C1, C1]", s.min_ratio, s.c1, 0.0, false, true});
    }
  }
  if (c.sys.affine()) {
    c.verdict({"affine-unit", "affine fibers have distortion ratio 1", samples[1].c1, 1.0, 0.0,
               samples[0].c1 == 1.0 && samples[1].c1 == 1.0, true});
  }
  c.lap("distortion");
}

using Runner = std::function<void(Ctx&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r = {
      {"validate", run_validate},
      {"pressure", run_pressure},
      {"inverse-pressure", run_inverse_pressure},
      {"dimension", run_dimension},
      {"verify-theorems", [](Ctx& c) { run_theorems(c, false); }},
      {"verify-cor-ultimul", [](Ctx& c) { run_theorems(c, true); }},
      {"verify-prop4a", run_prop4a},
      {"distortion-propC", run_distortion},
  };
  return r;
}

}  // namespace

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> r = {
      {"validate", "check a model and report its invariants and preimage profile",
       "Markov base, contracting fibers, d' and d''", true, {}},
      {"pressure", "exact and spanning pressure on a t-grid, with Bowen roots",
       "P(t phi - c) = log spectral radius; t_s0(d') zero of P(t phi_s - log d')", true,
       {"potential", "t_grid", "c", "spanning_n", "spanning_eps", "roots"}},
      {"inverse-pressure", "growth rate of the fixed-length cover quantity Q_m over m and eps",
       "P^-(phi) = lim_eps limsup_m (1/m) log Q_m(phi, eps)", false,
       {"t", "shift", "eps", "m_range", "anchor_offset", "breakdown", "expect", "expect_tol"}},
      {"dimension", "box counts, n(eps, eta) threshold and the oscillation bound",
       "N0(eps) chi_s^{n eta} < 1; |delta_s(x) - delta_s(y)| <= dimB log chi_u / log(1/chi_s)", false,
       {"depth", "scale_base", "scale_first", "scale_last", "eps", "eta", "oscillation_tol"}},
      {"verify-theorems", "stable dimension against t_s_n(eps) and t_s0(d')",
       "delta_s <= t_s_n(eps); delta_s = t_s0(d') for open maps", true,
       {"slice_depth", "eps", "m_range", "n", "eta", "tol", "tol_eq", "tol_box", "compute_tsn",
        "anchor_offset"}},
      {"verify-cor-ultimul", "stable dimension inside the [t_s0(d''), t_s0(d')] bracket",
       "t_s0(d'') <= delta_s <= t_s0(d')", true,
       {"slice_depth", "eps", "m_range", "n", "eta", "tol", "tol_eq", "tol_box", "compute_tsn",
        "anchor_offset"}},
      {"verify-prop4a", "root ordering over iterates and the rho_n schedule",
       "t_s_n(eps) >= t_s_np(eps); t_s_n(rho_n) = t_s", false,
       {"eps", "n", "m_range", "m_range_iterate", "tol", "t_grid", "anchor_offset",
        "anchor_offset_iterate", "rho"}},
      {"distortion-propC", "bounded distortion along shadowed prehistories",
       "|Df_s^m(y_-m)| / |Df_s^m(x_-m)| in [1/C1, C1]", true,
       {"eps", "max_len", "pairs", "stability_tol"}},
  };
  return r;
}

void check_config(const ExperimentConfig& cfg) {
  const auto& reg = registry();
  const auto info = std::find_if(reg.begin(), reg.end(),
                                 [&](const ExperimentInfo& e) { return e.name == cfg.experiment; });
  if (info == reg.end()) {
    throw Error(ErrorCode::kConfigInvalid, "$.experiment: unknown experiment '" + cfg.experiment + "'");
  }
  if (info->sampling && !cfg.seed) {
    throw Error(ErrorCode::kConfigInvalid, "$.seed: required by sampling experiment '" + cfg.experiment + "'");
  }
  for (const auto& [key, value] : cfg.params.items()) {
    if (std::find(info->params.begin(), info->params.end(), key) == info->params.end()) {
      throw Error(ErrorCode::kConfigInvalid, "$.params." + key + ": unknown key");
    }
  }
  (void)build_model(cfg.model);
}

RunOutcome run_experiment(const ExperimentConfig& cfg, const fs::path& out, bool strict) {
  check_config(cfg);
  fs::create_directories(out);
  Ctx c(cfg, out);
  runners().at(cfg.experiment)(c);
  c.params.finish();

  RunOutcome res;
  {
    auto w = c.csv("verdicts.csv", {"id", "anchor", "lhs", "rhs", "tol", "passed", "required"});
    for (const auto& v : c.verdicts) {
      w.cell(v.id).cell(v.anchor).cell(v.lhs).cell(v.rhs).cell(v.tol);
      w.cell(std::string(v.passed ? "true" : "false")).cell(std::string(v.required ? "true" : "false"));
      w.end_row();
      if (!v.passed && (v.required || strict)) res.exit_code = 1;
    }
  }
  std::string summary = "experiment: " + cfg.experiment + "\nmodel: " + c.sys.id() + "\n";
  std::size_t width = 0;
  for (const auto& [k, v] : c.summary) width = std::max(width, k.size());
  for (const auto& [k, v] : c.summary) summary += k + std::string(width - k.size() + 2, ' ') + v + "\n";
  for (const auto& v : c.verdicts) {
    summary += "verdict " + v.id + ": " + (v.passed ? "pass" : "FAIL") +
               (v.required ? "" : " (informational)") + "  [" + v.anchor + "]\n";
  }
  c.text("summary.txt", summary);

  nlohmann::json rec;
  rec["toolkit_version"] = kToolkitVersion;
  rec["experiment"] = cfg.experiment;
  rec["config_sha256"] = sha256_hex(cfg.canonical);
  rec["exit_code"] = res.exit_code;
  for (const auto& [k, t] : c.timings) rec["timings_seconds"][k] = t;
  for (const auto& f : c.files) {
    rec["outputs"].push_back({{"file", f}, {"sha256", sha256_file(out / f)}});
  }
  std::ofstream(out / "run_record.json", std::ios::binary) << rec.dump(2) << '\n';

  res.summary = std::move(c.summary);
  res.verdicts = std::move(c.verdicts);
  res.files = std::move(c.files);
  res.files.push_back("run_record.json");
  return res;
}

}  // namespace invp::runner
