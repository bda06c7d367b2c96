#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "bnk/bnk.hpp"

namespace bnk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

RunConfig load(const Common& c) { return c.config_path.empty() ? RunConfig{} : load_config(c.config_path); }

/// --out-dir, then $BNK_OUTPUT_DIR, then the config file.
std::string output_dir(const Common& c, const RunConfig& cfg) {
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("BNK_OUTPUT_DIR"); env != nullptr && *env != '\0') dir = env;
  if (!c.out_dir.empty()) dir = c.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create output directory '" + dir + "': " + ec.message());
  return dir;
}

std::string in_dir(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) fail(ErrorKind::io, "cannot create directory '" + parent.string() + "'");
}

void write_json(const std::string& path, const json& j) {
  ensure_parent(path);
  write_file(path, j.dump(2) + "\n");
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent(path);
  write_file(path, text);
}

std::string num(double v, const char* f = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Quarter quarter_arg(const std::string& s, const char* flag) {
  try {
    return Quarter::parse(s);
  } catch (const Error& e) {
    fail(ErrorKind::usage, std::string(flag) + ": " + e.what());
  }
}

std::vector<double> number_list(const std::string& s, char sep, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = std::min(s.find(sep, pos), s.size());
    const auto v = detail::parse_number(detail::trim(std::string_view(s).substr(pos, next - pos)));
    if (!v) fail(ErrorKind::usage, std::string(flag) + ": malformed number list '" + s + "'");
    out.push_back(*v);
    pos = next + 1;
  }
  if (out.size() != expected) {
    fail(ErrorKind::usage, std::string(flag) + ": expected " + std::to_string(expected) + " values in '" + s + "'");
  }
  return out;
}

GridAxis axis_arg(const std::string& s, const char* flag) {
  if (s.find(':') == std::string::npos) {
    const double v = number_list(s, ':', 1, flag)[0];
    return {v, v, 0.0};
  }
  const auto v = number_list(s, ':', 3, flag);
  GridAxis a{v[0], v[1], v[2]};
  a.validate(flag);
  return a;
}

json moments_or_note(const std::vector<double>& x) {
  try {
    return to_report(moments(x));
  } catch (const Error& e) {
    return {{"n", x.size()}, {"mean", detail::number(mean_of(x))}, {"note", e.what()}};
  }
}

Empirics load_empirics(const RunConfig& cfg) {
  const QuarterlySeries gdp = parse_fred_csv(read_file(cfg.data.gdp_csv));
  const QuarterlySeries cpi = parse_fred_csv(read_file(cfg.data.cpi_csv));
  return build_empirics(gdp, cpi, cfg.data.empirics);
}

const char* palette(std::size_t k) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  return colors[k % 4];
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_gap(const Common& common, const GapOptions& o) {
  RunConfig cfg = load(common);
  const std::string dir = output_dir(common, cfg);
  EmpiricalOptions& e = cfg.data.empirics;
  if (o.lambda) e.hp_lambda = *o.lambda;
  if (o.kalman_variant == "summed_measurement") e.kalman = KalmanSpec::summed_measurement();
  if (o.kalman_v) e.kalman.V = *o.kalman_v;
  validate(e.kalman);

  const std::string gdp_path = o.gdp_csv.empty() ? cfg.data.gdp_csv : o.gdp_csv;
  const std::string cpi_path = !o.cpi_csv.empty() ? o.cpi_csv : (o.gdp_csv.empty() ? cfg.data.cpi_csv : "");
  const QuarterlySeries gdp = parse_fred_csv(read_file(gdp_path));

  // The configured sample, clipped to what the file covers.
  const Quarter begin = std::max(e.sample_begin, gdp.start);
  const Quarter end = std::min(e.sample_end, gdp.end());
  if (begin > end) fail(ErrorKind::coverage, "GDP series does not overlap the configured sample");
  const QuarterlySeries log_gdp = log_series(gdp.slice(begin, end));

  const bool want_hp = o.filter != "kalman";
  const bool want_kalman = o.filter != "hp";
  json report = {{"sample", {{"begin", begin.to_string()}, {"end", end.to_string()}}}, {"observations", log_gdp.size()}};

  LineChart chart;
  chart.title = "Quarterly output gap";
  chart.y_label = "log deviation from trend";
  for (std::size_t k = 0; k < log_gdp.size(); ++k) chart.x_labels.push_back(log_gdp.date(k).to_string());

  auto emit = [&](QuarterlySeries gap, const std::string& key, const std::string& label) {
    gap.id = key;
    const std::string path = in_dir(dir, key + ".csv");
    write_text(path, to_dated_csv(gap));
    json r = {{"csv", path}};
    if (gap.contains(covid_start)) {
      r["q1_2020"] = gap.at(covid_start);
      std::cout << label << " gap 2020Q1: " << num(gap.at(covid_start)) << "\n";
    }
    try {
      const QuarterlySeries w = covid_window(gap, e.window_quarters);
      r["window"] = moments_or_note(w.values);
      std::cout << label << " window mean: " << num(mean_of(w.values)) << "\n";
    } catch (const Error&) {
      r["window"] = nullptr;
    }
    report[key] = r;
    ChartSeries s{label, std::vector<double>(log_gdp.size(), std::nan("")), palette(chart.series.size())};
    for (std::size_t k = 0; k < gap.size(); ++k) s.values[static_cast<std::size_t>(gap.date(k) - log_gdp.start)] = gap.values[k];
    chart.series.push_back(std::move(s));
    std::cout << "wrote " << path << "\n";
  };
  if (want_hp) emit(hp_gap_series(log_gdp, e.hp_lambda), "hp_gap", "HP filter");
  if (want_kalman) emit(kalman_gap_series(log_gdp, e.kalman), "kalman_gap", "Kalman filter");

  if (!cpi_path.empty()) {
    const QuarterlySeries cpi = parse_fred_csv(read_file(cpi_path));
    const Quarter from = cpi.contains(begin - 1) ? begin - 1 : std::max(begin, cpi.start);
    const QuarterlySeries inflation = qoq_inflation(rebase(cpi.slice(from, std::min(end, cpi.end())), e.cpi_base));
    const std::string path = in_dir(dir, "inflation.csv");
    write_text(path, to_dated_csv(inflation));
    json r = {{"csv", path}, {"cpi_base", e.cpi_base.to_string()}};
    try {
      const QuarterlySeries w = covid_window(inflation, e.window_quarters);
      r["window"] = moments_or_note(w.values);
      std::cout << "inflation window mean: " << num(mean_of(w.values)) << "\n";
    } catch (const Error&) {
      r["window"] = nullptr;
    }
    report["inflation"] = r;
    std::cout << "wrote " << path << "\n";
  }

  const std::string svg = o.out.empty() ? in_dir(dir, "output_gap.svg") : o.out;
  write_text(svg, render_svg(chart));
  write_json(in_dir(dir, "gap.json"), report);
  std::cout << "wrote " << svg << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_break(const Common& common, const BreakOptions& o) {
  const RunConfig cfg = load(common);
  const Quarter at = quarter_arg(o.break_date, "--break-date");
  const QuarterlySeries gap = parse_dated_csv(read_file(o.gap_csv));
  if (!gap.contains(at)) {
    fail(ErrorKind::coverage, "break date " + at.to_string() + " outside series " + gap.start.to_string() + ".." +
                                  gap.end().to_string());
  }
  const auto n_pre = static_cast<std::size_t>(at - gap.start) + 1;
  const BreakTest t = lr_break_test(gap.values, n_pre);

  std::printf("Analysis of Variance Table: break at %s (%s..%s, %zu + %zu obs)\n\n", at.to_string().c_str(),
              gap.start.to_string().c_str(), gap.end().to_string().c_str(), t.n_pre, t.n_post);
  std::printf("Model 1: single mean\nModel 2: separate means before/after the break\n\n");
  std::printf("  Res.Df        RSS  Df  Sum of Sq          F     Pr(>F)\n");
  std::printf("1 %6ld %10.5f\n", t.df1, t.rss1);
  if (t.exact_fit) {
    std::printf("2 %6ld %10.5f %3ld %10.5f        inf  < 2.2e-16\nexact fit: post-break residuals vanish\n", t.df2,
                t.rss2, t.df1 - t.df2, t.ss);
  } else {
    std::printf("2 %6ld %10.5f %3ld %10.5f %10.4f %10.4g\n", t.df2, t.rss2, t.df1 - t.df2, t.ss, t.f_stat, t.p);
  }
  json j = to_report(t);
  j["break_date"] = at.to_string();
  j["series"] = gap.id;
  const std::string path = o.out.empty() ? in_dir(output_dir(common, cfg), "break_" + gap.id + ".json") : o.out;
  write_json(path, j);
  std::cout << "\nwrote " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& common, const SimulateOptions& o) {
  RunConfig cfg = load(common);
  const ModelKind model = parse_model_kind(o.model);
  ShockScenario& s = cfg.scenario;
  if (o.eps1) s.eps1 = *o.eps1;
  if (o.eta1) s.eta1 = *o.eta1;
  if (o.rho_eps) s.rho_eps = *o.rho_eps;
  if (o.rho_eta) s.rho_eta = *o.rho_eta;
  SimConfig& sim = cfg.sim;
  if (o.seed) sim.seed = *o.seed;
  if (!o.noise.empty()) sim.noise_mode = parse_noise_mode(o.noise);
  if (o.noise_rho) sim.noise_rho = *o.noise_rho;
  if (o.periods) sim.T = *o.periods;

  const SimPath path =
      model == ModelKind::behavioral ? simulate_behavioral(cfg.params, s, sim) : simulate_rational(cfg.params, s, sim);
  const Window w = extract_window(path, s.t0, sim.window_len);

  const std::string dir = output_dir(common, cfg);
  const std::string csv = o.out.empty() ? in_dir(dir, "sim_" + std::string(to_string(model)) + ".csv") : o.out;
  std::ostringstream os;
  write_csv(os, path);
  write_text(csv, os.str());

  json j = {{"model", to_string(model)},
            {"seed", sim.seed},
            {"noise", to_string(sim.noise_mode)},
            {"periods", sim.T},
            {"window", {{"begin", s.t0}, {"end", s.t0 + sim.window_len - 1}}},
            {"output_gap", moments_or_note(w.y)},
            {"inflation", moments_or_note(w.pi)},
            {"csv", csv}};
  write_json(fs::path(csv).replace_extension(".json").string(), j);
  std::printf("%s model, seed %llu, window %d..%d\n", std::string(to_string(model)).c_str(),
              static_cast<unsigned long long>(sim.seed), s.t0, s.t0 + sim.window_len - 1);
  std::printf("mean output gap  %.4f\nmean inflation   %.4f\n", mean_of(w.y), mean_of(w.pi));
  std::cout << "wrote " << csv << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_calibrate(const Common& common, const CalibrateOptions& o) {
  RunConfig cfg = load(common);
  if (o.filter != "hp" && o.filter != "kalman") fail(ErrorKind::usage, "--filter: expected hp|kalman");
  const bool hp = o.filter == "hp";

  CalibrationContext ctx;
  ctx.model = parse_model_kind(o.model);
  ctx.eps1 = o.eps1 ? *o.eps1 : (hp ? -0.27 : -0.18);
  ctx.params = cfg.params;
  ctx.scenario = cfg.scenario;
  ctx.sim = cfg.sim;
  if (o.seed) ctx.sim.seed = *o.seed;
  ctx.mspec = cfg.mahalanobis;
  if (!o.strategy.empty()) ctx.mspec.strategy = parse_mahalanobis_strategy(o.strategy);

  GridSpec grid = cfg.grid;
  if (!o.eta1.empty()) grid.eta1 = axis_arg(o.eta1, "--eta1");
  if (!o.rho_eps.empty()) grid.rho_eps = axis_arg(o.rho_eps, "--rho-eps");
  if (!o.rho_eta.empty()) grid.rho_eta = axis_arg(o.rho_eta, "--rho-eta");
  if (o.seeds) grid.seeds_per_point = *o.seeds;

  std::string data_source;
  if (!o.data_means.empty()) {
    const auto m = number_list(o.data_means, ',', 2, "--data-means");
    ctx.data_means = Vec2(m[0], m[1]);
    data_source = "command line";
  } else {
    const Empirics e = load_empirics(cfg);
    const QuarterlySeries& gap = hp ? e.hp_window : e.kalman_window;
    ctx.data_means = Vec2(mean_of(gap.values), mean_of(e.inflation_window.values));
    ctx.data_covariance = paired_covariance(gap.values, e.inflation_window.values);
    data_source = cfg.data.gdp_csv + ", " + cfg.data.cpi_csv;
  }
  if (!o.data_variance.empty()) {
    const auto v = number_list(o.data_variance, ',', 2, "--data-variance");
    ctx.data_covariance = Mat2{{v[0], 0.0}, {0.0, v[1]}};
  }
  if (ctx.mspec.strategy == MahalanobisStrategy::paired_series && !ctx.data_covariance) {
    fail(ErrorKind::configuration, "paired_series needs the data files or --data-variance");
  }

  RunOptions run;
  run.jobs = o.jobs ? *o.jobs : std::max(1u, std::thread::hardware_concurrency());
  run.checkpoint_path = o.checkpoint;
  run.stop_after = o.max_points;
  const GridOutcome out = run_grid(grid, ctx, run);

  const std::string dir = output_dir(common, cfg);
  const std::string stem = "calibration_" + o.filter + "_" + std::string(to_string(ctx.model));
  const std::string csv = o.out.empty() ? in_dir(dir, stem + ".csv") : o.out;
  write_text(csv, results_csv(out.ranked));

  std::printf("%s model, %s gap, eps1 = %.2f, %zu points (%zu evaluated, %zu resumed), %d seed(s) per point\n",
              std::string(to_string(ctx.model)).c_str(), o.filter.c_str(), ctx.eps1, grid.size(), out.evaluated,
              out.resumed, grid.seeds_per_point);
  std::printf("data means: output gap %.4f, inflation %.4f (%s)\n", ctx.data_means(0), ctx.data_means(1),
              data_source.c_str());
  json j = {{"model", to_string(ctx.model)},
            {"filter", o.filter},
            {"eps1", ctx.eps1},
            {"strategy", to_string(ctx.mspec.strategy)},
            {"points", grid.size()},
            {"complete", out.complete},
            {"data_means", {ctx.data_means(0), ctx.data_means(1)}},
            {"csv", csv}};
  if (!out.ranked.empty()) {
    const CalibrationResult& b = out.best();
    std::printf("best (eta1, rho_eps, rho_eta) = (%.4g, %.4g, %.4g)\n", b.point.eta1, b.point.rho_eps, b.point.rho_eta);
    std::printf("simulated means: output gap %.4f, inflation %.4f\n", b.mean_y, b.mean_pi);
    std::printf("Mahalanobis distance: %.4f\n", b.distance);
    j["best"] = to_report(b);
  }
  if (!out.complete) std::printf("grid incomplete; rerun with the same --checkpoint to resume\n");
  write_json(fs::path(csv).replace_extension(".json").string(), j);
  std::cout << "wrote " << csv << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_robustness(const Common& common, const RobustnessOptions& o) {
  const RunConfig cfg = load(common);
  RobustnessSpec spec;
  const auto w = number_list(o.window, ':', 2, "--window");
  if (w[0] != std::floor(w[0]) || w[1] != std::floor(w[1])) fail(ErrorKind::usage, "--window: expected integers");
  spec.window_begin = static_cast<int>(w[0]);
  spec.window_end = static_cast<int>(w[1]);
  if (o.runs < 1) fail(ErrorKind::usage, "--runs must be >= 1");
  const std::uint64_t seed = o.seed ? *o.seed : cfg.sim.seed;

  const RobustnessRun r = robustness_run(cfg.params, cfg.scenario, cfg.sim, spec, seed);
  auto verdict = [](double p) { return p < 0.05 ? "non-normal" : "normal"; };
  std::printf("AR(1) shocks: rho %.2f, variance %.2f; observations %d..%d; seed %llu\n\n", spec.noise_rho,
              spec.noise_variance, spec.window_begin, spec.window_end, static_cast<unsigned long long>(seed));
  std::printf("%-11s %-10s %10s %10s  %s\n", "model", "series", "JB", "p", "verdict");
  for (const auto& [name, m] : {std::pair{"behavioral", r.behavioral}, std::pair{"rational", r.rational}}) {
    std::printf("%-11s %-10s %10.4f %10.4f  %s\n", name, "output", m.y.jb, m.y.p, verdict(m.y.p));
    std::printf("%-11s %-10s %10.4f %10.4f  %s\n", name, "inflation", m.pi.jb, m.pi.p, verdict(m.pi.p));
  }
  json j = {{"seed", seed},
            {"window", {spec.window_begin, spec.window_end}},
            {"behavioral", {{"output_gap", to_report(r.behavioral.y)}, {"inflation", to_report(r.behavioral.pi)}}},
            {"rational", {{"output_gap", to_report(r.rational.y)}, {"inflation", to_report(r.rational.pi)}}}};
  if (o.runs > 1) {
    const RejectionRates rates = rejection_rates(cfg.params, cfg.scenario, cfg.sim, spec, seed, o.runs);
    std::printf("\nshare of %d runs with p < 0.05\n", rates.runs);
    std::printf("%-11s output %.3f  inflation %.3f\n", "behavioral", rates.behavioral_y, rates.behavioral_pi);
    std::printf("%-11s output %.3f  inflation %.3f\n", "rational", rates.rational_y, rates.rational_pi);
    j["rejection_rates"] = {{"runs", rates.runs},
                            {"behavioral", {{"output_gap", rates.behavioral_y}, {"inflation", rates.behavioral_pi}}},
                            {"rational", {{"output_gap", rates.rational_y}, {"inflation", rates.rational_pi}}}};
  }
  const std::string path = o.out.empty() ? in_dir(output_dir(common, cfg), "robustness.json") : o.out;
  write_json(path, j);
  std::cout << "\nwrote " << path << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

namespace {

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_number_float()) {
    out.emplace_back(prefix, num(j.get<double>(), "%.6g"));
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

}  // namespace

int cmd_report(const Common& common, const ReportOptions& o) {
  const RunConfig cfg = load(common);
  const std::string dir = output_dir(common, cfg);
  const std::string target = o.out.empty() ? in_dir(dir, "report.json") : o.out;
  std::vector<std::string> inputs = o.inputs;
  if (inputs.empty()) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.path().extension() == ".json" && fs::absolute(entry.path()) != fs::absolute(target)) {
        inputs.push_back(entry.path().string());
      }
    }
    std::sort(inputs.begin(), inputs.end());
  }
  if (inputs.empty()) fail(ErrorKind::io, "no report records found in '" + dir + "'");

  json combined = json::object();
  for (const std::string& path : inputs) {
    json j;
    try {
      j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      fail(ErrorKind::parse, path + ": " + e.what());
    }
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(j, "", rows);
    std::cout << "== " << fs::path(path).filename().string() << "\n";
    std::size_t width = 0;
    for (const auto& [k, v] : rows) width = std::max(width, k.size());
    for (const auto& [k, v] : rows) std::printf("  %-*s  %s\n", static_cast<int>(width), k.c_str(), v.c_str());
    combined[fs::path(path).stem().string()] = std::move(j);
  }
  write_json(target, combined);
  std::cout << "wrote " << target << "\n";
  return 0;
}

}  // namespace bnk::cli
