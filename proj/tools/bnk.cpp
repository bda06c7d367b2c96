// bnk: output gaps, break tests, simulation, calibration and robustness
// checks for the behavioral New Keynesian model.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "bnk/error.hpp"
#include "commands.hpp"

namespace {

int exit_code(bnk::ErrorKind kind) {
  return kind == bnk::ErrorKind::io || kind == bnk::ErrorKind::usage ? 2 : 1;
}

void report_error(std::string_view kind, std::string msg) {
  for (char& c : msg) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::fprintf(stderr, "error[%.*s]: %s\n", static_cast<int>(kind.size()), kind.data(), msg.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bnk::cli;
  CLI::App app{"Behavioral New Keynesian toolkit: output gaps, break tests, simulation and calibration.", "bnk"};
  app.set_version_flag("--version", "bnk 1.0.0");
  app.require_subcommand(1);

  Common common;
  app.add_option("-c,--config", common.config_path, "JSON run configuration (comments allowed)");
  app.add_option("-o,--out-dir", common.out_dir, "Output directory (overrides $BNK_OUTPUT_DIR and the config)");

  int rc = 0;

  GapOptions gap;
  auto* g = app.add_subcommand("gap", "Estimate HP and Kalman output gaps from a FRED GDP csv");
  g->add_option("gdp", gap.gdp_csv, "FRED real GDP csv (default: configured data file)");
  g->add_option("--cpi", gap.cpi_csv, "FRED CPI csv; adds the inflation series");
  g->add_option("--filter", gap.filter, "hp, kalman or both")->check(CLI::IsMember({"hp", "kalman", "both"}))->capture_default_str();
  g->add_option("--lambda", gap.lambda, "HP smoothing parameter (default 1600)");
  g->add_option("--kalman-variant", gap.kalman_variant, "local_linear_trend or summed_measurement")
      ->check(CLI::IsMember({"local_linear_trend", "summed_measurement"}));
  g->add_option("--kalman-v", gap.kalman_v, "Kalman measurement variance V");
  g->add_option("--out", gap.out, "SVG chart path (default: <out-dir>/output_gap.svg)");
  g->callback([&] { rc = cmd_gap(common, gap); });

  BreakOptions brk;
  auto* b = app.add_subcommand("break", "Likelihood-ratio (ANOVA) test for a mean shift in a dated gap csv");
  b->add_option("gap", brk.gap_csv, "Dated csv (date,value)")->required();
  b->add_option("--break-date", brk.break_date, "Break quarter, the last one in the pre-break regime")
      ->capture_default_str();
  b->add_option("--out", brk.out, "JSON record path");
  b->callback([&] { rc = cmd_break(common, brk); });

  SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Simulate the model and write the path as csv");
  s->add_option("--model", sim.model, "behavioral or rational")
      ->check(CLI::IsMember({"behavioral", "rational"}))
      ->capture_default_str();
  s->add_option("--seed", sim.seed, "Noise seed");
  s->add_option("--eps1", sim.eps1, "Initial demand shock");
  s->add_option("--eta1", sim.eta1, "Initial supply shock");
  s->add_option("--rho-eps", sim.rho_eps, "Demand shock persistence");
  s->add_option("--rho-eta", sim.rho_eta, "Supply shock persistence");
  s->add_option("--noise", sim.noise, "none, white or ar1")->check(CLI::IsMember({"none", "white", "ar1"}));
  s->add_option("--noise-rho", sim.noise_rho, "AR(1) noise persistence");
  s->add_option("--periods", sim.periods, "Number of simulated quarters");
  s->add_option("--out", sim.out, "CSV path (default: <out-dir>/sim_<model>.csv)");
  s->callback([&] { rc = cmd_simulate(common, sim); });

  CalibrateOptions cal;
  auto* c = app.add_subcommand("calibrate", "Grid search over (eta1, rho_eps, rho_eta) by Mahalanobis distance");
  c->add_option("--filter", cal.filter, "Output gap measure: hp or kalman")
      ->check(CLI::IsMember({"hp", "kalman"}))
      ->capture_default_str();
  c->add_option("--model", cal.model, "behavioral or rational")
      ->check(CLI::IsMember({"behavioral", "rational"}))
      ->capture_default_str();
  c->add_option("--eta1", cal.eta1, "Axis as lo:hi:step or a single value");
  c->add_option("--rho-eps", cal.rho_eps, "Axis as lo:hi:step or a single value");
  c->add_option("--rho-eta", cal.rho_eta, "Axis as lo:hi:step or a single value");
  c->add_option("--seeds", cal.seeds, "Simulations averaged per grid point");
  c->add_option("--seed", cal.seed, "Base seed");
  c->add_option("--eps1", cal.eps1, "Initial demand shock (default -0.27 hp, -0.18 kalman)");
  c->add_option("-j,--jobs", cal.jobs, "Worker threads (default: hardware concurrency)");
  c->add_option("--checkpoint", cal.checkpoint, "Checkpoint file; resumes when present");
  c->add_option("--strategy", cal.strategy, "two_obs or paired_series")
      ->check(CLI::IsMember({"two_obs", "paired_series"}));
  c->add_option("--data-means", cal.data_means, "Actual means as y,pi (skips the data files)");
  c->add_option("--data-variance", cal.data_variance, "Diagonal data covariance as var_y,var_pi");
  c->add_option("--max-points", cal.max_points, "Stop after evaluating this many new points");
  c->add_option("--out", cal.out, "Results csv path");
  c->callback([&] { rc = cmd_calibrate(common, cal); });

  RobustnessOptions rob;
  auto* r = app.add_subcommand("robustness", "Jarque-Bera normality of both models under AR(1) shocks");
  r->add_option("--seed", rob.seed, "Seed of the first run");
  r->add_option("--window", rob.window, "Observation window as begin:end")->capture_default_str();
  r->add_option("--runs", rob.runs, "Number of seeds; >1 adds rejection frequencies")->capture_default_str();
  r->add_option("--out", rob.out, "JSON record path");
  r->callback([&] { rc = cmd_robustness(common, rob); });

  ReportOptions rep;
  auto* p = app.add_subcommand("report", "Print and merge JSON records written by the other commands");
  p->add_option("inputs", rep.inputs, "Record files (default: every .json in the output directory)");
  p->add_option("--out", rep.out, "Merged JSON path (default: <out-dir>/report.json)");
  p->callback([&] { rc = cmd_report(common, rep); });

  FetchOptions fet;
  auto* f = app.add_subcommand("fetch", "Download fresh FRED csv files to the configured data paths");
  f->add_flag("--allow-network", fet.allow_network, "Required: permit network access");
  f->add_option("--series", fet.series, "gdp, cpi or both")->check(CLI::IsMember({"gdp", "cpi", "both"}))->capture_default_str();
  f->callback([&] { rc = cmd_fetch(common, fet); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  } catch (const bnk::Error& e) {
    report_error(bnk::to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return rc;
}
