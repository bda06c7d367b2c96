#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bnk::cli {

struct Common {
  std::string config_path;
  std::string out_dir;
};

struct GapOptions {
  std::string gdp_csv;
  std::string cpi_csv;
  std::string filter = "both";
  std::optional<double> lambda;
  std::string kalman_variant;
  std::optional<double> kalman_v;
  std::string out;
};

struct BreakOptions {
  std::string gap_csv;
  std::string break_date = "2020Q1";
  std::string out;
};

struct SimulateOptions {
  std::string model = "behavioral";
  std::optional<std::uint64_t> seed;
  std::optional<double> eps1, eta1, rho_eps, rho_eta;
  std::string noise;
  std::optional<double> noise_rho;
  std::optional<int> periods;
  std::string out;
};

struct CalibrateOptions {
  std::string filter = "hp";
  std::string model = "behavioral";
  std::string eta1, rho_eps, rho_eta;  // lo:hi:step or a single value
  std::optional<int> seeds;
  std::optional<std::uint64_t> seed;
  std::optional<double> eps1;
  std::optional<unsigned> jobs;
  std::string checkpoint;
  std::string strategy;
  std::string data_means;     // "y,pi"
  std::string data_variance;  // "var_y,var_pi"
  std::optional<std::size_t> max_points;
  std::string out;
};

struct RobustnessOptions {
  std::optional<std::uint64_t> seed;
  std::string window = "1000:1080";
  int runs = 1;
  std::string out;
};

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out;
};

struct FetchOptions {
  bool allow_network = false;
  std::string series = "both";
};

int cmd_gap(const Common&, const GapOptions&);
int cmd_break(const Common&, const BreakOptions&);
int cmd_simulate(const Common&, const SimulateOptions&);
int cmd_calibrate(const Common&, const CalibrateOptions&);
int cmd_robustness(const Common&, const RobustnessOptions&);
int cmd_report(const Common&, const ReportOptions&);
int cmd_fetch(const Common&, const FetchOptions&);

}  // namespace bnk::cli
