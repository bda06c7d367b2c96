#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "bnk/error.hpp"
#include "bnk/expectations.hpp"
#include "bnk/model.hpp"

namespace bnk {

/// Deterministic COVID demand shock and vaccination supply shock. Periods are
/// 1-based; t0 is the first quarter of the demand shock.
struct ShockScenario {
  double eps1 = -0.27;
  double rho_eps = 0.8;
  int demand_quarters = 10;
  double eta1 = 0.64;
  double rho_eta = 0.9;
  int supply_offset = 4;
  int supply_quarters = 6;
  int t0 = 1001;

  int demand_begin() const { return t0; }
  int demand_end() const { return t0 + demand_quarters - 1; }
  int supply_begin() const { return t0 + supply_offset; }
  int supply_end() const { return t0 + supply_offset + supply_quarters - 1; }

  bool operator==(const ShockScenario&) const = default;
};

enum class NoiseMode { none, white, ar1 };

inline std::string_view to_string(NoiseMode m) {
  switch (m) {
    case NoiseMode::none: return "none";
    case NoiseMode::white: return "white";
    case NoiseMode::ar1: return "ar1";
  }
  return "none";
}

inline NoiseMode parse_noise_mode(std::string_view s) {
  if (s == "none") return NoiseMode::none;
  if (s == "white") return NoiseMode::white;
  if (s == "ar1") return NoiseMode::ar1;
  fail(ErrorKind::configuration, "unknown noise mode '" + std::string(s) + "' (expected none|white|ar1)");
}

struct SimConfig {
  int T = 2000;
  int window_len = 16;
  std::uint64_t seed = 20200101;
  NoiseMode noise_mode = NoiseMode::white;
  double noise_sd_demand = 0.5;
  double noise_sd_supply = 0.5;
  double noise_rho = 0.0;  // used in ar1 mode only

  bool operator==(const SimConfig&) const = default;
};

struct SimPath {
  std::vector<double> y, pi, i;
  std::vector<double> alpha_y, alpha_pi;  // empty for rational runs
  std::vector<double> eps, eta;           // realized shocks incl. noise

  std::size_t size() const { return y.size(); }
  bool operator==(const SimPath&) const = default;
};

struct ShockPaths {
  std::vector<double> eps;
  std::vector<double> eta;
};

/// Pins the fundamentalist share instead of letting agents switch.
struct BehavioralOptions {
  std::optional<double> fixed_fundamentalist_share;
};

/// splitmix64 finalizer; mixes a base seed with a run index so streams do not
/// depend on scheduling order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline void check_scenario(const ShockScenario& s, int T) {
  if (s.demand_quarters < 0 || s.supply_quarters < 0 || s.supply_offset < 0) {
    fail(ErrorKind::configuration, "shock durations and offset must be non-negative");
  }
  if (s.t0 < 1 || s.demand_end() > T || s.supply_end() > T) {
    fail(ErrorKind::configuration, "shock window exceeds simulation horizon [1, " + std::to_string(T) + "]");
  }
}

inline void check_config(const SimConfig& cfg) {
  if (cfg.T < 1) fail(ErrorKind::configuration, "T must be positive");
  if (cfg.window_len < 1) fail(ErrorKind::configuration, "window_len must be positive");
  if (!(cfg.noise_sd_demand >= 0.0) || !(cfg.noise_sd_supply >= 0.0)) {
    fail(ErrorKind::configuration, "noise standard deviations must be non-negative");
  }
  if (cfg.noise_mode == NoiseMode::ar1 && !(std::abs(cfg.noise_rho) < 1.0)) {
    fail(ErrorKind::configuration, "ar1 noise requires |noise_rho| < 1");
  }
}

/// eps_t = rho_eps^(t - t0) * eps1 inside the demand window (rho^0 = 1 even
/// for rho = 0); eta likewise from its own start.
inline ShockPaths shock_path(const ShockScenario& s, int T) {
  check_scenario(s, T);
  ShockPaths out{std::vector<double>(T, 0.0), std::vector<double>(T, 0.0)};
  double v = s.eps1;
  for (int t = s.demand_begin(); t <= s.demand_end(); ++t, v *= s.rho_eps) out.eps[t - 1] = v;
  v = s.eta1;
  for (int t = s.supply_begin(); t <= s.supply_end(); ++t, v *= s.rho_eta) out.eta[t - 1] = v;
  return out;
}

/// Background innovations added to the demand and supply slots.
inline ShockPaths noise_path(const SimConfig& cfg) {
  ShockPaths out{std::vector<double>(cfg.T, 0.0), std::vector<double>(cfg.T, 0.0)};
  if (cfg.noise_mode == NoiseMode::none) return out;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double rho = cfg.noise_mode == NoiseMode::ar1 ? cfg.noise_rho : 0.0;
  double d = 0.0, s = 0.0;
  for (int k = 0; k < cfg.T; ++k) {
    const double ed = normal(rng);
    const double es = normal(rng);
    d = rho * d + cfg.noise_sd_demand * ed;
    s = rho * s + cfg.noise_sd_supply * es;
    out.eps[k] = d;
    out.eta[k] = s;
  }
  return out;
}

inline double noise_persistence(const SimConfig& cfg) {
  return cfg.noise_mode == NoiseMode::ar1 ? cfg.noise_rho : 0.0;
}

inline SimPath simulate_behavioral(const StructuralParams& p, const ShockScenario& s, const SimConfig& cfg,
                                   const BehavioralOptions& opts = {}) {
  check_config(cfg);
  const double kappa = compute_kappa(p);
  const ShockPaths scenario = shock_path(s, cfg.T);
  const ShockPaths noise = noise_path(cfg);

  const std::size_t T = static_cast<std::size_t>(cfg.T);
  SimPath path;
  for (auto* v : {&path.y, &path.pi, &path.i, &path.alpha_y, &path.alpha_pi, &path.eps, &path.eta}) {
    v->assign(T, 0.0);
  }

  ForecasterState output_rules;
  ForecasterState inflation_rules(p.pi_target);
  double y_prev = 0.0, pi_prev = 0.0, i_prev = 0.0;
  for (std::size_t k = 0; k < T; ++k) {
    const RuleForecasts f = behavioral_forecasts(y_prev, pi_prev, p);
    const double ey =
        output_rules.advance(y_prev, f.y_fund, f.y_ext, p.gamma, p.rho_mem, opts.fixed_fundamentalist_share);
    const double epi = inflation_rules.advance(pi_prev, f.pi_fund, f.pi_ext, p.gamma, p.rho_mem,
                                               opts.fixed_fundamentalist_share);
    const double eps = scenario.eps[k] + noise.eps[k];
    const double eta = scenario.eta[k] + noise.eta[k];
    const PeriodState st = solve_period(ey, epi, eps, eta, i_prev, p, kappa);

    path.y[k] = st.y;
    path.pi[k] = st.pi;
    path.i[k] = st.i;
    path.alpha_y[k] = output_rules.alpha_fund;
    path.alpha_pi[k] = inflation_rules.alpha_fund;
    path.eps[k] = eps;
    path.eta[k] = eta;
    y_prev = st.y;
    pi_prev = st.pi;
    i_prev = st.i;
  }
  return path;
}

inline SimPath simulate_rational(const StructuralParams& p, const ShockScenario& s, const SimConfig& cfg) {
  check_config(cfg);
  const double kappa = compute_kappa(p);
  const ShockPaths scenario = shock_path(s, cfg.T);
  const ShockPaths noise = noise_path(cfg);

  const ReSystem sys = assemble_re_system(p, kappa);
  const ReDecisionRule rule = solve_re_rule(p, kappa, s.rho_eps, s.rho_eta);
  const double rho_n = noise_persistence(cfg);
  const Vec3 noise_eps = shock_loading(sys.A, rule.C, sys.b_eps, rho_n);
  const Vec3 noise_eta = shock_loading(sys.A, rule.C, sys.b_eta, rho_n);

  const std::size_t T = static_cast<std::size_t>(cfg.T);
  SimPath path;
  for (auto* v : {&path.y, &path.pi, &path.i, &path.eps, &path.eta}) v->assign(T, 0.0);

  Vec3 x = Vec3::Zero();
  for (std::size_t k = 0; k < T; ++k) {
    x = rule.C * x + rule.D_eps * scenario.eps[k] + rule.D_eta * scenario.eta[k] + noise_eps * noise.eps[k] +
        noise_eta * noise.eta[k];
    path.y[k] = x(0);
    path.pi[k] = x(1);
    path.i[k] = x(2);
    path.eps[k] = scenario.eps[k] + noise.eps[k];
    path.eta[k] = scenario.eta[k] + noise.eta[k];
  }
  return path;
}

struct Window {
  std::vector<double> y;
  std::vector<double> pi;
};

/// Quarters t0 .. t0+len-1 (1-based).
inline Window extract_window(const SimPath& path, int t0, int len) {
  const long T = static_cast<long>(path.size());
  if (len < 0 || t0 < 1 || static_cast<long>(t0) + len - 1 > T) {
    fail(ErrorKind::index, "window [" + std::to_string(t0) + ", " + std::to_string(t0 + len - 1) +
                               "] outside simulated periods [1, " + std::to_string(T) + "]");
  }
  const auto begin = static_cast<std::size_t>(t0 - 1);
  Window w;
  w.y.assign(path.y.begin() + begin, path.y.begin() + begin + len);
  w.pi.assign(path.pi.begin() + begin, path.pi.begin() + begin + len);
  return w;
}

inline void write_csv(std::ostream& os, const SimPath& path) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "t,y,pi,i,alpha_y,alpha_pi,eps,eta\n";
  const bool behavioral = !path.alpha_y.empty();
  for (std::size_t k = 0; k < path.size(); ++k) {
    os << (k + 1) << ',' << num(path.y[k]) << ',' << num(path.pi[k]) << ',' << num(path.i[k]) << ','
       << (behavioral ? num(path.alpha_y[k]) : "") << ',' << (behavioral ? num(path.alpha_pi[k]) : "") << ','
       << num(path.eps[k]) << ',' << num(path.eta[k]) << '\n';
  }
}

}  // namespace bnk
