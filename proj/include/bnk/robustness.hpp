#pragma once

// Normality of simulated paths under persistent stochastic shocks.

#include <cmath>
#include <string>

#include "bnk/simulator.hpp"
#include "bnk/stats.hpp"

namespace bnk {

struct RobustnessSpec {
  int window_begin = 1000;  // 1-based, inclusive
  int window_end = 1080;
  double noise_rho = 0.95;
  double noise_variance = 0.5;
};

struct ModelNormality {
  JarqueBera y;
  JarqueBera pi;
};

struct RobustnessRun {
  std::uint64_t seed = 0;
  ModelNormality behavioral;
  ModelNormality rational;
};

inline SimConfig robustness_config(const SimConfig& base, const RobustnessSpec& spec, std::uint64_t seed) {
  SimConfig cfg = base;
  cfg.seed = seed;
  cfg.noise_mode = NoiseMode::ar1;
  cfg.noise_rho = spec.noise_rho;
  cfg.noise_sd_demand = cfg.noise_sd_supply = std::sqrt(spec.noise_variance);
  return cfg;
}

/// Both models see the same noise draws for a given seed.
inline RobustnessRun robustness_run(const StructuralParams& p, const ShockScenario& s, const SimConfig& base,
                                    const RobustnessSpec& spec, std::uint64_t seed) {
  if (spec.window_begin < 1 || spec.window_end < spec.window_begin) {
    fail(ErrorKind::index, "window must satisfy 1 <= begin <= end");
  }
  if (!(spec.noise_variance >= 0.0)) fail(ErrorKind::invalid_parameter, "noise variance must be >= 0");
  const SimConfig cfg = robustness_config(base, spec, seed);
  const int len = spec.window_end - spec.window_begin + 1;
  auto test = [&](const SimPath& path) {
    const Window w = extract_window(path, spec.window_begin, len);
    return ModelNormality{jarque_bera(w.y), jarque_bera(w.pi)};
  };
  RobustnessRun r;
  r.seed = seed;
  r.behavioral = test(simulate_behavioral(p, s, cfg));
  r.rational = test(simulate_rational(p, s, cfg));
  return r;
}

struct RejectionRates {
  int runs = 0;
  double behavioral_y = 0.0;
  double behavioral_pi = 0.0;
  double rational_y = 0.0;
  double rational_pi = 0.0;
};

/// Share of runs with Jarque-Bera p below `level`; run k uses
/// derive_seed(base_seed, k).
inline RejectionRates rejection_rates(const StructuralParams& p, const ShockScenario& s, const SimConfig& base,
                                      const RobustnessSpec& spec, std::uint64_t base_seed, int runs,
                                      double level = 0.05) {
  if (runs < 1) fail(ErrorKind::configuration, "runs must be >= 1");
  RejectionRates out;
  out.runs = runs;
  for (int k = 0; k < runs; ++k) {
    const RobustnessRun r = robustness_run(p, s, base, spec, derive_seed(base_seed, static_cast<std::uint64_t>(k)));
    out.behavioral_y += r.behavioral.y.p < level;
    out.behavioral_pi += r.behavioral.pi.p < level;
    out.rational_y += r.rational.y.p < level;
    out.rational_pi += r.rational.pi.p < level;
  }
  for (double* v : {&out.behavioral_y, &out.behavioral_pi, &out.rational_y, &out.rational_pi}) *v /= runs;
  return out;
}

}  // namespace bnk
