#pragma once

// Grid search over (eta1, rho_eps, rho_eta) minimizing the Mahalanobis
// distance between simulated and actual window means.

#include <algorithm>
#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "bnk/error.hpp"
#include "bnk/model.hpp"
#include "bnk/simulator.hpp"
#include "bnk/stats.hpp"

namespace bnk {

enum class ModelKind { behavioral, rational };

inline std::string_view to_string(ModelKind m) { return m == ModelKind::behavioral ? "behavioral" : "rational"; }

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "behavioral") return ModelKind::behavioral;
  if (s == "rational") return ModelKind::rational;
  fail(ErrorKind::configuration, "unknown model '" + std::string(s) + "' (expected behavioral|rational)");
}

/// Evenly spaced closed range lo, lo + step, ..., hi.
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.05;

  std::size_t count() const {
    if (hi == lo) return 1;
    return static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
  }
  double value(std::size_t k) const {
    const std::size_t n = count();
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  void validate(const char* name) const {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
      fail(ErrorKind::configuration, std::string(name) + ": need finite lo <= hi");
    }
    if (hi == lo) return;
    if (!(step > 0.0)) fail(ErrorKind::configuration, std::string(name) + ": step must be > 0");
    const double steps = (hi - lo) / step;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
      fail(ErrorKind::configuration, std::string(name) + ": step does not divide the range exactly");
    }
  }
  bool operator==(const GridAxis&) const = default;
};

struct GridPoint {
  double eta1 = 0.0;
  double rho_eps = 0.0;
  double rho_eta = 0.0;
  bool operator==(const GridPoint&) const = default;
};

/// Points are indexed lexicographically in (eta1, rho_eps, rho_eta), so index
/// order equals ascending point order.
struct GridSpec {
  GridAxis eta1{0.0, 1.0, 0.01};
  GridAxis rho_eps{0.0, 1.0, 0.05};
  GridAxis rho_eta{0.0, 1.0, 0.05};
  int seeds_per_point = 1;

  void validate() const {
    eta1.validate("eta1");
    rho_eps.validate("rho_eps");
    rho_eta.validate("rho_eta");
    if (seeds_per_point < 1) fail(ErrorKind::configuration, "seeds_per_point must be >= 1");
  }
  std::size_t size() const { return eta1.count() * rho_eps.count() * rho_eta.count(); }
  GridPoint point(std::size_t index) const {
    const std::size_t n2 = rho_eps.count(), n3 = rho_eta.count();
    return {eta1.value(index / (n2 * n3)), rho_eps.value((index / n3) % n2), rho_eta.value(index % n3)};
  }
  bool operator==(const GridSpec&) const = default;
};

/// Everything held fixed across grid points.
struct CalibrationContext {
  ModelKind model = ModelKind::behavioral;
  double eps1 = -0.27;
  Vec2 data_means{-0.0046, 1.2580};
  StructuralParams params;
  ShockScenario scenario;  // eps1/eta1/rho_* overwritten per point
  SimConfig sim;
  MahalanobisSpec mspec;
  std::optional<Mat2> data_covariance;  // required for paired_series
  int seeds_per_point = 1;
};

struct CalibrationResult {
  GridPoint point;
  std::size_t index = 0;
  double mean_y = std::numeric_limits<double>::quiet_NaN();
  double mean_pi = std::numeric_limits<double>::quiet_NaN();
  double distance = std::numeric_limits<double>::infinity();
  std::size_t rank = 0;
  std::string diagnostic;  // non-empty when the point failed
};

inline double objective_distance(const Vec2& sim, const CalibrationContext& ctx) {
  if (ctx.mspec.strategy == MahalanobisStrategy::two_obs) {
    return mahalanobis_two_obs(sim, ctx.data_means, ctx.mspec.pinv_tolerance);
  }
  if (!ctx.data_covariance) fail(ErrorKind::configuration, "paired_series strategy requires the data covariance");
  return mahalanobis_quadratic(sim - ctx.data_means, *ctx.data_covariance);
}

inline ShockScenario scenario_for(const GridPoint& point, const CalibrationContext& ctx) {
  ShockScenario s = ctx.scenario;
  s.eps1 = ctx.eps1;
  s.eta1 = point.eta1;
  s.rho_eps = point.rho_eps;
  s.rho_eta = point.rho_eta;
  return s;
}

/// Simulates `seeds_per_point` runs, averages the window means across runs
/// and scores them. Failures yield an infinite distance with a diagnostic.
inline CalibrationResult evaluate_point(const GridPoint& point, std::size_t index, const CalibrationContext& ctx) {
  CalibrationResult r;
  r.point = point;
  r.index = index;
  try {
    const ShockScenario s = scenario_for(point, ctx);
    const int runs = std::max(1, ctx.seeds_per_point);
    double sum_y = 0.0, sum_pi = 0.0;
    for (int k = 0; k < runs; ++k) {
      SimConfig cfg = ctx.sim;
      cfg.seed = derive_seed(derive_seed(ctx.sim.seed, index), static_cast<std::uint64_t>(k));
      const SimPath path =
          ctx.model == ModelKind::behavioral ? simulate_behavioral(ctx.params, s, cfg) : simulate_rational(ctx.params, s, cfg);
      const Window w = extract_window(path, s.t0, cfg.window_len);
      for (double v : w.y) sum_y += v;
      for (double v : w.pi) sum_pi += v;
    }
    const double n = static_cast<double>(runs) * static_cast<double>(ctx.sim.window_len);
    r.mean_y = sum_y / n;
    r.mean_pi = sum_pi / n;
    if (!std::isfinite(r.mean_y) || !std::isfinite(r.mean_pi)) fail(ErrorKind::instability, "non-finite window means");
    r.distance = objective_distance(Vec2(r.mean_y, r.mean_pi), ctx);
  } catch (const Error& e) {
    r.distance = std::numeric_limits<double>::infinity();
    r.diagnostic = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return r;
}

/// Ascending distance, ties by point (= grid index).
inline bool ranks_before(const CalibrationResult& a, const CalibrationResult& b) {
  const double da = std::isnan(a.distance) ? std::numeric_limits<double>::infinity() : a.distance;
  const double db = std::isnan(b.distance) ? std::numeric_limits<double>::infinity() : b.distance;
  if (da != db) return da < db;
  return a.index < b.index;
}

// ---------------------------------------------------------------------------
// Checkpoint store: a header line, then one fixed-width record per completed
// point holding the raw bits of mean_y, mean_pi and distance.

namespace detail {

struct Fnv1a {
  std::uint64_t h = 0xcbf29ce484222325ull;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t k = 0; k < n; ++k) {
      h ^= c[k];
      h *= 0x100000001b3ull;
    }
  }
  void f64(double v) { bytes(&v, sizeof v); }
  void i64(std::int64_t v) { bytes(&v, sizeof v); }
};

inline std::uint64_t bits_of(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}
inline double double_of(std::uint64_t u) {
  double v;
  std::memcpy(&v, &u, sizeof v);
  return v;
}

}  // namespace detail

/// Identifies a (grid, context) pair; resuming under a different one is refused.
inline std::uint64_t grid_hash(const GridSpec& g, const CalibrationContext& c) {
  detail::Fnv1a h;
  for (const GridAxis* a : {&g.eta1, &g.rho_eps, &g.rho_eta}) {
    h.f64(a->lo);
    h.f64(a->hi);
    h.f64(a->step);
  }
  h.i64(c.seeds_per_point);
  h.i64(static_cast<int>(c.model));
  h.f64(c.eps1);
  h.f64(c.data_means(0));
  h.f64(c.data_means(1));
  const StructuralParams& p = c.params;
  for (double v : {p.sigma, p.beta, p.theta, p.chi, p.varsigma, p.e_price, p.c1, p.c2, p.c3, p.gamma, p.rho_mem,
                   p.pi_target}) {
    h.f64(v);
  }
  const ShockScenario& s = c.scenario;
  for (int v : {s.demand_quarters, s.supply_offset, s.supply_quarters, s.t0}) h.i64(v);
  const SimConfig& m = c.sim;
  h.i64(m.T);
  h.i64(m.window_len);
  h.i64(static_cast<int>(m.noise_mode));
  h.f64(m.noise_sd_demand);
  h.f64(m.noise_sd_supply);
  h.f64(m.noise_rho);
  h.i64(static_cast<int>(c.mspec.strategy));
  h.f64(c.mspec.pinv_tolerance);
  if (c.data_covariance) {
    for (int k = 0; k < 4; ++k) h.f64((*c.data_covariance)(k));
  }
  return h.h;
}

inline constexpr std::size_t checkpoint_record_len = 62;  // incl. newline

inline std::string checkpoint_header(std::uint64_t hash, std::uint64_t base_seed, std::size_t points) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "BNKCKPT1 grid=%016" PRIx64 " seed=%020" PRIu64 " points=%010zu\n", hash, base_seed,
                points);
  return buf;
}

inline std::string checkpoint_record(const CalibrationResult& r) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%010zu %016" PRIx64 " %016" PRIx64 " %016" PRIx64 "\n", r.index,
                detail::bits_of(r.mean_y), detail::bits_of(r.mean_pi), detail::bits_of(r.distance));
  return buf;
}

/// Completed results keyed by grid index. Missing file = nothing completed.
inline std::vector<std::optional<CalibrationResult>> load_checkpoint(const std::string& path, const GridSpec& grid,
                                                                     std::uint64_t hash, std::uint64_t base_seed) {
  std::vector<std::optional<CalibrationResult>> done(grid.size());
  std::ifstream in(path, std::ios::binary);
  if (!in) return done;
  std::string line;
  if (!std::getline(in, line)) return done;  // empty file: fresh start
  const std::string expected = checkpoint_header(hash, base_seed, grid.size());
  if (line + "\n" != expected) {
    if (line.rfind("BNKCKPT1 ", 0) != 0) fail(ErrorKind::checkpoint, "checkpoint '" + path + "': corrupt header");
    fail(ErrorKind::checkpoint, "checkpoint '" + path + "' was written for a different grid/configuration");
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const bool terminated = !in.eof();
    std::size_t idx = 0;
    std::uint64_t by = 0, bp = 0, bd = 0;
    int consumed = 0;
    if (!terminated || line.size() + 1 != checkpoint_record_len ||
        std::sscanf(line.c_str(), "%10zu %16" SCNx64 " %16" SCNx64 " %16" SCNx64 "%n", &idx, &by, &bp, &bd,
                    &consumed) != 4 ||
        consumed != static_cast<int>(line.size()) || idx >= grid.size() || done[idx]) {
      fail(ErrorKind::checkpoint, "checkpoint '" + path + "': corrupt record at line " + std::to_string(lineno));
    }
    CalibrationResult r;
    r.index = idx;
    r.point = grid.point(idx);
    r.mean_y = detail::double_of(by);
    r.mean_pi = detail::double_of(bp);
    r.distance = detail::double_of(bd);
    done[idx] = r;
  }
  return done;
}

struct RunOptions {
  unsigned jobs = 1;
  std::string checkpoint_path;             // empty: no checkpointing
  std::optional<std::size_t> stop_after;   // evaluate at most this many new points
  std::vector<std::size_t> order;          // evaluation order; empty = ascending
};

struct GridOutcome {
  std::vector<CalibrationResult> ranked;  // completed points, rank order
  bool complete = false;
  std::size_t evaluated = 0;  // points evaluated in this call
  std::size_t resumed = 0;    // points loaded from the checkpoint

  const CalibrationResult& best() const {
    if (ranked.empty()) fail(ErrorKind::index, "no calibration results");
    return ranked.front();
  }
};

inline GridOutcome run_grid(const GridSpec& grid, const CalibrationContext& ctx, const RunOptions& opt = {}) {
  grid.validate();
  const std::size_t total = grid.size();
  if (total == 0) fail(ErrorKind::configuration, "empty grid");
  CalibrationContext local = ctx;
  local.seeds_per_point = grid.seeds_per_point;
  const std::uint64_t hash = grid_hash(grid, local);

  std::vector<std::optional<CalibrationResult>> results(total);
  std::ofstream ckpt;
  GridOutcome out;
  if (!opt.checkpoint_path.empty()) {
    results = load_checkpoint(opt.checkpoint_path, grid, hash, local.sim.seed);
    for (const auto& r : results) out.resumed += r.has_value();
    const bool fresh = out.resumed == 0;
    ckpt.open(opt.checkpoint_path, fresh ? std::ios::binary | std::ios::trunc : std::ios::binary | std::ios::app);
    if (!ckpt) fail(ErrorKind::io, "cannot open checkpoint '" + opt.checkpoint_path + "'");
    if (fresh) ckpt << checkpoint_header(hash, local.sim.seed, total) << std::flush;
  }

  std::vector<std::size_t> todo;
  if (opt.order.empty()) {
    for (std::size_t k = 0; k < total; ++k) {
      if (!results[k]) todo.push_back(k);
    }
  } else {
    if (opt.order.size() != total) fail(ErrorKind::configuration, "evaluation order must list every grid point");
    for (std::size_t k : opt.order) {
      if (k >= total) fail(ErrorKind::configuration, "evaluation order index out of range");
      if (!results[k]) todo.push_back(k);
    }
  }
  const std::size_t budget = opt.stop_after ? std::min(*opt.stop_after, todo.size()) : todo.size();

  std::atomic<std::size_t> cursor{0};
  std::mutex ckpt_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t slot = cursor.fetch_add(1);
      if (slot >= budget) return;
      const std::size_t idx = todo[slot];
      CalibrationResult r = evaluate_point(grid.point(idx), idx, local);
      if (ckpt.is_open()) {
        std::lock_guard lock(ckpt_mutex);
        ckpt << checkpoint_record(r) << std::flush;
      }
      results[idx] = std::move(r);
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(std::max<std::size_t>(budget, 1))));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  out.evaluated = budget;

  for (auto& r : results) {
    if (r) out.ranked.push_back(std::move(*r));
  }
  out.complete = out.ranked.size() == total;
  std::sort(out.ranked.begin(), out.ranked.end(), ranks_before);
  for (std::size_t k = 0; k < out.ranked.size(); ++k) out.ranked[k].rank = k + 1;
  return out;
}

/// eta1,rho_eps,rho_eta,mean_y,mean_pi,distance in rank order.
inline std::string results_csv(const std::vector<CalibrationResult>& ranked) {
  std::string out = "eta1,rho_eps,rho_eta,mean_y,mean_pi,distance\n";
  char buf[256];
  for (const auto& r : ranked) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.17g,%.17g,%.17g\n", r.point.eta1, r.point.rho_eps,
                  r.point.rho_eta, r.mean_y, r.mean_pi, r.distance);
    out += buf;
  }
  return out;
}

}  // namespace bnk
