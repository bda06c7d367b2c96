#pragma once

// Trend-cycle decompositions of log real GDP.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "bnk/error.hpp"

namespace bnk {

struct TrendCycle {
  std::vector<double> trend;
  std::vector<double> cycle;
};

/// Hodrick-Prescott filter. Solves (I + lambda D'D) trend = z, with D the
/// second-difference operator, by an LDL' factorization of the
/// pentadiagonal system. O(n).
inline TrendCycle hp_filter(std::span<const double> z, double lambda = 1600.0) {
  const std::size_t n = z.size();
  if (n < 4) fail(ErrorKind::length, "hp_filter needs at least 4 observations, got " + std::to_string(n));
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorKind::invalid_parameter, "hp_filter lambda must be > 0");

  // Bands of I + lambda D'D: main, first and second super-diagonal.
  std::vector<double> d0(n, 1.0), d1(n, 0.0), d2(n, 0.0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    d0[k] += lambda;
    d0[k + 1] += 4.0 * lambda;
    d0[k + 2] += lambda;
    d1[k] += -2.0 * lambda;
    d1[k + 1] += -2.0 * lambda;
    d2[k] += lambda;
  }

  // LDL' with unit lower-triangular L of bandwidth 2.
  std::vector<double> diag(n), l1(n, 0.0), l2(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double di = d0[i];
    if (i >= 1) di -= l1[i - 1] * l1[i - 1] * diag[i - 1];
    if (i >= 2) di -= l2[i - 2] * l2[i - 2] * diag[i - 2];
    diag[i] = di;
    if (i + 1 < n) {
      double e = d1[i];
      if (i >= 1) e -= l2[i - 1] * l1[i - 1] * diag[i - 1];
      l1[i] = e / di;
    }
    if (i + 2 < n) l2[i] = d2[i] / di;
  }

  TrendCycle out;
  out.trend.assign(n, 0.0);
  std::vector<double>& t = out.trend;
  for (std::size_t i = 0; i < n; ++i) {
    double w = z[i];
    if (i >= 1) w -= l1[i - 1] * t[i - 1];
    if (i >= 2) w -= l2[i - 2] * t[i - 2];
    t[i] = w;
  }
  for (std::size_t i = 0; i < n; ++i) t[i] /= diag[i];
  for (std::size_t r = n; r-- > 0;) {
    if (r + 1 < n) t[r] -= l1[r] * t[r + 1];
    if (r + 2 < n) t[r] -= l2[r] * t[r + 2];
  }

  out.cycle.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.cycle[i] = z[i] - t[i];
  return out;
}

/// Two-state linear Gaussian model z_t = F s_t + v_t, s_{t+1} = G s_t + w_t,
/// s = (potential output, trend growth).
struct KalmanSpec {
  Eigen::RowVector2d F{1.0, 0.0};
  Eigen::Matrix2d G = (Eigen::Matrix2d() << 1.0, 1.0, 0.0, 1.0).finished();
  double V = 0.06 * 0.06;
  Eigen::Matrix2d W = Eigen::Vector2d(0.06 * 0.06, 0.06 * 0.06).asDiagonal();
  Eigen::Matrix2d C0 = Eigen::Vector2d(0.06 * 0.06, 0.06 * 0.06).asDiagonal();
  double initial_growth = 0.0;  // s0 = (z_1, initial_growth)

  /// Local linear trend: level accumulates growth, growth is a random walk.
  static KalmanSpec local_linear_trend() { return {}; }

  /// F = [1, 1], G = [[1, 0], [1, 1]]: the observation is the sum of both
  /// states. Under these matrices the first state tracks growth rather than
  /// potential output.
  static KalmanSpec summed_measurement() {
    KalmanSpec s;
    s.F = Eigen::RowVector2d(1.0, 1.0);
    s.G << 1.0, 0.0, 1.0, 1.0;
    return s;
  }
};

namespace detail {
inline bool symmetric_psd(const Eigen::Matrix2d& m, double tol = 1e-12) {
  if (!m.allFinite()) return false;
  if (std::abs(m(0, 1) - m(1, 0)) > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}
}  // namespace detail

inline void validate(const KalmanSpec& spec) {
  if (!(spec.V > 0.0) || !std::isfinite(spec.V)) fail(ErrorKind::invalid_parameter, "Kalman V must be > 0");
  if (!detail::symmetric_psd(spec.W)) fail(ErrorKind::invalid_parameter, "Kalman W must be symmetric PSD");
  if (!detail::symmetric_psd(spec.C0)) fail(ErrorKind::invalid_parameter, "Kalman C0 must be symmetric PSD");
  if (!spec.F.allFinite() || !spec.G.allFinite()) fail(ErrorKind::invalid_parameter, "Kalman F, G must be finite");
}

struct KalmanRun {
  std::vector<Eigen::Vector2d> filtered;    // s_{t|t}, t = 1..n
  std::vector<Eigen::Matrix2d> covariance;  // P_{t|t}
  std::vector<Eigen::Matrix2d> predicted_covariance;  // P_{t|t-1}, t = 2..n (first entry = C0)
  std::vector<double> innovation;           // z_t - F s_{t|t-1}, first entry 0
};

/// Predict/update recursion. The initial state (z_1, growth) with covariance
/// C0 is taken as the filtered state of the first quarter.
inline KalmanRun kalman_filter(std::span<const double> z, const KalmanSpec& spec) {
  validate(spec);
  const std::size_t n = z.size();
  if (n < 3) fail(ErrorKind::length, "kalman filter needs at least 3 observations, got " + std::to_string(n));

  KalmanRun run;
  run.filtered.reserve(n);
  run.covariance.reserve(n);
  Eigen::Vector2d s(z[0], spec.initial_growth);
  Eigen::Matrix2d P = spec.C0;
  run.filtered.push_back(s);
  run.covariance.push_back(P);
  run.predicted_covariance.push_back(P);
  run.innovation.push_back(0.0);

  const Eigen::Vector2d Ft = spec.F.transpose();
  for (std::size_t t = 1; t < n; ++t) {
    const Eigen::Vector2d s_pred = spec.G * s;
    const Eigen::Matrix2d P_pred = spec.G * P * spec.G.transpose() + spec.W;
    const double S = spec.F * P_pred * Ft + spec.V;
    const Eigen::Vector2d K = P_pred * Ft / S;
    const double innov = z[t] - spec.F * s_pred;
    s = s_pred + K * innov;
    P = (Eigen::Matrix2d::Identity() - K * spec.F) * P_pred;

    run.filtered.push_back(s);
    run.covariance.push_back(P);
    run.predicted_covariance.push_back(P_pred);
    run.innovation.push_back(innov);
  }
  return run;
}

/// gap_t = z_t - s1_{t|t} for t = 2..n; the first quarter is dropped since
/// its filtered level equals the initial guess.
inline std::vector<double> kalman_output_gap(std::span<const double> z, const KalmanSpec& spec = {}) {
  const KalmanRun run = kalman_filter(z, spec);
  std::vector<double> gap(z.size() - 1);
  for (std::size_t t = 1; t < z.size(); ++t) gap[t - 1] = z[t] - run.filtered[t](0);
  return gap;
}

}  // namespace bnk
