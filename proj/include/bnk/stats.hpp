#pragma once

// Sample moments, normality and structural-break tests, and the Mahalanobis
// distance used as the calibration objective.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bnk/error.hpp"

namespace bnk {

struct MomentSet {
  double mean = 0.0;
  double variance = 0.0;  // unbiased, n - 1
  double skewness = 0.0;  // m3 / m2^1.5
  double kurtosis = 0.0;  // m4 / m2^2, raw (normal = 3)
  std::size_t n = 0;
};

inline MomentSet moments(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) fail(ErrorKind::length, "moments need at least 2 observations, got " + std::to_string(n));
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  if (!(m2 > 0.0)) fail(ErrorKind::degenerate, "moments: zero variance, skewness and kurtosis undefined");
  const double nn = static_cast<double>(n);
  MomentSet out;
  out.n = n;
  out.mean = mean;
  out.variance = m2 / (nn - 1.0);
  m2 /= nn;
  m3 /= nn;
  m4 /= nn;
  out.skewness = m3 / std::pow(m2, 1.5);
  out.kurtosis = m4 / (m2 * m2);
  return out;
}

struct JarqueBera {
  double jb = 0.0;
  double p = 1.0;
  MomentSet moments;
};

/// Chi-squared(2) survival function.
inline double jarque_bera_pvalue(double jb) { return std::exp(-0.5 * jb); }

inline JarqueBera jarque_bera(std::span<const double> x) {
  if (x.size() < 8) fail(ErrorKind::length, "Jarque-Bera needs at least 8 observations");
  JarqueBera out;
  out.moments = moments(x);
  const double s = out.moments.skewness;
  const double k = out.moments.kurtosis - 3.0;
  out.jb = static_cast<double>(x.size()) / 6.0 * (s * s + 0.25 * k * k);
  out.p = jarque_bera_pvalue(out.jb);
  return out;
}

// ---------------------------------------------------------------------------
// Regularized incomplete beta and the F distribution.

namespace detail {

// Continued fraction for I_x(a, b), modified Lentz.
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int max_iter = 500;
  constexpr double eps = 1e-16;
  constexpr double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  fail(ErrorKind::convergence, "incomplete beta continued fraction did not converge");
}

}  // namespace detail

/// I_x(a, b) for a, b > 0, x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) fail(ErrorKind::invalid_parameter, "incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) fail(ErrorKind::invalid_parameter, "incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

/// P(F > f) for F ~ F(d1, d2).
inline double f_survival(double f, double d1, double d2) {
  if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
}

/// Nested-means comparison: one mean vs. separate means up to and including
/// the break observation and after it.
struct BreakTest {
  double rss1 = 0.0;  // single mean, df n - 1
  double rss2 = 0.0;  // two means, df n - 2
  long df1 = 0;
  long df2 = 0;
  double ss = 0.0;  // rss1 - rss2
  double f_stat = 0.0;
  double p = 1.0;
  bool exact_fit = false;  // rss2 == 0: F is infinite
  std::size_t n_pre = 0;
  std::size_t n_post = 0;
};

/// `n_pre` observations belong to the pre-break regime (break quarter
/// included); the remainder are post-break.
inline BreakTest lr_break_test(std::span<const double> x, std::size_t n_pre) {
  const std::size_t n = x.size();
  if (n_pre < 2 || n < n_pre + 2) {
    fail(ErrorKind::coverage, "break test needs at least 2 observations on each side of the break (pre=" +
                                  std::to_string(n_pre) + ", post=" + std::to_string(n >= n_pre ? n - n_pre : 0) +
                                  ")");
  }
  auto mean_of = [](std::span<const double> s) {
    double acc = 0.0;
    for (double v : s) acc += v;
    return acc / static_cast<double>(s.size());
  };
  auto rss_of = [](std::span<const double> s, double m) {
    double acc = 0.0;
    for (double v : s) acc += (v - m) * (v - m);
    return acc;
  };
  const auto pre = x.first(n_pre);
  const auto post = x.subspan(n_pre);
  BreakTest out;
  out.n_pre = n_pre;
  out.n_post = n - n_pre;
  out.rss1 = rss_of(x, mean_of(x));
  out.rss2 = rss_of(pre, mean_of(pre)) + rss_of(post, mean_of(post));
  out.df1 = static_cast<long>(n) - 1;
  out.df2 = static_cast<long>(n) - 2;
  out.ss = std::max(0.0, out.rss1 - out.rss2);
  const double scale = std::max(out.rss1, std::numeric_limits<double>::min());
  if (out.rss2 <= 1e-15 * scale) {
    out.exact_fit = true;
    out.f_stat = out.ss > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    out.p = out.ss > 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.f_stat = out.ss / (out.rss2 / static_cast<double>(out.df2));
  out.p = f_survival(out.f_stat, 1.0, static_cast<double>(out.df2));
  return out;
}

// ---------------------------------------------------------------------------
// Mahalanobis distance

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class MahalanobisStrategy {
  two_obs,   // covariance of the simulated and actual vectors as two observations
  paired_series,   // covariance of the actual quarterly (gap, inflation) pairs
};

inline std::string_view to_string(MahalanobisStrategy s) {
  return s == MahalanobisStrategy::two_obs ? "two_obs" : "paired_series";
}

inline MahalanobisStrategy parse_mahalanobis_strategy(std::string_view s) {
  if (s == "two_obs") return MahalanobisStrategy::two_obs;
  if (s == "paired_series") return MahalanobisStrategy::paired_series;
  fail(ErrorKind::configuration, "unknown Mahalanobis strategy '" + std::string(s) + "'");
}

struct MahalanobisSpec {
  MahalanobisStrategy strategy = MahalanobisStrategy::two_obs;
  double pinv_tolerance = 1e-12;  // relative to the largest singular value
};

/// Moore-Penrose inverse of a symmetric 2x2 matrix with relative cutoff.
inline Mat2 pseudo_inverse(const Mat2& m, double rel_tol) {
  Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec2 sv = svd.singularValues();
  const double cutoff = rel_tol * sv(0);
  Vec2 inv = Vec2::Zero();
  for (int k = 0; k < 2; ++k) {
    if (sv(k) > cutoff && sv(k) > 0.0) inv(k) = 1.0 / sv(k);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Sample covariance (n - 1) of paired observations.
inline Mat2 paired_covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    fail(ErrorKind::length, "paired covariance needs two equal-length series of at least 2 observations");
  }
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  Mat2 c = Mat2::Zero();
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double da = a[k] - ma, db = b[k] - mb;
    c(0, 0) += da * da;
    c(0, 1) += da * db;
    c(1, 1) += db * db;
  }
  c(1, 0) = c(0, 1);
  return c / (n - 1.0);
}

/// sqrt(d' S^-1 d) for a full-rank covariance.
inline double mahalanobis_quadratic(const Vec2& diff, const Mat2& cov) {
  if (diff.isZero(0.0)) return 0.0;
  Eigen::LDLT<Mat2> ldlt(cov);
  const double det = cov.determinant();
  const double scale = cov.cwiseAbs().maxCoeff();
  if (ldlt.info() != Eigen::Success || !(det > 1e-14 * scale * scale) || !ldlt.isPositive()) {
    fail(ErrorKind::singular, "Mahalanobis covariance is singular or not positive definite");
  }
  const double q = diff.dot(ldlt.solve(diff));
  return std::sqrt(std::max(0.0, q));
}

/// Two-observation strategy: the covariance of {s_sim, s_data} is d d' / 2,
/// rank one, so any difference above the cutoff has distance sqrt(2).
inline double mahalanobis_two_obs(const Vec2& s_sim, const Vec2& s_data, double rel_tol) {
  const Vec2 mean = 0.5 * (s_sim + s_data);
  const Vec2 a = s_sim - mean, b = s_data - mean;
  const Mat2 cov = a * a.transpose() + b * b.transpose();  // divisor n - 1 = 1
  const Vec2 diff = s_sim - s_data;
  const double q = diff.dot(pseudo_inverse(cov, rel_tol) * diff);
  return std::sqrt(std::max(0.0, q));
}

/// Paired-series windows of the actual data: quarterly output gap and
/// inflation over the evaluation window.
struct PairedSeries {
  std::vector<double> gap;
  std::vector<double> inflation;
};

inline double mahalanobis(const Vec2& s_sim, const Vec2& s_data, const MahalanobisSpec& spec,
                          const PairedSeries* windows = nullptr) {
  if (!s_sim.allFinite() || !s_data.allFinite()) fail(ErrorKind::invalid_parameter, "Mahalanobis inputs must be finite");
  if (!(spec.pinv_tolerance > 0.0)) fail(ErrorKind::configuration, "pinv tolerance must be > 0");
  if (spec.strategy == MahalanobisStrategy::two_obs) {
    return mahalanobis_two_obs(s_sim, s_data, spec.pinv_tolerance);
  }
  if (windows == nullptr) fail(ErrorKind::configuration, "paired_series strategy requires the data windows");
  return mahalanobis_quadratic(s_sim - s_data, paired_covariance(windows->gap, windows->inflation));
}

}  // namespace bnk
