#pragma once

// Expectation formation. Behavioral agents pick between a fundamentalist
// rule (steady state / target) and an extrapolative rule (last observation)
// with logit probabilities driven by geometrically discounted squared
// forecast errors. Rational agents use the stable decision rule of the
// linear system x_t = A E_t x_{t+1} + B x_{t-1} + b u_t.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "bnk/error.hpp"
#include "bnk/model.hpp"

namespace bnk {

// ---------------------------------------------------------------------------
// Behavioral rules

/// Recursive form of U_t = -sum_k (1-rho) rho^k err_{t-k}^2.
inline double update_utility(double prev_utility, double realized, double forecast_two_lags, double rho_mem) {
  const double err = realized - forecast_two_lags;
  return rho_mem * prev_utility - (1.0 - rho_mem) * err * err;
}

struct Fractions {
  double fund = 0.5;
  double ext = 0.5;
};

/// Logit choice between the two rules, evaluated after subtracting the larger
/// exponent so gamma * U never overflows.
inline Fractions switching_fractions(double u_fund, double u_ext, double gamma) {
  const double a = gamma * u_fund;
  const double b = gamma * u_ext;
  if (a == b) return {0.5, 0.5};
  const double top = std::max(a, b);
  const double wf = std::exp(a - top);
  const double we = std::exp(b - top);
  Fractions f;
  f.fund = wf / (wf + we);
  f.ext = 1.0 - f.fund;
  return f;
}

struct RuleForecasts {
  double y_fund = 0.0;
  double y_ext = 0.0;
  double pi_fund = 0.0;
  double pi_ext = 0.0;
};

/// Forecasts of next period formed at t. Extrapolators see t-1, since
/// period-t outcomes are determined jointly with these expectations.
inline RuleForecasts behavioral_forecasts(double y_prev, double pi_prev, const StructuralParams& p) {
  return {0.0, y_prev, p.pi_target, pi_prev};
}

inline double aggregate_expectation(double alpha_fund, double f_fund, double f_ext) {
  return alpha_fund * f_fund + (1.0 - alpha_fund) * f_ext;
}

/// Switching state for one forecast variable.
struct ForecasterState {
  double u_fund = 0.0;
  double u_ext = 0.0;
  double alpha_fund = 0.5;
  // [0]: forecast made last period, [1]: the one before. The error realized
  // at t compares x_{t-1} with the forecast formed at t-2.
  std::array<double, 2> fund_history{};
  std::array<double, 2> ext_history{};

  ForecasterState() = default;
  explicit ForecasterState(double anchor) : fund_history{anchor, anchor} {}

  double alpha_ext() const { return 1.0 - alpha_fund; }

  /// Advances to the next period: utilities, then fractions, then the new
  /// forecasts. Returns the aggregate expectation for the coming outcome.
  double advance(double realized_prev, double f_fund, double f_ext, double gamma, double rho_mem,
                 std::optional<double> pinned_alpha = std::nullopt) {
    u_fund = update_utility(u_fund, realized_prev, fund_history[1], rho_mem);
    u_ext = update_utility(u_ext, realized_prev, ext_history[1], rho_mem);
    alpha_fund = pinned_alpha ? *pinned_alpha : switching_fractions(u_fund, u_ext, gamma).fund;
    fund_history = {f_fund, fund_history[0]};
    ext_history = {f_ext, ext_history[0]};
    return aggregate_expectation(alpha_fund, f_fund, f_ext);
  }
};

// ---------------------------------------------------------------------------
// Rational expectations

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// x_t = A E_t x_{t+1} + B x_{t-1} + b_eps eps_t + b_eta eta_t, x = (y, pi, i).
struct ReSystem {
  Mat3 A = Mat3::Zero();
  Mat3 B = Mat3::Zero();
  Vec3 b_eps = Vec3::Zero();
  Vec3 b_eta = Vec3::Zero();
};

/// Structural matrices of the model: M0 x_t = M1 E x_{t+1} + M2 x_{t-1} + e u_t.
struct StructuralForm {
  Mat3 M0;
  Mat3 M1;
  Mat3 M2;
};

inline StructuralForm structural_form(const StructuralParams& p, double kappa) {
  StructuralForm f;
  f.M0 << 1.0, 0.0, 1.0 / p.sigma,
          -kappa, 1.0, 0.0,
          -(1.0 - p.c3) * p.c2, -(1.0 - p.c3) * p.c1, 1.0;
  f.M1 << 1.0, 1.0 / p.sigma, 0.0,
          0.0, p.beta, 0.0,
          0.0, 0.0, 0.0;
  f.M2 = Mat3::Zero();
  f.M2(2, 2) = p.c3;
  return f;
}

inline ReSystem assemble_re_system(const StructuralParams& p, double kappa) {
  const StructuralForm f = structural_form(p, kappa);
  Eigen::FullPivLU<Mat3> lu(f.M0);
  if (!lu.isInvertible()) fail(ErrorKind::degenerate, "degenerate parameters: contemporaneous matrix is singular");
  ReSystem s;
  s.A = lu.solve(f.M1);
  s.B = lu.solve(f.M2);
  s.b_eps = lu.solve(Vec3::UnitX());
  s.b_eta = lu.solve(Vec3::UnitY());
  return s;
}

struct ReSolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 10000;
};

/// x_t = C x_{t-1} + D_eps eps_t + D_eta eta_t for AR(1) shocks with the
/// given persistences.
struct ReDecisionRule {
  Mat3 C = Mat3::Zero();
  Vec3 D_eps = Vec3::Zero();
  Vec3 D_eta = Vec3::Zero();
};

inline double spectral_radius(const Mat3& m) {
  Eigen::EigenSolver<Mat3> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Loading of an AR(1) shock with persistence rho given the state rule C:
/// (I - A C - rho A) D = b.
inline Vec3 shock_loading(const Mat3& A, const Mat3& C, const Vec3& b, double rho) {
  const Mat3 lhs = Mat3::Identity() - A * C - rho * A;
  Eigen::FullPivLU<Mat3> lu(lhs);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "shock loading undefined for persistence " << rho << " (singular system)";
    fail(ErrorKind::singular, os.str());
  }
  return lu.solve(b);
}

/// Fixed point C = (I - A C)^{-1} B by iteration from C = 0.
inline Mat3 solve_state_rule(const Mat3& A, const Mat3& B, const ReSolverOptions& opt = {}) {
  Mat3 C = Mat3::Zero();
  for (int it = 0; it < opt.max_iterations; ++it) {
    const Mat3 next = (Mat3::Identity() - A * C).partialPivLu().solve(B);
    if (!next.allFinite()) break;
    const double change = (next - C).cwiseAbs().maxCoeff();
    C = next;
    if (change < opt.tolerance) return C;
  }
  fail(ErrorKind::convergence, "indeterminacy: decision-rule iteration did not converge");
}

inline ReDecisionRule solve_re_rule(const Mat3& A, const Mat3& B, const Vec3& b_eps, const Vec3& b_eta,
                                    double rho_eps, double rho_eta, const ReSolverOptions& opt = {}) {
  ReDecisionRule rule;
  rule.C = solve_state_rule(A, B, opt);
  const double radius = spectral_radius(rule.C);
  if (!(radius < 1.0)) {
    std::ostringstream os;
    os << "unstable decision rule: spectral radius " << radius << " >= 1";
    fail(ErrorKind::instability, os.str());
  }
  rule.D_eps = shock_loading(A, rule.C, b_eps, rho_eps);
  rule.D_eta = shock_loading(A, rule.C, b_eta, rho_eta);
  return rule;
}

/// Convenience overload: assembles the system and names the policy and
/// structural parameters when the solver fails.
inline ReDecisionRule solve_re_rule(const StructuralParams& p, double kappa, double rho_eps, double rho_eta,
                                    const ReSolverOptions& opt = {}) {
  const ReSystem sys = assemble_re_system(p, kappa);
  try {
    return solve_re_rule(sys.A, sys.B, sys.b_eps, sys.b_eta, rho_eps, rho_eta, opt);
  } catch (const Error& e) {
    std::ostringstream os;
    os << e.what() << " [sigma=" << p.sigma << " beta=" << p.beta << " kappa=" << kappa << " c1=" << p.c1
       << " c2=" << p.c2 << " c3=" << p.c3 << " rho_eps=" << rho_eps << " rho_eta=" << rho_eta << "]";
    throw Error(e.kind(), os.str());
  }
}

}  // namespace bnk
