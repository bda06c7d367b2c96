#pragma once

// Three-equation New Keynesian model in deviation form:
//   y  = E[y'] - (i - E[pi']) / sigma + eps          (aggregate demand)
//   pi = beta * E[pi'] + kappa * y + eta              (aggregate supply)
//   i  = (1 - c3) * (c1 * pi + c2 * y) + c3 * i_prev  (Taylor rule)
// The steady state is normalized to zero; no lower bound on i.

#include <cmath>
#include <string>

#include "bnk/error.hpp"

namespace bnk {

struct StructuralParams {
  double sigma = 1.5;      // CRRA coefficient
  double beta = 0.98;      // quarterly discount factor
  double theta = 0.75;     // Calvo non-adjustment probability
  double chi = 2.7;        // inverse Frisch elasticity
  double varsigma = 0.7;   // labor share in production
  double e_price = 7.01;   // price elasticity of demand
  double c1 = 1.2;         // Taylor inflation response
  double c2 = 0.5;         // Taylor output response
  double c3 = 0.8;         // interest smoothing
  double gamma = 2.0;      // intensity of choice
  double rho_mem = 0.5;    // memory of past forecast errors
  double pi_target = 0.0;  // fundamentalist inflation anchor

  /// Throws ErrorKind::invalid_parameter naming the first violated bound.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) fail(ErrorKind::invalid_parameter, std::string("parameter out of range: ") + what);
    };
    require(std::isfinite(sigma) && sigma > 0.0, "sigma > 0");
    require(beta > 0.0 && beta < 1.0, "0 < beta < 1");
    require(theta > 0.0 && theta < 1.0, "0 < theta < 1");
    require(std::isfinite(chi) && chi >= 0.0, "chi >= 0");
    require(varsigma > 0.0 && varsigma < 1.0, "0 < varsigma < 1");
    require(std::isfinite(e_price) && e_price > 1.0, "e_price > 1");
    require(std::isfinite(c1) && c1 > 1.0, "c1 > 1");
    require(c2 > 0.0 && c2 < 1.0, "0 < c2 < 1");
    require(c3 >= 0.0 && c3 < 1.0, "0 <= c3 < 1");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma >= 0");
    require(rho_mem > 0.0 && rho_mem < 1.0, "0 < rho_mem < 1");
    require(std::isfinite(pi_target), "pi_target finite");
  }

  bool operator==(const StructuralParams&) const = default;
};

struct PeriodState {
  double y = 0.0;
  double pi = 0.0;
  double i = 0.0;

  bool finite() const { return std::isfinite(y) && std::isfinite(pi) && std::isfinite(i); }
};

/// Slope of the Phillips curve implied by Calvo pricing. Only theta = 0 is
/// rejected; other bounds are the caller's concern (see validate()).
inline double compute_kappa(const StructuralParams& p) {
  if (p.theta == 0.0) {
    fail(ErrorKind::invalid_parameter, "kappa undefined for theta = 0 (fully flexible prices)");
  }
  const double calvo = (1.0 - p.theta) * (1.0 - p.beta * p.theta) / p.theta;
  const double real_rigidity =
      (p.sigma * (1.0 - p.varsigma) + p.chi + p.varsigma) / (1.0 - p.varsigma + p.varsigma * p.e_price);
  return calvo * real_rigidity;
}

inline double taylor_rate(double pi, double y, double i_prev, const StructuralParams& p) {
  return (1.0 - p.c3) * (p.c1 * pi + p.c2 * y) + p.c3 * i_prev;
}

/// Solves the three equations for period t given the aggregate expectations
/// E_t[y_{t+1}], E_t[pi_{t+1}], the shocks and last period's rate.
///
/// Elimination: pi and i are affine in y once expectations are fixed, so the
/// demand equation collapses to a scalar equation in y.
inline PeriodState solve_period(double expected_y, double expected_pi, double eps, double eta,
                                double i_prev, const StructuralParams& p, double kappa) {
  const double demand = expected_y + expected_pi / p.sigma + eps;
  const double supply = p.beta * expected_pi + eta;
  const double rate_const = (1.0 - p.c3) * p.c1 * supply + p.c3 * i_prev;
  const double rate_slope = (1.0 - p.c3) * (p.c1 * kappa + p.c2);

  const double denom = p.sigma + rate_slope;
  if (!(std::abs(denom) > 1e-12 * (std::abs(p.sigma) + std::abs(rate_slope))) || !std::isfinite(denom)) {
    fail(ErrorKind::degenerate, "degenerate parameters: sigma + (1-c3)(c1*kappa + c2) vanishes");
  }
  PeriodState s;
  s.y = (p.sigma * demand - rate_const) / denom;
  s.pi = supply + kappa * s.y;
  s.i = rate_const + rate_slope * s.y;
  return s;
}

}  // namespace bnk
