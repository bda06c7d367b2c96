#pragma once

// Run configuration: JSON with // and /* */ comments. Unknown keys are
// rejected; every field is defaulted, so an empty file reproduces the
// default pipeline.

#include <nlohmann/json.hpp>
#include <set>
#include <string>

#include "bnk/calibration.hpp"
#include "bnk/data.hpp"
#include "bnk/empirics.hpp"
#include "bnk/error.hpp"
#include "bnk/model.hpp"
#include "bnk/simulator.hpp"
#include "bnk/stats.hpp"

namespace bnk {

struct DataConfig {
  std::string gdp_csv = "data/NGDPRNSAXDCINQ.csv";
  std::string cpi_csv = "data/INDCPIALLQINMEI.csv";
  std::string gdp_url = "https://fred.stlouisfed.org/graph/fredgraph.csv?id=NGDPRNSAXDCINQ";
  std::string cpi_url = "https://fred.stlouisfed.org/graph/fredgraph.csv?id=INDCPIALLQINMEI";
  EmpiricalOptions empirics;
};

struct RunConfig {
  StructuralParams params;
  ShockScenario scenario;
  SimConfig sim;
  GridSpec grid;
  MahalanobisSpec mahalanobis;
  DataConfig data;
  std::string output_dir = "out";
};

namespace detail {

/// Reads keys from one JSON object and rejects whatever was not read.
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::configuration, path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::configuration, path_ + "." + key + ": wrong type");
    }
  }

  const nlohmann::json* child(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(ErrorKind::configuration, "unknown configuration key '" + path_ + "." + it.key() + "'");
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline void read_axis(const nlohmann::json* j, const std::string& path, GridAxis& a) {
  if (!j) return;
  ObjectReader r(*j, path);
  r.get("lo", a.lo);
  r.get("hi", a.hi);
  r.get("step", a.step);
  r.finish();
}

inline void read_quarter(ObjectReader& r, const char* key, Quarter& q) {
  std::string s;
  r.get(key, s);
  if (!s.empty()) q = Quarter::parse(s);
}

inline void read_matrix2(ObjectReader& r, const char* key, Eigen::Matrix2d& m) {
  const nlohmann::json* j = r.child(key);
  if (!j) return;
  if (!j->is_array() || j->size() != 2 || !(*j)[0].is_array() || !(*j)[1].is_array() || (*j)[0].size() != 2 ||
      (*j)[1].size() != 2) {
    fail(ErrorKind::configuration, r.path(key) + ": expected a 2x2 array");
  }
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = (*j)[a][b].get<double>();
}

}  // namespace detail

inline RunConfig parse_config(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::parse, std::string("configuration: ") + e.what());
  }
  RunConfig c;
  if (j.is_null()) return c;
  detail::ObjectReader root(j, "config");

  if (const auto* p = root.child("params")) {
    detail::ObjectReader r(*p, "config.params");
    auto& s = c.params;
    r.get("sigma", s.sigma);
    r.get("beta", s.beta);
    r.get("theta", s.theta);
    r.get("chi", s.chi);
    r.get("varsigma", s.varsigma);
    r.get("e_price", s.e_price);
    r.get("c1", s.c1);
    r.get("c2", s.c2);
    r.get("c3", s.c3);
    r.get("gamma", s.gamma);
    r.get("rho_mem", s.rho_mem);
    r.get("pi_target", s.pi_target);
    r.finish();
  }
  if (const auto* p = root.child("scenario")) {
    detail::ObjectReader r(*p, "config.scenario");
    auto& s = c.scenario;
    r.get("eps1", s.eps1);
    r.get("rho_eps", s.rho_eps);
    r.get("demand_quarters", s.demand_quarters);
    r.get("eta1", s.eta1);
    r.get("rho_eta", s.rho_eta);
    r.get("supply_offset", s.supply_offset);
    r.get("supply_quarters", s.supply_quarters);
    r.get("t0", s.t0);
    r.finish();
  }
  if (const auto* p = root.child("sim")) {
    detail::ObjectReader r(*p, "config.sim");
    auto& s = c.sim;
    r.get("T", s.T);
    r.get("window_len", s.window_len);
    r.get("seed", s.seed);
    std::string mode;
    r.get("noise_mode", mode);
    if (!mode.empty()) s.noise_mode = parse_noise_mode(mode);
    r.get("noise_sd_demand", s.noise_sd_demand);
    r.get("noise_sd_supply", s.noise_sd_supply);
    r.get("noise_rho", s.noise_rho);
    r.finish();
  }
  if (const auto* p = root.child("grid")) {
    detail::ObjectReader r(*p, "config.grid");
    detail::read_axis(r.child("eta1"), r.path("eta1"), c.grid.eta1);
    detail::read_axis(r.child("rho_eps"), r.path("rho_eps"), c.grid.rho_eps);
    detail::read_axis(r.child("rho_eta"), r.path("rho_eta"), c.grid.rho_eta);
    r.get("seeds_per_point", c.grid.seeds_per_point);
    r.finish();
  }
  if (const auto* p = root.child("mahalanobis")) {
    detail::ObjectReader r(*p, "config.mahalanobis");
    std::string strategy;
    r.get("strategy", strategy);
    if (!strategy.empty()) c.mahalanobis.strategy = parse_mahalanobis_strategy(strategy);
    r.get("pinv_tolerance", c.mahalanobis.pinv_tolerance);
    r.finish();
  }
  if (const auto* p = root.child("data")) {
    detail::ObjectReader r(*p, "config.data");
    auto& d = c.data;
    r.get("gdp_csv", d.gdp_csv);
    r.get("cpi_csv", d.cpi_csv);
    r.get("gdp_url", d.gdp_url);
    r.get("cpi_url", d.cpi_url);
    detail::read_quarter(r, "sample_begin", d.empirics.sample_begin);
    detail::read_quarter(r, "sample_end", d.empirics.sample_end);
    detail::read_quarter(r, "cpi_base", d.empirics.cpi_base);
    r.get("hp_lambda", d.empirics.hp_lambda);
    r.get("window_quarters", d.empirics.window_quarters);
    if (const auto* k = r.child("kalman")) {
      detail::ObjectReader kr(*k, "config.data.kalman");
      std::string variant;
      kr.get("variant", variant);
      if (variant == "summed_measurement") {
        d.empirics.kalman = KalmanSpec::summed_measurement();
      } else if (!variant.empty() && variant != "local_linear_trend") {
        fail(ErrorKind::configuration, "config.data.kalman.variant: expected local_linear_trend|summed_measurement");
      }
      kr.get("V", d.empirics.kalman.V);
      detail::read_matrix2(kr, "W", d.empirics.kalman.W);
      detail::read_matrix2(kr, "C0", d.empirics.kalman.C0);
      kr.finish();
    }
    r.finish();
  }
  root.get("output_dir", c.output_dir);
  root.finish();

  c.params.validate();
  c.grid.validate();
  check_config(c.sim);
  return c;
}

inline RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

}  // namespace bnk
