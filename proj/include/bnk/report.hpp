#pragma once

// Structured report records (JSON) shared by the CLI commands.

#include <nlohmann/json.hpp>

#include "bnk/calibration.hpp"
#include "bnk/stats.hpp"

namespace bnk {

namespace detail {
// JSON has no infinity; encode non-finite numbers as strings.
inline nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}
}  // namespace detail

inline nlohmann::json to_report(const MomentSet& m) {
  return {{"n", m.n},
          {"mean", detail::number(m.mean)},
          {"variance", detail::number(m.variance)},
          {"skewness", detail::number(m.skewness)},
          {"kurtosis", detail::number(m.kurtosis)}};
}

inline nlohmann::json to_report(const JarqueBera& jb) {
  return {{"test", "jarque_bera"}, {"jb", detail::number(jb.jb)}, {"p", detail::number(jb.p)}, {"moments", to_report(jb.moments)}};
}

inline nlohmann::json to_report(const BreakTest& b) {
  return {{"test", "lr_break"},
          {"rss1", detail::number(b.rss1)},
          {"rss2", detail::number(b.rss2)},
          {"df1", b.df1},
          {"df2", b.df2},
          {"ss", detail::number(b.ss)},
          {"f_stat", detail::number(b.f_stat)},
          {"p", detail::number(b.p)},
          {"exact_fit", b.exact_fit},
          {"n_pre", b.n_pre},
          {"n_post", b.n_post}};
}

inline nlohmann::json to_report(const CalibrationResult& r) {
  nlohmann::json j = {{"eta1", r.point.eta1},
                      {"rho_eps", r.point.rho_eps},
                      {"rho_eta", r.point.rho_eta},
                      {"mean_y", detail::number(r.mean_y)},
                      {"mean_pi", detail::number(r.mean_pi)},
                      {"distance", detail::number(r.distance)},
                      {"rank", r.rank}};
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

}  // namespace bnk
