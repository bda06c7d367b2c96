#pragma once

// From raw FRED levels to the empirical series the model is compared with.

#include <string>

#include "bnk/data.hpp"
#include "bnk/filters.hpp"
#include "bnk/stats.hpp"

namespace bnk {

struct EmpiricalOptions {
  Quarter sample_begin{2004, 1};
  Quarter sample_end{2024, 1};
  Quarter cpi_base{2011, 4};
  double hp_lambda = 1600.0;
  KalmanSpec kalman;
  int window_quarters = 16;
};

struct Empirics {
  QuarterlySeries log_gdp;
  QuarterlySeries hp_gap;
  QuarterlySeries kalman_gap;  // starts one quarter after log_gdp
  QuarterlySeries cpi;         // rebased
  QuarterlySeries inflation;
  QuarterlySeries hp_window;
  QuarterlySeries kalman_window;
  QuarterlySeries inflation_window;
};

inline QuarterlySeries hp_gap_series(const QuarterlySeries& log_gdp, double lambda) {
  QuarterlySeries out{"hp_gap", log_gdp.start, hp_filter(log_gdp.values, lambda).cycle, std::nullopt};
  return out;
}

inline QuarterlySeries kalman_gap_series(const QuarterlySeries& log_gdp, const KalmanSpec& spec) {
  QuarterlySeries out{"kalman_gap", log_gdp.start + 1, kalman_output_gap(log_gdp.values, spec), std::nullopt};
  return out;
}

inline Empirics build_empirics(const QuarterlySeries& gdp, const QuarterlySeries& cpi, const EmpiricalOptions& opt = {}) {
  Empirics e;
  e.log_gdp = log_series(gdp.slice(opt.sample_begin, opt.sample_end));
  e.hp_gap = hp_gap_series(e.log_gdp, opt.hp_lambda);
  e.kalman_gap = kalman_gap_series(e.log_gdp, opt.kalman);
  // One extra quarter before the sample so inflation covers the sample start.
  const Quarter cpi_from = cpi.contains(opt.sample_begin - 1) ? opt.sample_begin - 1 : opt.sample_begin;
  e.cpi = rebase(cpi.slice(cpi_from, std::min(opt.sample_end, cpi.end())), opt.cpi_base);
  e.inflation = qoq_inflation(e.cpi);
  e.hp_window = covid_window(e.hp_gap, opt.window_quarters);
  e.kalman_window = covid_window(e.kalman_gap, opt.window_quarters);
  e.inflation_window = covid_window(e.inflation, opt.window_quarters);
  return e;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace bnk
