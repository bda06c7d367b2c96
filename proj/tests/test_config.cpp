#include <gtest/gtest.h>

#include "bnk/config.hpp"
#include "bnk/report.hpp"

namespace {

using namespace bnk;

ErrorKind kind_of(std::string_view text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::usage;
}

TEST(Config, EmptyObjectGivesDefaults) {
  const RunConfig c = parse_config("{}");
  const RunConfig d;
  EXPECT_EQ(c.params, d.params);
  EXPECT_EQ(c.scenario, d.scenario);
  EXPECT_EQ(c.sim, d.sim);
  EXPECT_EQ(c.grid, d.grid);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_EQ(c.mahalanobis.strategy, MahalanobisStrategy::two_obs);
  EXPECT_EQ(c.data.empirics.cpi_base, (Quarter{2011, 4}));
}

TEST(Config, ReadsEverySection) {
  const RunConfig c = parse_config(R"({
    // comments are allowed
    "params": {"gamma": 3.5, "c3": 0.6},
    "scenario": {"eps1": -0.3, "t0": 501},
    "sim": {"T": 1000, "seed": 7, "noise_mode": "ar1", "noise_rho": 0.95},
    "grid": {"eta1": {"lo": 0.1, "hi": 0.5, "step": 0.1}, "seeds_per_point": 5},
    "mahalanobis": {"strategy": "paired_series"},
    /* block comment */
    "data": {"cpi_base": "2015Q1", "kalman": {"variant": "summed_measurement", "V": 0.01}},
    "output_dir": "results"
  })");
  EXPECT_EQ(c.params.gamma, 3.5);
  EXPECT_EQ(c.params.c3, 0.6);
  EXPECT_EQ(c.scenario.eps1, -0.3);
  EXPECT_EQ(c.scenario.t0, 501);
  EXPECT_EQ(c.sim.T, 1000);
  EXPECT_EQ(c.sim.seed, 7u);
  EXPECT_EQ(c.sim.noise_mode, NoiseMode::ar1);
  EXPECT_EQ(c.grid.eta1.count(), 5u);
  EXPECT_EQ(c.grid.seeds_per_point, 5);
  EXPECT_EQ(c.mahalanobis.strategy, MahalanobisStrategy::paired_series);
  EXPECT_EQ(c.data.empirics.cpi_base, (Quarter{2015, 1}));
  EXPECT_EQ(c.data.empirics.kalman.F, KalmanSpec::summed_measurement().F);
  EXPECT_EQ(c.data.empirics.kalman.V, 0.01);
  EXPECT_EQ(c.output_dir, "results");
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_EQ(kind_of(R"({"bogus": 1})"), ErrorKind::configuration);
  EXPECT_EQ(kind_of(R"({"params": {"gama": 2}})"), ErrorKind::configuration);
  EXPECT_EQ(kind_of(R"({"grid": {"eta1": {"lo": 0, "hi": 1, "stp": 0.1}}})"), ErrorKind::configuration);
  EXPECT_EQ(kind_of(R"({"data": {"kalman": {"variant": "other"}}})"), ErrorKind::configuration);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_EQ(kind_of(R"({"params": {"sigma": "big"}})"), ErrorKind::configuration);
  EXPECT_EQ(kind_of(R"({"params": {"beta": 1.5}})"), ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of(R"({"grid": {"rho_eps": {"lo": 0, "hi": 1, "step": 0.3}}})"), ErrorKind::configuration);
  EXPECT_EQ(kind_of(R"({"sim": {"noise_mode": "pink"}})"), ErrorKind::configuration);
  EXPECT_EQ(kind_of(R"({"data": {"cpi_base": "2015Q7"}})"), ErrorKind::parse);
  EXPECT_EQ(kind_of("{ not json"), ErrorKind::parse);
}

TEST(Config, ShippedExampleMatchesDefaults) {
  const RunConfig c = load_config(std::string(BNK_SOURCE_DIR) + "/config/example.json");
  const RunConfig d;
  EXPECT_EQ(c.params, d.params);
  EXPECT_EQ(c.scenario, d.scenario);
  EXPECT_EQ(c.sim, d.sim);
  EXPECT_EQ(c.grid, d.grid);
  EXPECT_EQ(c.data.gdp_csv, d.data.gdp_csv);
  EXPECT_EQ(c.data.empirics.kalman.W, d.data.empirics.kalman.W);
  EXPECT_EQ(c.data.empirics.kalman.V, d.data.empirics.kalman.V);
}

TEST(Report, NonFiniteNumbersAreStrings) {
  CalibrationResult r;
  const auto j = to_report(r);
  EXPECT_EQ(j["distance"], "inf");
  EXPECT_EQ(j["mean_y"], "nan");
}

}  // namespace
