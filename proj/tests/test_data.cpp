#include <gtest/gtest.h>

#include <random>

#include "bnk/data.hpp"
#include "bnk/empirics.hpp"

namespace {

using bnk::Quarter;
using bnk::QuarterlySeries;

std::string fred_text(Quarter from, int n, double start = 100.0, double growth = 1.01) {
  std::string s = "observation_date,NGDPRNSAXDCINQ\n";
  double v = start;
  for (int k = 0; k < n; ++k, v *= growth) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    s += (from + k).iso_date() + "," + buf + "\n";
  }
  return s;
}

bnk::ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const bnk::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return bnk::ErrorKind::usage;
}

TEST(Quarter, Arithmetic) {
  const Quarter q{2020, 1};
  EXPECT_EQ((q + 15).to_string(), "2023Q4");
  EXPECT_EQ((q - 1).to_string(), "2019Q4");
  EXPECT_EQ((q + 16) - q, 16);
  EXPECT_EQ(Quarter::parse("2011Q4"), (Quarter{2011, 4}));
  EXPECT_EQ(Quarter::parse("2011-Q4"), (Quarter{2011, 4}));
  EXPECT_EQ(Quarter::from_iso_date("2004-07-01"), (Quarter{2004, 3}));
  EXPECT_EQ((Quarter{2004, 3}).iso_date(), "2004-07-01");
  EXPECT_THROW(Quarter::parse("2020Q5"), bnk::Error);
  EXPECT_THROW(Quarter::parse("garbage"), bnk::Error);
  EXPECT_EQ(kind_of([] { Quarter::from_iso_date("2004-02-01"); }), bnk::ErrorKind::ordering);
}

TEST(Fred, EightyOneQuarters) {
  const auto s = bnk::parse_fred_csv(fred_text({2004, 1}, 81));
  EXPECT_EQ(s.size(), 81u);
  EXPECT_EQ(s.id, "NGDPRNSAXDCINQ");
  EXPECT_EQ(s.start, (Quarter{2004, 1}));
  EXPECT_EQ(s.end(), (Quarter{2024, 1}));
}

TEST(Fred, HeaderOnly) {
  EXPECT_EQ(kind_of([] { bnk::parse_fred_csv("observation_date,X\n"); }), bnk::ErrorKind::length);
  EXPECT_EQ(kind_of([] { bnk::parse_fred_csv(""); }), bnk::ErrorKind::parse);
}

TEST(Fred, DuplicatedQuarter) {
  const std::string text = "DATE,X\n2020-01-01,1\n2020-04-01,2\n2020-04-01,3\n";
  EXPECT_EQ(kind_of([&] { bnk::parse_fred_csv(text); }), bnk::ErrorKind::ordering);
}

TEST(Fred, RowErrors) {
  EXPECT_EQ(kind_of([] { bnk::parse_fred_csv("DATE,X\n2020-01-01,1\n2020-10-01,2\n"); }), bnk::ErrorKind::ordering);
  try {
    bnk::parse_fred_csv("DATE,X\n2020-01-01,1\n2020-04-01,.\n");
    FAIL();
  } catch (const bnk::Error& e) {
    EXPECT_EQ(e.kind(), bnk::ErrorKind::parse);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { bnk::parse_fred_csv("DATE,X\n2020-01-01,-4\n"); }), bnk::ErrorKind::invalid_parameter);
  EXPECT_EQ(kind_of([] { bnk::parse_fred_csv("DATE,X\n2020-01-01,1,2\n"); }), bnk::ErrorKind::parse);
  EXPECT_EQ(kind_of([] { bnk::parse_fred_csv("DATE,X\n2020-02-01,1\n"); }), bnk::ErrorKind::ordering);
}

TEST(FredProperty, RoundTrip) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.001, 1e7);
  for (int k = 0; k < 50; ++k) {
    QuarterlySeries s{"SERIES", Quarter{1990 + k, 1 + k % 4}, {}, std::nullopt};
    for (int j = 0; j < 1 + k; ++j) s.values.push_back(u(rng));
    const auto back = bnk::parse_fred_csv(bnk::to_fred_csv(s));
    ASSERT_EQ(back, s);
    ASSERT_EQ(bnk::to_fred_csv(back), bnk::to_fred_csv(s));
  }
}

TEST(DatedCsv, Layouts) {
  const auto a = bnk::parse_dated_csv("date,value\n2020Q1,-0.27\n2020Q2,0.1\n");
  EXPECT_EQ(a.start, (Quarter{2020, 1}));
  EXPECT_DOUBLE_EQ(a.values[0], -0.27);
  const auto b = bnk::parse_dated_csv("year,quarter,value\n2019,4,1.5\n2020,1,-2\n");
  EXPECT_EQ(b.start, (Quarter{2019, 4}));
  EXPECT_EQ(b.values.size(), 2u);
  EXPECT_EQ(bnk::parse_dated_csv(bnk::to_dated_csv(a)).values, a.values);
  EXPECT_EQ(bnk::parse_dated_csv(bnk::to_normalized_csv(b)).values, b.values);
}

TEST(Rebase, AnchorIsHundred) {
  const auto s = bnk::parse_fred_csv(fred_text({2010, 1}, 12, 87.3, 1.013));
  const auto r = bnk::rebase(s, {2011, 4});
  EXPECT_EQ(r.at({2011, 4}), 100.0);
  EXPECT_EQ(r.base_quarter, (Quarter{2011, 4}));
  for (std::size_t k = 0; k < s.size(); ++k) {
    EXPECT_NEAR(r.values[k] / r.values[0], s.values[k] / s.values[0], 1e-14);
  }
  EXPECT_EQ(kind_of([&] { bnk::rebase(s, {2020, 1}); }), bnk::ErrorKind::coverage);
}

TEST(Rebase, ConstantsAndIdempotence) {
  QuarterlySeries c{"C", {2011, 1}, std::vector<double>(8, 42.0), std::nullopt};
  for (double v : bnk::rebase(c, {2011, 4}).values) EXPECT_DOUBLE_EQ(v, 100.0);
  const auto s = bnk::parse_fred_csv(fred_text({2010, 1}, 12, 50.0, 2.0));
  const auto once = bnk::rebase(s, {2011, 4});
  const auto twice = bnk::rebase(once, {2011, 4});
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(twice.values[k], once.values[k], 1e-12 * once.values[k]);
}

TEST(Inflation, QuarterOnQuarter) {
  QuarterlySeries c{"C", {2011, 1}, std::vector<double>(8, 42.0), std::nullopt};
  const auto z = bnk::qoq_inflation(c);
  EXPECT_EQ(z.size(), 7u);
  EXPECT_EQ(z.start, (Quarter{2011, 2}));
  for (double v : z.values) EXPECT_EQ(v, 0.0);
  QuarterlySeries d{"D", {2011, 1}, {10.0, 20.0}, std::nullopt};
  EXPECT_DOUBLE_EQ(bnk::qoq_inflation(d).values[0], 100.0);
  EXPECT_THROW(bnk::qoq_inflation(QuarterlySeries{"E", {2011, 1}, {1.0}, std::nullopt}), bnk::Error);
}

TEST(Inflation, RebasingCancels) {
  const auto s = bnk::parse_fred_csv(fred_text({2004, 1}, 81, 61.7, 1.0123));
  const auto a = bnk::qoq_inflation(s);
  const auto b = bnk::qoq_inflation(bnk::rebase(s, {2011, 4}));
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-11);
}

TEST(CovidWindow, SixteenQuarters) {
  QuarterlySeries g{"gap", {2004, 1}, std::vector<double>(81, 0.0), std::nullopt};
  for (std::size_t k = 0; k < 81; ++k) g.values[k] = static_cast<double>(k);
  const auto w = bnk::covid_window(g);
  EXPECT_EQ(w.size(), 16u);
  EXPECT_EQ(w.start, (Quarter{2020, 1}));
  EXPECT_EQ(w.end(), (Quarter{2023, 4}));
  EXPECT_EQ(w.values[0], 64.0);
  EXPECT_EQ(bnk::covid_window(g, 17).end(), (Quarter{2024, 1}));

  QuarterlySeries shifted{"kalman", {2004, 2}, std::vector<double>(80, 1.0), std::nullopt};
  const auto wk = bnk::covid_window(shifted);
  EXPECT_EQ(wk.start, w.start);
  EXPECT_EQ(wk.end(), w.end());

  QuarterlySeries short_series{"s", {2004, 1}, std::vector<double>(74, 0.0), std::nullopt};
  EXPECT_EQ(short_series.end(), (Quarter{2022, 2}));
  EXPECT_EQ(kind_of([&] { bnk::covid_window(short_series); }), bnk::ErrorKind::coverage);
}

TEST(Empirics, PipelineAlignsByDate) {
  const auto gdp = bnk::parse_fred_csv(fred_text({2004, 1}, 81, 9.0e6, 1.015));
  const auto cpi = bnk::parse_fred_csv(fred_text({2003, 4}, 82, 50.0, 1.012));
  const auto e = bnk::build_empirics(gdp, cpi);
  EXPECT_EQ(e.log_gdp.size(), 81u);
  EXPECT_EQ(e.hp_gap.start, (Quarter{2004, 1}));
  EXPECT_EQ(e.kalman_gap.start, (Quarter{2004, 2}));
  EXPECT_EQ(e.kalman_gap.size(), 80u);
  EXPECT_EQ(e.inflation.start, (Quarter{2004, 1}));
  EXPECT_EQ(e.cpi.at({2011, 4}), 100.0);
  EXPECT_EQ(e.hp_window.start, e.kalman_window.start);
  EXPECT_EQ(e.inflation_window.size(), 16u);
  EXPECT_NEAR(bnk::mean_of(e.inflation_window.values), 1.2, 1e-6);  // csv holds 6 decimals
}

}  // namespace
