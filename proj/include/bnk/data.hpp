#pragma once

// Quarterly series ingestion (FRED two-column CSV) and transforms.

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bnk/error.hpp"
#include "bnk/quarter.hpp"

namespace bnk {

/// Gap-free quarterly series: observation k is dated start + k.
struct QuarterlySeries {
  std::string id;
  Quarter start;
  std::vector<double> values;
  std::optional<Quarter> base_quarter;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }
  Quarter date(std::size_t k) const { return start + static_cast<long>(k); }
  Quarter end() const { return start + static_cast<long>(values.size()) - 1; }
  bool contains(Quarter q) const { return !empty() && q >= start && q <= end(); }

  double at(Quarter q) const {
    if (!contains(q)) fail(ErrorKind::coverage, id + ": no observation for " + q.to_string());
    return values[static_cast<std::size_t>(q - start)];
  }

  /// Inclusive sub-range.
  QuarterlySeries slice(Quarter from, Quarter to) const {
    if (from > to || !contains(from) || !contains(to)) {
      fail(ErrorKind::coverage, id + ": range " + from.to_string() + ".." + to.to_string() + " not covered (series " +
                                    (empty() ? std::string("empty") : start.to_string() + ".." + end().to_string()) +
                                    ")");
    }
    QuarterlySeries out{id, from, {}, base_quarter};
    const auto b = values.begin() + (from - start);
    out.values.assign(b, b + (to - from) + 1);
    return out;
  }

  bool operator==(const QuarterlySeries&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

inline std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  return out;
}

inline void append(QuarterlySeries& s, Quarter q, double v, std::size_t row) {
  if (s.values.empty()) {
    s.start = q;
  } else {
    const Quarter expected = s.end() + 1;
    if (q <= s.end()) {
      fail(ErrorKind::ordering, "row " + std::to_string(row) + ": quarter " + q.to_string() +
                                    " is duplicated or out of order");
    }
    if (q != expected) {
      fail(ErrorKind::ordering, "row " + std::to_string(row) + ": gap in quarterly series, expected " +
                                    expected.to_string() + " got " + q.to_string());
    }
  }
  s.values.push_back(v);
}

}  // namespace detail

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  out << content;
  if (!out) fail(ErrorKind::io, "write failed for '" + path + "'");
}

/// FRED download format: header "observation_date,<ID>" (or "DATE,<ID>"),
/// then ISO dates on the first day of each quarter. Missing-value markers
/// (".") and non-positive levels are rejected.
inline QuarterlySeries parse_fred_csv(std::string_view text, bool level = true) {
  const auto lines = detail::lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) fail(ErrorKind::parse, "empty CSV: no header row");
  const auto header = detail::split_csv(lines[first]);
  if (header.size() != 2) fail(ErrorKind::parse, "row " + std::to_string(first + 1) + ": expected 2 header columns");

  QuarterlySeries s;
  s.id = std::string(header[1]);
  for (std::size_t r = first + 1; r < lines.size(); ++r) {
    const std::size_t row = r + 1;
    if (detail::trim(lines[r]).empty()) continue;
    const auto cols = detail::split_csv(lines[r]);
    if (cols.size() != 2) fail(ErrorKind::parse, "row " + std::to_string(row) + ": expected 2 columns");
    Quarter q;
    try {
      q = Quarter::from_iso_date(cols[0]);
    } catch (const Error& e) {
      fail(e.kind(), "row " + std::to_string(row) + ": " + e.what());
    }
    const auto v = detail::parse_number(cols[1]);
    if (!v) fail(ErrorKind::parse, "row " + std::to_string(row) + ": missing or malformed value '" + std::string(cols[1]) + "'");
    if (level && !(*v > 0.0)) fail(ErrorKind::invalid_parameter, "row " + std::to_string(row) + ": non-positive level " + std::string(cols[1]));
    detail::append(s, q, *v, row);
  }
  if (s.empty()) fail(ErrorKind::length, "CSV holds no observations (header only)");
  return s;
}

inline std::string to_fred_csv(const QuarterlySeries& s) {
  std::string out = "observation_date," + s.id + "\n";
  for (std::size_t k = 0; k < s.size(); ++k) out += s.date(k).iso_date() + "," + detail::format_number(s.values[k]) + "\n";
  return out;
}

/// Normalized output: year,quarter,value.
inline std::string to_normalized_csv(const QuarterlySeries& s) {
  std::string out = "year,quarter,value\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    const Quarter q = s.date(k);
    out += std::to_string(q.year) + "," + std::to_string(q.q) + "," + detail::format_number(s.values[k]) + "\n";
  }
  return out;
}

/// Dated gap output: date,value with dates as 2020Q1.
inline std::string to_dated_csv(const QuarterlySeries& s) {
  std::string out = "date," + (s.id.empty() ? std::string("value") : s.id) + "\n";
  for (std::size_t k = 0; k < s.size(); ++k) out += s.date(k).to_string() + "," + detail::format_number(s.values[k]) + "\n";
  return out;
}

/// Reads any of the dated layouts: "date,value" (2020Q1 or ISO dates),
/// "year,quarter,value", or a FRED download. Values may be signed.
inline QuarterlySeries parse_dated_csv(std::string_view text) {
  const auto lines = detail::lines_of(text);
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) ++first;
  if (first == lines.size()) fail(ErrorKind::parse, "empty CSV: no header row");
  const auto header = detail::split_csv(lines[first]);
  const bool three = header.size() == 3;
  if (header.size() != 2 && !three) fail(ErrorKind::parse, "expected 2 or 3 header columns");

  QuarterlySeries s;
  s.id = std::string(header.back());
  for (std::size_t r = first + 1; r < lines.size(); ++r) {
    const std::size_t row = r + 1;
    if (detail::trim(lines[r]).empty()) continue;
    const auto cols = detail::split_csv(lines[r]);
    if (cols.size() != header.size()) fail(ErrorKind::parse, "row " + std::to_string(row) + ": wrong column count");
    Quarter q;
    try {
      if (three) {
        const auto y = detail::parse_number(cols[0]);
        const auto qq = detail::parse_number(cols[1]);
        if (!y || !qq || *qq < 1 || *qq > 4) fail(ErrorKind::parse, "bad year/quarter");
        q = {static_cast<int>(*y), static_cast<int>(*qq)};
      } else if (cols[0].find('Q') != std::string_view::npos || cols[0].find('q') != std::string_view::npos) {
        q = Quarter::parse(cols[0]);
      } else {
        q = Quarter::from_iso_date(cols[0]);
      }
    } catch (const Error& e) {
      fail(e.kind(), "row " + std::to_string(row) + ": " + e.what());
    }
    const auto v = detail::parse_number(cols.back());
    if (!v) fail(ErrorKind::parse, "row " + std::to_string(row) + ": missing or malformed value");
    detail::append(s, q, *v, row);
  }
  if (s.empty()) fail(ErrorKind::length, "CSV holds no observations (header only)");
  return s;
}

/// value / value(anchor) * 100.
inline QuarterlySeries rebase(const QuarterlySeries& s, Quarter anchor) {
  if (!s.contains(anchor)) fail(ErrorKind::coverage, s.id + ": rebase anchor " + anchor.to_string() + " not in series");
  const double base = s.at(anchor);
  if (!(base > 0.0)) fail(ErrorKind::invalid_parameter, s.id + ": rebase anchor value must be positive");
  QuarterlySeries out = s;
  for (std::size_t k = 0; k < s.size(); ++k) {
    out.values[k] = s.date(k) == anchor ? 100.0 : s.values[k] / base * 100.0;
  }
  out.base_quarter = anchor;
  return out;
}

/// Quarter-on-quarter percent change, dated at the later quarter.
inline QuarterlySeries qoq_inflation(const QuarterlySeries& cpi) {
  if (cpi.size() < 2) fail(ErrorKind::length, cpi.id + ": inflation needs at least 2 observations");
  for (double v : cpi.values) {
    if (!(v > 0.0)) fail(ErrorKind::invalid_parameter, cpi.id + ": CPI must be positive");
  }
  QuarterlySeries out{cpi.id + "_qoq", cpi.start + 1, {}, std::nullopt};
  out.values.reserve(cpi.size() - 1);
  for (std::size_t k = 1; k < cpi.size(); ++k) out.values.push_back(100.0 * (cpi.values[k] / cpi.values[k - 1] - 1.0));
  return out;
}

inline QuarterlySeries log_series(const QuarterlySeries& s) {
  QuarterlySeries out = s;
  out.id = "log_" + s.id;
  for (double& v : out.values) {
    if (!(v > 0.0)) fail(ErrorKind::invalid_parameter, s.id + ": log of non-positive value");
    v = std::log(v);
  }
  return out;
}

inline constexpr Quarter covid_start{2020, 1};

/// The post-COVID evaluation window, Q1 2020 onwards (16 quarters by default,
/// Q1 2020 - Q4 2023).
inline QuarterlySeries covid_window(const QuarterlySeries& s, int quarters = 16) {
  const Quarter last = covid_start + (quarters - 1);
  if (!s.contains(covid_start) || !s.contains(last)) {
    fail(ErrorKind::coverage, s.id + ": series must cover " + covid_start.to_string() + ".." + last.to_string());
  }
  return s.slice(covid_start, last);
}

}  // namespace bnk
