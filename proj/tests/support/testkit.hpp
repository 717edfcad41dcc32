#pragma once

// Shared generators, brute-force oracles and filesystem helpers for the unit
// and acceptance suites. The oracles deliberately avoid the library's own
// helpers: long double accumulation, plain loops, no shared code paths.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "me2f/domain.hpp"
#include "me2f/sentiment.hpp"
#include "me2f/warning.hpp"

namespace testkit {

using me2f::Date;

inline std::filesystem::path fixture_dir() { return std::filesystem::path(ME2F_FIXTURE_DIR); }

class TempDir {
 public:
  TempDir() {
    std::string tmpl = (std::filesystem::temp_directory_path() / "me2f-test-XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Generators

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

/// Valid daily bars: a random walk in close with occasional missing days.
inline me2f::TokenSeries random_series(std::mt19937_64& rng, const std::string& id, int bars) {
  me2f::TokenSeries s{id, {}};
  Date d(2023, 1, 1);
  d = d.plus_days(uniform_int(rng, 0, 400));
  double close = std::exp(uniform(rng, -8, 8));
  for (int i = 0; i < bars; ++i) {
    const double open = close;
    close = open * std::exp(uniform(rng, -0.3, 0.3));
    const double high = std::max(open, close) * (1 + uniform(rng, 0, 0.2));
    const double low = std::min(open, close) * (1 - uniform(rng, 0, 0.2));
    s.bars.push_back({d, high, low, close, uniform(rng, 1e6, 5e11), uniform(rng, 1e7, 5e12)});
    d = d.plus_days(uniform_int(rng, 0, 9) == 0 ? 2 : 1);
  }
  return s;
}

/// Descending top-holder shares with sum at most 1; occasionally degenerate.
inline std::vector<double> random_shares(std::mt19937_64& rng, int n) {
  const int kind = uniform_int(rng, 0, 9);
  int k = uniform_int(rng, 1, n);
  if (kind == 0) k = 1;
  std::vector<double> raw(k);
  const double skew = uniform(rng, 0.2, 4.0);
  for (auto& v : raw) v = std::pow(uniform(rng, 1e-6, 1.0), skew);
  if (kind == 1) std::fill(raw.begin(), raw.end(), 1.0);
  const double total = uniform(rng, 0.01, 1.0);
  double sum = 0;
  for (double v : raw) sum += v;
  for (auto& v : raw) v = v / sum * total;
  std::sort(raw.rbegin(), raw.rend());
  return raw;
}

inline me2f::SentimentSeries random_sentiment(std::mt19937_64& rng, const std::string& id, int points) {
  me2f::SentimentSeries s{id, {}};
  Date d = Date(2023, 6, 1).plus_days(uniform_int(rng, 0, 200));
  double f = uniform(rng, 0, 100);
  for (int i = 0; i < points; ++i) {
    const int mode = uniform_int(rng, 0, 9);
    if (mode == 0) {
      f = static_cast<double>(uniform_int(rng, 0, 5) * 20);  // exact band edges
    } else if (mode == 1) {
      f = std::round(uniform(rng, 0, 200)) / 2;  // half points
    } else {
      f = std::clamp(f + uniform(rng, -25, 25), 0.0, 100.0);
    }
    std::optional<double> r;
    if (uniform_int(rng, 0, 6) != 0) r = std::abs(uniform(rng, -0.4, 0.4));
    s.points.push_back({d, f, r});
    d = d.plus_days(1 + (uniform_int(rng, 0, 12) == 0 ? 1 : 0));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Oracles

inline std::vector<long double> oracle_daily_vols(const me2f::TokenSeries& s) {
  std::vector<long double> out;
  for (std::size_t t = 1; t < s.bars.size(); ++t) {
    out.push_back((static_cast<long double>(s.bars[t].high) - s.bars[t].low) / s.bars[t - 1].close);
  }
  return out;
}

struct OracleConcentration {
  long double c = 0;
  long double h = 0;
  long double internal = 0;
  long double wds = 0;
};

inline OracleConcentration oracle_concentration(const std::vector<double>& shares, int n) {
  OracleConcentration o;
  for (double s : shares) {
    o.c += s;
    o.h += static_cast<long double>(s) * s;
  }
  if (o.c == 0) return o;
  const long double inv_n = 1.0L / n;
  o.internal = ((o.h / (o.c * o.c)) - inv_n) / (1.0L - inv_n);
  o.wds = o.c * o.internal;
  return o;
}

struct OracleFgi {
  double f_bar = 0, f_max = 0, f_min = 0, r_f = 0, q_g = 0, q_f = 0, delta_f_max = 0, delta_p_max = 0;
};

/// Band thresholds written out by hand: [80,100] greed, [0,20) fear.
inline OracleFgi oracle_fgi(const me2f::SentimentSeries& s) {
  OracleFgi o;
  long double sum = 0;
  int greed = 0;
  int fear = 0;
  o.f_max = -1;
  o.f_min = 101;
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const double f = s.points[i].fgi;
    sum += f;
    if (f > o.f_max) o.f_max = f;
    if (f < o.f_min) o.f_min = f;
    if (f >= 80) ++greed;
    if (f < 20) ++fear;
    if (i > 0) {
      o.delta_f_max = std::max(o.delta_f_max, std::abs(f - s.points[i - 1].fgi));
      if (s.points[i].abs_return) o.delta_p_max = std::max(o.delta_p_max, *s.points[i].abs_return);
    }
  }
  const auto n = static_cast<long double>(s.points.size());
  o.f_bar = static_cast<double>(sum / n);
  o.r_f = o.f_max - o.f_min;
  o.q_g = static_cast<double>(greed / n);
  o.q_f = static_cast<double>(fear / n);
  return o;
}

/// Rank-based flagging written independently: sort the window, find the
/// first position of the current value, compare position/(w-1).
inline std::vector<std::size_t> oracle_flag_indices(const std::vector<double>& values, int window, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < static_cast<std::size_t>(window)) continue;
    std::vector<double> w(values.begin() + static_cast<long>(i + 1 - window), values.begin() + static_cast<long>(i + 1));
    std::sort(w.begin(), w.end());
    const auto pos = std::lower_bound(w.begin(), w.end(), values[i]) - w.begin();
    if (static_cast<double>(pos) / static_cast<double>(window - 1) >= threshold) out.push_back(i);
  }
  return out;
}

using OracleEvent = std::tuple<std::string, Date, me2f::warning::Metric, me2f::warning::Metric>;

inline std::set<OracleEvent> oracle_joint_events(const std::vector<me2f::warning::WarningFlag>& flags, int x_days) {
  std::set<OracleEvent> out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    for (std::size_t j = 0; j < flags.size(); ++j) {
      const auto& a = flags[i];
      const auto& b = flags[j];
      if (a.token_id != b.token_id || !(a.metric < b.metric)) continue;
      const int gap = std::abs(days_between(a.date, b.date));
      if (gap > x_days) continue;
      out.insert({a.token_id, std::max(a.date, b.date), a.metric, b.metric});
    }
  }
  return out;
}

}  // namespace testkit
