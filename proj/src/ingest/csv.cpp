#include "me2f/ingest/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::ingest {
namespace {

struct Row {
  int line = 0;
  std::vector<std::string_view> cells;
};

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
      ++number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (number == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (line.empty()) continue;
      lines_.emplace_back(number, std::move(line));
    }
  }

  const std::string& source() const { return source_; }

  /// Checks the header against the accepted alternatives and returns the
  /// index of the matching one.
  std::size_t expect_header(std::initializer_list<std::string_view> accepted) {
    if (lines_.empty()) {
      throw Error(ErrorCode::kEmptyFile, fmt::format("{}: file is empty", source_));
    }
    std::size_t idx = 0;
    for (std::string_view h : accepted) {
      if (lines_.front().second == h) {
        if (lines_.size() == 1) {
          throw Error(ErrorCode::kEmptyFile, fmt::format("{}: header but no data rows", source_));
        }
        return idx;
      }
      ++idx;
    }
    throw Error(ErrorCode::kSchemaMismatch,
                fmt::format("{}: header '{}' does not match expected '{}'", source_, lines_.front().second,
                            *accepted.begin()));
  }

  std::vector<Row> rows(std::size_t columns) const {
    std::vector<Row> out;
    for (std::size_t i = 1; i < lines_.size(); ++i) {
      Row row{lines_[i].first, {}};
      std::string_view rest = lines_[i].second;
      while (true) {
        auto comma = rest.find(',');
        row.cells.push_back(rest.substr(0, comma));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (row.cells.size() != columns) {
        throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: expected {} columns, found {}", source_, row.line,
                                                          columns, row.cells.size()));
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  [[noreturn]] void fail(const Row& row, std::string_view column, std::string_view why) const {
    throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: column '{}': {}", source_, row.line, column, why));
  }

  double number(const Row& row, std::size_t idx, std::string_view column) const {
    std::string_view cell = row.cells[idx];
    double value = 0;
    const auto* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (cell.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
      fail(row, column, fmt::format("'{}' is not a finite decimal number", cell));
    }
    return value;
  }

  Date date(const Row& row, std::size_t idx, std::string_view column) const {
    try {
      return Date::parse(row.cells[idx]);
    } catch (const Error& e) {
      fail(row, column, e.what());
    }
  }

 private:
  std::string source_;
  std::vector<std::pair<int, std::string>> lines_;
};

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot open '{}'", path.string()));
  }
  return in;
}

}  // namespace

TokenSeries parse_bars_csv(std::istream& in, const TokenId& token, const std::string& source) {
  CsvReader reader(in, source);
  reader.expect_header({kBarsHeader});

  std::vector<std::pair<DailyBar, int>> bars;
  for (const Row& row : reader.rows(6)) {
    DailyBar bar;
    bar.date = reader.date(row, 0, "date");
    bar.high = reader.number(row, 1, "high");
    bar.low = reader.number(row, 2, "low");
    bar.close = reader.number(row, 3, "close");
    bar.volume_usd = reader.number(row, 4, "volume_usd");
    bar.market_cap_usd = reader.number(row, 5, "market_cap_usd");
    if (!(bar.high > 0)) reader.fail(row, "high", "price must be > 0");
    if (!(bar.low > 0)) reader.fail(row, "low", "price must be > 0");
    if (!(bar.close > 0)) reader.fail(row, "close", "price must be > 0");
    if (bar.volume_usd < 0) reader.fail(row, "volume_usd", "must be >= 0");
    if (bar.market_cap_usd < 0) reader.fail(row, "market_cap_usd", "must be >= 0");
    if (bar.low > bar.high) reader.fail(row, "low", fmt::format("low {} above high {}", bar.low, bar.high));
    bars.emplace_back(bar, row.line);
  }

  std::stable_sort(bars.begin(), bars.end(), [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
  TokenSeries series{token, {}};
  series.bars.reserve(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    if (i > 0 && bars[i].first.date == bars[i - 1].first.date) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: column 'date': duplicate date {}", source,
                                                        bars[i].second, bars[i].first.date.iso()));
    }
    series.bars.push_back(bars[i].first);
  }
  return validate_series(series);
}

TokenSeries load_bars_csv(const std::filesystem::path& path, const TokenId& token) {
  auto in = open(path);
  return parse_bars_csv(in, token, path.string());
}

std::string format_bars_csv(const TokenSeries& series) {
  std::string out(kBarsHeader);
  out += '\n';
  for (const DailyBar& b : series.bars) {
    out += fmt::format("{},{},{},{},{},{}\n", b.date.iso(), b.high, b.low, b.close, b.volume_usd, b.market_cap_usd);
  }
  return out;
}

HolderSnapshot parse_holders_csv(std::istream& in, const TokenId& token, const std::string& source,
                                 const HolderLoadOptions& options) {
  CsvReader reader(in, source);
  const bool by_address = reader.expect_header({kHoldersRankHeader, kHoldersAddressHeader}) == 1;

  std::vector<double> shares;
  double total = 0;
  for (const Row& row : reader.rows(2)) {
    if (!by_address) {
      reader.number(row, 0, "rank");
    }
    const double share = reader.number(row, 1, "share");
    if (share < 0) {
      throw Error(ErrorCode::kNegativeShare, fmt::format("{}:{}: share {} is negative", source, row.line, share));
    }
    if (share > 1) {
      reader.fail(row, "share", fmt::format("share {} exceeds 1", share));
    }
    if (by_address && options.excluded_addresses.contains(std::string(row.cells[0]))) {
      continue;
    }
    total += share;
    shares.push_back(share);
  }
  if (total > 1 + 1e-9) {
    throw Error(ErrorCode::kSumExceedsOne, fmt::format("{}: shares sum to {}", source, total));
  }

  std::sort(shares.begin(), shares.end(), std::greater<>());
  if (options.n > 0 && shares.size() > static_cast<std::size_t>(options.n)) {
    shares.resize(static_cast<std::size_t>(options.n));
  }
  HolderSnapshot snapshot{token, options.as_of, std::move(shares)};
  return validate_snapshot(snapshot);
}

HolderSnapshot load_holders_csv(const std::filesystem::path& path, const TokenId& token,
                                const HolderLoadOptions& options) {
  auto in = open(path);
  return parse_holders_csv(in, token, path.string(), options);
}

SentimentSeries parse_sentiment_csv(std::istream& in, const TokenId& token, const std::string& source) {
  CsvReader reader(in, source);
  reader.expect_header({kSentimentHeader});

  std::vector<std::pair<SentimentPoint, int>> points;
  for (const Row& row : reader.rows(3)) {
    SentimentPoint p;
    p.date = reader.date(row, 0, "date");
    p.fgi = reader.number(row, 1, "fgi");
    if (p.fgi < 0 || p.fgi > 100) {
      throw Error(ErrorCode::kFgiOutOfRange,
                  fmt::format("{}:{}: FGI {} outside [0,100]", source, row.line, p.fgi));
    }
    if (!row.cells[2].empty()) {
      p.abs_return = reader.number(row, 2, "abs_return");
      if (*p.abs_return < 0) reader.fail(row, "abs_return", "must be >= 0");
    }
    points.emplace_back(p, row.line);
  }

  std::stable_sort(points.begin(), points.end(),
                   [](const auto& a, const auto& b) { return a.first.date < b.first.date; });
  SentimentSeries series{token, {}};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i > 0 && points[i].first.date == points[i - 1].first.date) {
      throw Error(ErrorCode::kMalformedRow, fmt::format("{}:{}: column 'date': duplicate date {}", source,
                                                        points[i].second, points[i].first.date.iso()));
    }
    series.points.push_back(points[i].first);
  }
  return validate_sentiment(series);
}

SentimentSeries load_sentiment_csv(const std::filesystem::path& path, const TokenId& token) {
  auto in = open(path);
  return parse_sentiment_csv(in, token, path.string());
}

std::vector<VolatilitySummaryRow> load_volatility_summary_csv(const std::filesystem::path& path,
                                                              double scale_unit) {
  auto in = open(path);
  CsvReader reader(in, path.string());
  reader.expect_header({kVolatilitySummaryHeader});

  const double to_unit = 1e9 / scale_unit;
  std::vector<VolatilitySummaryRow> out;
  for (const Row& row : reader.rows(7)) {
    VolatilitySummaryRow r;
    r.aggregate.token_id = std::string(row.cells[0]);
    if (r.aggregate.token_id.empty()) reader.fail(row, "token", "empty token id");
    r.aggregate.avg_vol = reader.number(row, 1, "avg_vol_pct") / 100.0;
    r.aggregate.max_vol = reader.number(row, 2, "max_vol_pct") / 100.0;
    r.aggregate.max_volume = reader.number(row, 3, "max_volume_busd") * to_unit;
    r.aggregate.max_mcap = reader.number(row, 4, "max_mcap_busd") * to_unit;
    if (r.aggregate.avg_vol < 0 || r.aggregate.avg_vol > r.aggregate.max_vol) {
      reader.fail(row, "avg_vol_pct", "requires 0 <= avg_vol_pct <= max_vol_pct");
    }
    if (r.aggregate.max_volume < 0) reader.fail(row, "max_volume_busd", "must be >= 0");
    if (r.aggregate.max_mcap < 0) reader.fail(row, "max_mcap_busd", "must be >= 0");

    const std::string_view role = row.cells[5];
    const std::string_view base = row.cells[6];
    if (role == "standalone") {
      if (!base.empty()) reader.fail(row, "base", "standalone tokens take no base");
      r.role = ChainRole::standalone();
    } else if (role == "hosted") {
      if (base.empty()) reader.fail(row, "base", "hosted tokens need a base token");
      r.role = ChainRole::hosted_on(std::string(base));
    } else {
      reader.fail(row, "chain_role", fmt::format("'{}' is neither 'standalone' nor 'hosted'", role));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<sentiment::FgiIndicators> load_fgi_summary_csv(const std::filesystem::path& path) {
  auto in = open(path);
  CsvReader reader(in, path.string());
  reader.expect_header({kFgiSummaryHeader});

  std::vector<sentiment::FgiIndicators> out;
  for (const Row& row : reader.rows(8)) {
    sentiment::FgiIndicators ind;
    ind.token_id = std::string(row.cells[0]);
    if (ind.token_id.empty()) reader.fail(row, "token", "empty token id");
    ind.f_bar = reader.number(row, 1, "f_bar");
    ind.f_max = reader.number(row, 2, "f_max");
    ind.f_min = reader.number(row, 3, "f_min");
    ind.r_f = ind.f_max - ind.f_min;
    ind.q_g = reader.number(row, 4, "q_g_pct") / 100.0;
    ind.q_f = reader.number(row, 5, "q_f_pct") / 100.0;
    ind.delta_f_max = reader.number(row, 6, "delta_f_max");
    ind.delta_p_max = reader.number(row, 7, "delta_p_max_pct") / 100.0;
    for (auto [v, name] : {std::pair{ind.f_bar, "f_bar"}, {ind.f_max, "f_max"}, {ind.f_min, "f_min"}}) {
      if (v < 0 || v > 100) {
        throw Error(ErrorCode::kFgiOutOfRange,
                    fmt::format("{}:{}: {} = {} outside [0,100]", reader.source(), row.line, name, v));
      }
    }
    if (!(ind.f_min <= ind.f_bar && ind.f_bar <= ind.f_max)) reader.fail(row, "f_bar", "requires f_min <= f_bar <= f_max");
    if (ind.q_g < 0 || ind.q_f < 0 || ind.q_g + ind.q_f > 1) reader.fail(row, "q_g_pct", "band shares must lie in [0,100]%");
    if (ind.delta_f_max < 0 || ind.delta_f_max > 100) reader.fail(row, "delta_f_max", "must lie in [0,100]");
    if (ind.delta_p_max < 0) reader.fail(row, "delta_p_max_pct", "must be >= 0");
    out.push_back(std::move(ind));
  }
  return out;
}

}  // namespace me2f::ingest
