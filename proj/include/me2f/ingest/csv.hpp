#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "me2f/domain.hpp"
#include "me2f/sentiment.hpp"
#include "me2f/volatility.hpp"

namespace me2f::ingest {

inline constexpr std::string_view kBarsHeader = "date,high,low,close,volume_usd,market_cap_usd";
inline constexpr std::string_view kHoldersRankHeader = "rank,share";
inline constexpr std::string_view kHoldersAddressHeader = "address,share";
inline constexpr std::string_view kSentimentHeader = "date,fgi,abs_return";
inline constexpr std::string_view kVolatilitySummaryHeader =
    "token,avg_vol_pct,max_vol_pct,max_volume_busd,max_mcap_busd,chain_role,base";
inline constexpr std::string_view kFgiSummaryHeader =
    "token,f_bar,f_max,f_min,q_g_pct,q_f_pct,delta_f_max,delta_p_max_pct";

// Every loader reports problems as kEmptyFile, kSchemaMismatch or
// kMalformedRow (with `<source>:<line>` and the column), unless noted.

/// Rows are sorted by date; a duplicate date or a row breaking a bar
/// invariant is a kMalformedRow.
TokenSeries parse_bars_csv(std::istream& in, const TokenId& token, const std::string& source);
TokenSeries load_bars_csv(const std::filesystem::path& path, const TokenId& token);

/// Writes the bars in the loader's schema; doubles use shortest round-trip form.
std::string format_bars_csv(const TokenSeries& series);

struct HolderLoadOptions {
  int n = 100;
  Date as_of{1970, 1, 1};
  std::set<std::string> excluded_addresses;  // only honored for `address,share` files
};

/// Shares are sorted descending and truncated to the top n.
/// Throws kNegativeShare or kSumExceedsOne (whole file, before truncation).
HolderSnapshot parse_holders_csv(std::istream& in, const TokenId& token, const std::string& source,
                                 const HolderLoadOptions& options);
HolderSnapshot load_holders_csv(const std::filesystem::path& path, const TokenId& token,
                                const HolderLoadOptions& options = {});

/// `abs_return` may be left empty. Throws kFgiOutOfRange for values outside [0,100].
SentimentSeries parse_sentiment_csv(std::istream& in, const TokenId& token, const std::string& source);
SentimentSeries load_sentiment_csv(const std::filesystem::path& path, const TokenId& token);

struct VolatilitySummaryRow {
  volatility::VolatilityAggregate aggregate;
  ChainRole role;
};

/// Pre-aggregated volatility table: percent volatilities, USD-billion scale
/// columns (rescaled to `scale_unit`), `standalone` or `hosted` plus a base.
std::vector<VolatilitySummaryRow> load_volatility_summary_csv(const std::filesystem::path& path,
                                                              double scale_unit = 1e9);

/// Pre-aggregated FGI indicator table; percent columns become fractions.
std::vector<sentiment::FgiIndicators> load_fgi_summary_csv(const std::filesystem::path& path);

}  // namespace me2f::ingest
