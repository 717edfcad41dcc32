#pragma once

#include <optional>
#include <string>
#include <vector>

#include "me2f/date.hpp"

namespace me2f {

using TokenId = std::string;

// Prices are in quote currency; volume and market cap in raw USD.
struct DailyBar {
  Date date;
  double high = 0;
  double low = 0;
  double close = 0;
  double volume_usd = 0;
  double market_cap_usd = 0;

  friend bool operator==(const DailyBar&, const DailyBar&) = default;
};

struct TokenSeries {
  TokenId token_id;
  std::vector<DailyBar> bars;  // date-ascending

  friend bool operator==(const TokenSeries&, const TokenSeries&) = default;
};

/// Top-holder ownership shares as fractions of total supply, largest first.
struct HolderSnapshot {
  TokenId token_id;
  Date as_of;
  std::vector<double> shares;

  friend bool operator==(const HolderSnapshot&, const HolderSnapshot&) = default;
};

struct SentimentPoint {
  Date date;
  double fgi = 0;                     // [0, 100]
  std::optional<double> abs_return;   // absolute close-to-close return, fraction

  friend bool operator==(const SentimentPoint&, const SentimentPoint&) = default;
};

struct SentimentSeries {
  TokenId token_id;
  std::vector<SentimentPoint> points;  // date-ascending

  friend bool operator==(const SentimentSeries&, const SentimentSeries&) = default;
};

struct FrameworkParams {
  double alpha = 0.5;       // weight of normalized average vs. maximum volatility
  double beta = 0.5;        // base-chain spillover gain
  double gamma = 0.5;       // scale down-weighting
  double delta = 1.5;       // shock exponent
  int n = 100;              // top-holder count
  double scale_unit = 1e9;  // USD divisor for volume and market cap (billions)

  /// Throws Error(kInvalidParams) if any parameter is outside its domain.
  void validate() const;

  friend bool operator==(const FrameworkParams&, const FrameworkParams&) = default;
};

/// Standalone chain, or a token hosted on a standalone base chain.
class ChainRole {
 public:
  ChainRole() = default;

  static ChainRole standalone() { return ChainRole(); }
  static ChainRole hosted_on(TokenId base) { return ChainRole(std::move(base)); }

  bool is_standalone() const { return !base_.has_value(); }
  const std::optional<TokenId>& base() const { return base_; }

  friend bool operator==(const ChainRole&, const ChainRole&) = default;

 private:
  explicit ChainRole(TokenId base) : base_(std::move(base)) {}

  std::optional<TokenId> base_;
};

/// Returns the series unchanged iff every bar and ordering invariant holds.
/// Throws Error with kNonMonotonicDates, kNegativePrice or kLowAboveHigh,
/// naming the offending date.
const TokenSeries& validate_series(const TokenSeries& series);

/// Checks share range, ordering and total. Throws Error(kInvalidShares).
const HolderSnapshot& validate_snapshot(const HolderSnapshot& snapshot);

/// Throws kFgiOutOfRange, kNonMonotonicDates or kParseError (negative return).
const SentimentSeries& validate_sentiment(const SentimentSeries& series);

}  // namespace me2f
