#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "me2f/domain.hpp"

namespace me2f::volatility {

/// Per-token summary of the daily range volatilities. Volatilities are unit-free
/// fractions; volume and market cap are expressed in `scale_unit` USD.
struct VolatilityAggregate {
  TokenId token_id;
  double avg_vol = 0;
  double max_vol = 0;
  double max_volume = 0;
  double max_mcap = 0;
  std::optional<DateRange> window;  // absent for pre-aggregated inputs
};

struct NormalizedVolatility {
  TokenId token_id;
  double v_a = 0;  // average volatility over the universe maximum
  double v_m = 0;  // maximum volatility over the universe maximum
};

struct VolatilityMaxima {
  double avg_vol = 0;
  double max_vol = 0;
};

/// (high - low) / prev_close. Throws kZeroPrevClose if prev_close <= 0.
double daily_range_volatility(const DailyBar& bar, double prev_close);

/// Mean and max of the daily range volatility from the second bar on; volume
/// and market-cap maxima cover every bar. Throws kInsufficientHistory on < 2 bars.
VolatilityAggregate aggregate(const TokenSeries& series, double scale_unit);

/// Throws kEmptyUniverse or kDegenerateUniverse (a zero maximum).
VolatilityMaxima universe_maxima(std::span<const VolatilityAggregate> aggs);

NormalizedVolatility normalize(const VolatilityAggregate& agg, const VolatilityMaxima& maxima);

std::vector<NormalizedVolatility> normalize_cross_section(std::span<const VolatilityAggregate> aggs);

inline double composite(const NormalizedVolatility& nv, double alpha) {
  return alpha * nv.v_a + (1 - alpha) * nv.v_m;
}

/// Harmonic mean of peak volume and peak market cap. Throws kNonPositiveScale.
double scale_factor(double max_volume, double max_mcap);

inline double resilience(double scale, double gamma) { return 1.0 / (1.0 + gamma * scale); }

/// Multiplier applied to a hosted token's scale-adjusted score; always >= 1.
double spillover_factor(const NormalizedVolatility& base, double base_scale, double beta);

struct UniverseMember {
  VolatilityAggregate aggregate;
  ChainRole role;
};

using Universe = std::map<TokenId, UniverseMember, std::less<>>;

/// Intermediate quantities of one token's score, kept for reporting.
struct VdsBreakdown {
  NormalizedVolatility normalized;
  double composite = 0;
  double scale = 0;
  double resilience = 0;
  double phi = 0;
  double spillover = 1;  // 1 for standalone tokens
  double vds = 0;
};

VdsBreakdown vds_breakdown(std::string_view token, const Universe& universe, const VolatilityMaxima& maxima,
                           const FrameworkParams& params);

/// Square root of the scale-adjusted (and, for hosted tokens, spillover-amplified)
/// composite volatility. Throws kUnknownToken or kMissingBaseChain.
double vds(std::string_view token, const Universe& universe, const FrameworkParams& params);

}  // namespace me2f::volatility
