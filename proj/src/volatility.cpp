#include "me2f/volatility.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::volatility {

double daily_range_volatility(const DailyBar& bar, double prev_close) {
  if (!(prev_close > 0)) {
    throw Error(ErrorCode::kZeroPrevClose, fmt::format("previous close {} before {}", prev_close, bar.date.iso()));
  }
  return (bar.high - bar.low) / prev_close;
}

VolatilityAggregate aggregate(const TokenSeries& series, double scale_unit) {
  if (series.bars.size() < 2) {
    throw Error(ErrorCode::kInsufficientHistory,
                fmt::format("{}: {} bar(s), need at least 2", series.token_id, series.bars.size()));
  }
  VolatilityAggregate agg;
  agg.token_id = series.token_id;
  agg.window = DateRange{series.bars.front().date, series.bars.back().date};

  double sum = 0;
  double peak_volume = 0;
  double peak_mcap = 0;
  for (std::size_t t = 0; t < series.bars.size(); ++t) {
    const DailyBar& bar = series.bars[t];
    peak_volume = std::max(peak_volume, bar.volume_usd);
    peak_mcap = std::max(peak_mcap, bar.market_cap_usd);
    if (t == 0) {
      continue;
    }
    const double v = daily_range_volatility(bar, series.bars[t - 1].close);
    sum += v;
    agg.max_vol = std::max(agg.max_vol, v);
  }
  agg.avg_vol = sum / static_cast<double>(series.bars.size() - 1);
  agg.max_volume = peak_volume / scale_unit;
  agg.max_mcap = peak_mcap / scale_unit;
  return agg;
}

VolatilityMaxima universe_maxima(std::span<const VolatilityAggregate> aggs) {
  if (aggs.empty()) {
    throw Error(ErrorCode::kEmptyUniverse, "no tokens to normalize");
  }
  VolatilityMaxima maxima;
  for (const auto& agg : aggs) {
    maxima.avg_vol = std::max(maxima.avg_vol, agg.avg_vol);
    maxima.max_vol = std::max(maxima.max_vol, agg.max_vol);
  }
  if (!(maxima.avg_vol > 0) || !(maxima.max_vol > 0)) {
    throw Error(ErrorCode::kDegenerateUniverse, "every token has zero volatility");
  }
  return maxima;
}

NormalizedVolatility normalize(const VolatilityAggregate& agg, const VolatilityMaxima& maxima) {
  return {agg.token_id, agg.avg_vol / maxima.avg_vol, agg.max_vol / maxima.max_vol};
}

std::vector<NormalizedVolatility> normalize_cross_section(std::span<const VolatilityAggregate> aggs) {
  const VolatilityMaxima maxima = universe_maxima(aggs);
  std::vector<NormalizedVolatility> out;
  out.reserve(aggs.size());
  for (const auto& agg : aggs) {
    out.push_back(normalize(agg, maxima));
  }
  return out;
}

double scale_factor(double max_volume, double max_mcap) {
  if (!(max_volume > 0) || !(max_mcap > 0)) {
    throw Error(ErrorCode::kNonPositiveScale,
                fmt::format("peak volume {} and peak market cap {} must both be > 0", max_volume, max_mcap));
  }
  return 2.0 / (1.0 / max_volume + 1.0 / max_mcap);
}

double spillover_factor(const NormalizedVolatility& base, double base_scale, double beta) {
  return 1.0 + beta * ((base.v_a + base.v_m) / 2.0) * std::log1p(base_scale);
}

namespace {

const UniverseMember& find_member(std::string_view token, const Universe& universe) {
  auto it = universe.find(token);
  if (it == universe.end()) {
    throw Error(ErrorCode::kUnknownToken, fmt::format("token '{}' is not in the universe", token));
  }
  return it->second;
}

}  // namespace

VdsBreakdown vds_breakdown(std::string_view token, const Universe& universe, const VolatilityMaxima& maxima,
                           const FrameworkParams& params) {
  const UniverseMember& member = find_member(token, universe);

  VdsBreakdown out;
  out.normalized = normalize(member.aggregate, maxima);
  out.composite = composite(out.normalized, params.alpha);
  out.scale = scale_factor(member.aggregate.max_volume, member.aggregate.max_mcap);
  out.resilience = resilience(out.scale, params.gamma);
  out.phi = out.composite * out.resilience;

  if (const auto& base_id = member.role.base()) {
    auto it = universe.find(*base_id);
    if (it == universe.end() || !it->second.role.is_standalone()) {
      throw Error(ErrorCode::kMissingBaseChain,
                  fmt::format("{}: base chain '{}' is not a standalone member of the universe", token, *base_id));
    }
    const VolatilityAggregate& base = it->second.aggregate;
    out.spillover = spillover_factor(normalize(base, maxima), scale_factor(base.max_volume, base.max_mcap),
                                     params.beta);
  }
  out.vds = std::sqrt(out.phi * out.spillover);
  return out;
}

double vds(std::string_view token, const Universe& universe, const FrameworkParams& params) {
  std::vector<VolatilityAggregate> aggs;
  aggs.reserve(universe.size());
  for (const auto& [id, member] : universe) {
    aggs.push_back(member.aggregate);
  }
  return vds_breakdown(token, universe, universe_maxima(aggs), params).vds;
}

}  // namespace me2f::volatility
