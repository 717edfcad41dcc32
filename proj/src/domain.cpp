#include "me2f/domain.hpp"

#include <cmath>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonMonotonicDates: return "NonMonotonicDates";
    case ErrorCode::kNegativePrice: return "NegativePrice";
    case ErrorCode::kLowAboveHigh: return "LowAboveHigh";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kZeroPrevClose: return "ZeroPrevClose";
    case ErrorCode::kDegenerateUniverse: return "DegenerateUniverse";
    case ErrorCode::kNonPositiveScale: return "NonPositiveScale";
    case ErrorCode::kMissingBaseChain: return "MissingBaseChain";
    case ErrorCode::kEmptyUniverse: return "EmptyUniverse";
    case ErrorCode::kUnknownToken: return "UnknownToken";
    case ErrorCode::kInvalidShares: return "InvalidShares";
    case ErrorCode::kZeroCumulativeShare: return "ZeroCumulativeShare";
    case ErrorCode::kHOutOfRange: return "HOutOfRange";
    case ErrorCode::kFgiOutOfRange: return "FgiOutOfRange";
    case ErrorCode::kWindowTooShort: return "WindowTooShort";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kEmptyFile: return "EmptyFile";
    case ErrorCode::kNegativeShare: return "NegativeShare";
    case ErrorCode::kSumExceedsOne: return "SumExceedsOne";
    case ErrorCode::kHttpError: return "HttpError";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kPartialRange: return "PartialRange";
    case ErrorCode::kCacheCorrupt: return "CacheCorrupt";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kMissingReport: return "MissingReport";
    case ErrorCode::kInvalidAggregate: return "InvalidAggregate";
  }
  return "Unknown";
}

void FrameworkParams::validate() const {
  auto fail = [](std::string_view what) { throw Error(ErrorCode::kInvalidParams, std::string(what)); };
  if (!(alpha >= 0 && alpha <= 1)) fail(fmt::format("alpha must lie in [0,1], got {}", alpha));
  if (!(beta > 0) || !std::isfinite(beta)) fail(fmt::format("beta must be > 0, got {}", beta));
  if (!(gamma > 0) || !std::isfinite(gamma)) fail(fmt::format("gamma must be > 0, got {}", gamma));
  if (!(delta > 0) || !std::isfinite(delta)) fail(fmt::format("delta must be > 0, got {}", delta));
  if (n < 2) fail(fmt::format("n must be at least 2, got {}", n));
  if (!(scale_unit > 0) || !std::isfinite(scale_unit)) fail(fmt::format("scale_unit must be > 0, got {}", scale_unit));
}

const TokenSeries& validate_series(const TokenSeries& series) {
  const DailyBar* prev = nullptr;
  for (const DailyBar& bar : series.bars) {
    const std::string day = bar.date.iso();
    if (prev != nullptr && !(prev->date < bar.date)) {
      throw Error(ErrorCode::kNonMonotonicDates,
                  fmt::format("{}: bar dated {} does not follow {}", series.token_id, day, prev->date.iso()));
    }
    for (double v : {bar.high, bar.low, bar.close, bar.volume_usd, bar.market_cap_usd}) {
      if (!std::isfinite(v) || v < 0) {
        throw Error(ErrorCode::kNegativePrice,
                    fmt::format("{}: negative or non-finite value on {}", series.token_id, day));
      }
    }
    if (!(bar.high > 0 && bar.low > 0 && bar.close > 0)) {
      throw Error(ErrorCode::kNegativePrice, fmt::format("{}: non-positive price on {}", series.token_id, day));
    }
    if (bar.low > bar.high) {
      throw Error(ErrorCode::kLowAboveHigh,
                  fmt::format("{}: low {} above high {} on {}", series.token_id, bar.low, bar.high, day));
    }
    prev = &bar;
  }
  return series;
}

const HolderSnapshot& validate_snapshot(const HolderSnapshot& snapshot) {
  double total = 0;
  for (std::size_t k = 0; k < snapshot.shares.size(); ++k) {
    const double s = snapshot.shares[k];
    if (!std::isfinite(s) || s < 0 || s > 1) {
      throw Error(ErrorCode::kInvalidShares,
                  fmt::format("{}: share #{} = {} outside [0,1]", snapshot.token_id, k + 1, s));
    }
    if (k > 0 && s > snapshot.shares[k - 1]) {
      throw Error(ErrorCode::kInvalidShares,
                  fmt::format("{}: shares not in descending order at rank {}", snapshot.token_id, k + 1));
    }
    total += s;
  }
  if (total > 1 + 1e-9) {
    throw Error(ErrorCode::kInvalidShares, fmt::format("{}: shares sum to {} > 1", snapshot.token_id, total));
  }
  return snapshot;
}

const SentimentSeries& validate_sentiment(const SentimentSeries& series) {
  const SentimentPoint* prev = nullptr;
  for (const SentimentPoint& p : series.points) {
    if (!std::isfinite(p.fgi) || p.fgi < 0 || p.fgi > 100) {
      throw Error(ErrorCode::kFgiOutOfRange,
                  fmt::format("{}: FGI {} outside [0,100] on {}", series.token_id, p.fgi, p.date.iso()));
    }
    if (p.abs_return && (!std::isfinite(*p.abs_return) || *p.abs_return < 0)) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("{}: absolute return must be >= 0 on {}", series.token_id, p.date.iso()));
    }
    if (prev != nullptr && !(prev->date < p.date)) {
      throw Error(ErrorCode::kNonMonotonicDates,
                  fmt::format("{}: point dated {} does not follow {}", series.token_id, p.date.iso(), prev->date.iso()));
    }
    prev = &p;
  }
  return series;
}

}  // namespace me2f
