#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "me2f/domain.hpp"
#include "me2f/sentiment.hpp"
#include "me2f/volatility.hpp"
#include "me2f/warning.hpp"
#include "me2f/whale.hpp"

namespace me2f::scoring {

/// Either raw daily bars or an already aggregated volatility summary.
using VolatilityInput = std::variant<TokenSeries, volatility::VolatilityAggregate>;
/// Either a raw FGI series or an already computed indicator row.
using SentimentInput = std::variant<SentimentSeries, sentiment::FgiIndicators>;

struct TokenInput {
  TokenId id;
  ChainRole role;
  VolatilityInput volatility;
  std::optional<HolderSnapshot> holders;
  std::optional<SentimentInput> sentiment;
};

struct ContextMember {
  ChainRole role;
  std::optional<volatility::VolatilityAggregate> aggregate;
  std::optional<HolderSnapshot> holders;
  std::optional<sentiment::FgiIndicators> fgi;
  std::vector<std::string> warnings;
};

struct ScoringContext {
  FrameworkParams params;
  std::vector<TokenId> order;  // input order, used for the report
  std::map<TokenId, ContextMember> members;
  std::optional<volatility::VolatilityMaxima> volatility_maxima;  // absent when degenerate
  sentiment::SentimentMaxima sentiment_maxima;
  std::vector<std::string> universe_warnings;
};

/// Validates every member, aggregates raw inputs and reduces the
/// cross-sectional maxima. Throws kEmptyUniverse, kMissingBaseChain,
/// kConfigError (duplicate token) or the validation error of a bad input.
ScoringContext build_context(const std::vector<TokenInput>& inputs, const FrameworkParams& params);

struct TokenReport {
  TokenId id;
  ChainRole role;
  std::optional<double> vds;
  std::optional<double> wds;
  std::optional<double> sas;
  std::optional<volatility::VolatilityAggregate> volatility;
  std::optional<volatility::VdsBreakdown> vds_breakdown;
  std::optional<whale::ConcentrationResult> concentration;
  std::optional<sentiment::FgiIndicators> fgi;
  std::optional<double> instability;
  std::optional<double> shock;
  std::optional<DateRange> window;
  std::vector<std::string> warnings;
};

struct FragilityReport {
  FrameworkParams params;
  std::optional<DateRange> window;
  std::vector<TokenReport> tokens;
  std::vector<warning::WarningFlag> flags;
  std::vector<warning::JointEvent> joint_events;
  std::vector<warning::BucketAssignment> buckets;
};

/// Scores every member. A token whose score cannot be computed keeps that
/// score absent and records why in its warnings.
FragilityReport score_universe(const ScoringContext& ctx);

}  // namespace me2f::scoring
