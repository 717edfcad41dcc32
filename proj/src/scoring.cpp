#include "me2f/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::scoring {
namespace {

void validate_aggregate(const volatility::VolatilityAggregate& agg) {
  const bool finite = std::isfinite(agg.avg_vol) && std::isfinite(agg.max_vol) && std::isfinite(agg.max_volume) &&
                      std::isfinite(agg.max_mcap);
  if (!finite || agg.avg_vol < 0 || agg.avg_vol > agg.max_vol || agg.max_volume < 0 || agg.max_mcap < 0) {
    throw Error(ErrorCode::kInvalidAggregate,
                fmt::format("{}: volatility summary violates 0 <= avg <= max or has negative scale", agg.token_id));
  }
}

void validate_indicators(const sentiment::FgiIndicators& ind) {
  auto in_unit = [](double v) { return v >= 0 && v <= 1; };
  auto in_fgi = [](double v) { return v >= 0 && v <= 100; };
  const bool ok = in_fgi(ind.f_min) && in_fgi(ind.f_max) && ind.f_min <= ind.f_bar && ind.f_bar <= ind.f_max &&
                  in_unit(ind.q_g) && in_unit(ind.q_f) && ind.q_g + ind.q_f <= 1 + 1e-12 && ind.delta_f_max >= 0 &&
                  ind.delta_f_max <= 100 && ind.delta_p_max >= 0 && std::isfinite(ind.delta_p_max) &&
                  std::abs(ind.r_f - (ind.f_max - ind.f_min)) <= 1e-9;
  if (!ok) {
    throw Error(ErrorCode::kInvalidAggregate, fmt::format("{}: FGI indicator row is inconsistent", ind.token_id));
  }
}

std::optional<DateRange> merge(std::optional<DateRange> a, const std::optional<DateRange>& b) {
  if (!b) return a;
  if (!a) return b;
  return DateRange{std::min(a->first, b->first), std::max(a->last, b->last)};
}

}  // namespace

ScoringContext build_context(const std::vector<TokenInput>& inputs, const FrameworkParams& params) {
  params.validate();
  if (inputs.empty()) {
    throw Error(ErrorCode::kEmptyUniverse, "the universe contains no tokens");
  }

  ScoringContext ctx;
  ctx.params = params;
  for (const TokenInput& in : inputs) {
    if (ctx.members.contains(in.id)) {
      throw Error(ErrorCode::kConfigError, fmt::format("token '{}' listed twice", in.id));
    }
    ctx.order.push_back(in.id);
    ContextMember& member = ctx.members[in.id];
    member.role = in.role;

    if (const auto* series = std::get_if<TokenSeries>(&in.volatility)) {
      TokenSeries named = *series;
      named.token_id = in.id;
      validate_series(named);
      try {
        member.aggregate = volatility::aggregate(named, params.scale_unit);
      } catch (const Error& e) {
        member.warnings.emplace_back(e.what());
      }
    } else {
      auto agg = std::get<volatility::VolatilityAggregate>(in.volatility);
      agg.token_id = in.id;
      validate_aggregate(agg);
      member.aggregate = std::move(agg);
    }

    if (in.holders) {
      HolderSnapshot snapshot = *in.holders;
      snapshot.token_id = in.id;
      member.holders = validate_snapshot(snapshot);
    }

    if (in.sentiment) {
      if (const auto* series = std::get_if<SentimentSeries>(&*in.sentiment)) {
        SentimentSeries named = *series;
        named.token_id = in.id;
        validate_sentiment(named);
        try {
          member.fgi = sentiment::fgi_indicators(named);
        } catch (const Error& e) {
          member.warnings.emplace_back(e.what());
        }
      } else {
        auto ind = std::get<sentiment::FgiIndicators>(*in.sentiment);
        ind.token_id = in.id;
        validate_indicators(ind);
        member.fgi = std::move(ind);
      }
    }
  }

  for (const auto& [id, member] : ctx.members) {
    if (const auto& base = member.role.base()) {
      auto it = ctx.members.find(*base);
      if (it == ctx.members.end() || !it->second.role.is_standalone()) {
        throw Error(ErrorCode::kMissingBaseChain,
                    fmt::format("'{}' is hosted on '{}', which is not a standalone member", id, *base));
      }
    }
  }

  std::vector<volatility::VolatilityAggregate> aggs;
  std::vector<sentiment::FgiIndicators> indicators;
  for (const TokenId& id : ctx.order) {
    const ContextMember& m = ctx.members.at(id);
    if (m.aggregate) aggs.push_back(*m.aggregate);
    if (m.fgi) indicators.push_back(*m.fgi);
  }
  if (!aggs.empty()) {
    try {
      ctx.volatility_maxima = volatility::universe_maxima(aggs);
    } catch (const Error& e) {
      ctx.universe_warnings.push_back(fmt::format("degenerate volatility normalization ({})", e.what()));
    }
  }
  ctx.sentiment_maxima = sentiment::universe_maxima(indicators);
  return ctx;
}

FragilityReport score_universe(const ScoringContext& ctx) {
  FragilityReport report;
  report.params = ctx.params;

  volatility::Universe universe;
  for (const auto& [id, m] : ctx.members) {
    if (m.aggregate) {
      universe.emplace(id, volatility::UniverseMember{*m.aggregate, m.role});
    }
  }

  bool any_sentiment = false;
  for (const auto& [id, m] : ctx.members) {
    any_sentiment = any_sentiment || m.fgi.has_value();
  }
  std::vector<std::string> sentiment_notes;
  if (any_sentiment) {
    for (const auto& name : ctx.sentiment_maxima.degenerate_components()) {
      sentiment_notes.push_back(fmt::format("degenerate sentiment maximum: {} is zero for every token", name));
    }
  }

  for (const TokenId& id : ctx.order) {
    const ContextMember& m = ctx.members.at(id);
    TokenReport tr;
    tr.id = id;
    tr.role = m.role;
    tr.warnings = m.warnings;
    tr.volatility = m.aggregate;
    tr.fgi = m.fgi;
    if (m.aggregate) tr.window = m.aggregate->window;
    if (m.fgi) tr.window = merge(tr.window, m.fgi->window);

    if (m.aggregate) {
      if (!ctx.volatility_maxima) {
        tr.vds = 0.0;
        tr.warnings.insert(tr.warnings.end(), ctx.universe_warnings.begin(), ctx.universe_warnings.end());
      } else {
        try {
          tr.vds_breakdown = volatility::vds_breakdown(id, universe, *ctx.volatility_maxima, ctx.params);
          tr.vds = tr.vds_breakdown->vds;
        } catch (const Error& e) {
          tr.warnings.emplace_back(e.what());
        }
      }
    }

    if (m.holders) {
      try {
        tr.concentration = whale::concentration(*m.holders, ctx.params.n);
        tr.wds = tr.concentration->wds;
      } catch (const Error& e) {
        tr.warnings.emplace_back(e.what());
      }
    }

    if (m.fgi) {
      tr.instability = sentiment::instability_index(*m.fgi, ctx.sentiment_maxima);
      tr.shock = sentiment::shock_index(*m.fgi, ctx.sentiment_maxima);
      tr.sas = sentiment::sas(*tr.instability, *tr.shock, ctx.params.delta);
      tr.warnings.insert(tr.warnings.end(), sentiment_notes.begin(), sentiment_notes.end());
    }

    report.window = merge(report.window, tr.window);
    report.tokens.push_back(std::move(tr));
  }
  return report;
}

}  // namespace me2f::scoring
