#include "me2f/sentiment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::sentiment {
namespace {

double ratio_or_zero(double value, double maximum) { return maximum > 0 ? value / maximum : 0.0; }

}  // namespace

std::string_view to_string(FgiBand band) {
  switch (band) {
    case FgiBand::kExtremeFear: return "ExtremeFear";
    case FgiBand::kFear: return "Fear";
    case FgiBand::kNeutral: return "Neutral";
    case FgiBand::kGreed: return "Greed";
    case FgiBand::kExtremeGreed: return "ExtremeGreed";
  }
  return "Unknown";
}

FgiBand classify_fgi(double value) {
  if (!(value >= 0 && value <= 100)) {
    throw Error(ErrorCode::kFgiOutOfRange, fmt::format("FGI {} outside [0,100]", value));
  }
  if (value < 20) return FgiBand::kExtremeFear;
  if (value < 40) return FgiBand::kFear;
  if (value < 60) return FgiBand::kNeutral;
  if (value < 80) return FgiBand::kGreed;
  return FgiBand::kExtremeGreed;
}

double FgiIndicators::neutral_deviation() const { return std::abs(f_bar - 50.0); }

FgiIndicators fgi_indicators(const SentimentSeries& series) {
  validate_sentiment(series);
  const auto& pts = series.points;
  if (pts.size() < 2) {
    throw Error(ErrorCode::kInsufficientHistory,
                fmt::format("{}: {} sentiment point(s), need at least 2", series.token_id, pts.size()));
  }

  FgiIndicators out;
  out.token_id = series.token_id;
  out.window = DateRange{pts.front().date, pts.back().date};
  out.f_max = pts.front().fgi;
  out.f_min = pts.front().fgi;

  double sum = 0;
  std::size_t greed = 0;
  std::size_t fear = 0;
  for (std::size_t t = 0; t < pts.size(); ++t) {
    const double f = pts[t].fgi;
    sum += f;
    out.f_max = std::max(out.f_max, f);
    out.f_min = std::min(out.f_min, f);
    switch (classify_fgi(f)) {
      case FgiBand::kExtremeGreed: ++greed; break;
      case FgiBand::kExtremeFear: ++fear; break;
      default: break;
    }
    if (t > 0) {
      out.delta_f_max = std::max(out.delta_f_max, std::abs(f - pts[t - 1].fgi));
      if (pts[t].abs_return) {
        out.delta_p_max = std::max(out.delta_p_max, *pts[t].abs_return);
      }
    }
  }
  const auto count = static_cast<double>(pts.size());
  out.f_bar = sum / count;
  out.r_f = out.f_max - out.f_min;
  out.q_g = static_cast<double>(greed) / count;
  out.q_f = static_cast<double>(fear) / count;
  return out;
}

std::vector<std::string> SentimentMaxima::degenerate_components() const {
  std::vector<std::string> out;
  if (!(r_f > 0)) out.emplace_back("sentiment range");
  if (!(extreme_share > 0)) out.emplace_back("extreme-state share");
  if (!(neutral_deviation > 0)) out.emplace_back("deviation from neutral");
  if (!(delta_f_max > 0)) out.emplace_back("largest FGI jump");
  if (!(delta_p_max > 0)) out.emplace_back("largest price move");
  return out;
}

SentimentMaxima universe_maxima(std::span<const FgiIndicators> indicators) {
  SentimentMaxima m;
  for (const auto& ind : indicators) {
    m.r_f = std::max(m.r_f, ind.r_f);
    m.extreme_share = std::max(m.extreme_share, ind.extreme_share());
    m.neutral_deviation = std::max(m.neutral_deviation, ind.neutral_deviation());
    m.delta_f_max = std::max(m.delta_f_max, ind.delta_f_max);
    m.delta_p_max = std::max(m.delta_p_max, ind.delta_p_max);
  }
  return m;
}

double instability_index(const FgiIndicators& ind, const SentimentMaxima& maxima) {
  return (ratio_or_zero(ind.r_f, maxima.r_f) + ratio_or_zero(ind.extreme_share(), maxima.extreme_share) +
          ratio_or_zero(ind.neutral_deviation(), maxima.neutral_deviation)) /
         3.0;
}

double shock_index(const FgiIndicators& ind, const SentimentMaxima& maxima) {
  return ratio_or_zero(ind.delta_f_max, maxima.delta_f_max) * ratio_or_zero(ind.delta_p_max, maxima.delta_p_max);
}

double sas(double u, double k, double delta) { return u * std::pow(k, delta); }

}  // namespace me2f::sentiment
