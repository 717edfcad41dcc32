#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "me2f/domain.hpp"

namespace me2f::sentiment {

enum class FgiBand { kExtremeFear, kFear, kNeutral, kGreed, kExtremeGreed };

std::string_view to_string(FgiBand band);

/// Half-open bands at 20/40/60/80; 100 belongs to ExtremeGreed.
/// Throws kFgiOutOfRange outside [0,100].
FgiBand classify_fgi(double value);

struct FgiIndicators {
  TokenId token_id;
  double f_bar = 0;
  double f_max = 0;
  double f_min = 0;
  double r_f = 0;          // f_max - f_min
  double q_g = 0;          // fraction of points in ExtremeGreed
  double q_f = 0;          // fraction of points in ExtremeFear
  double delta_f_max = 0;  // largest one-step |change| in FGI
  double delta_p_max = 0;  // largest absolute one-day return, fraction
  std::optional<DateRange> window;

  double extreme_share() const { return q_g + q_f; }
  double neutral_deviation() const;
};

/// Requires >= 2 points (kInsufficientHistory). Step maxima run over
/// consecutive observations; the first point's return is not used.
FgiIndicators fgi_indicators(const SentimentSeries& series);

/// Cross-sectional maxima used by the instability and shock indices.
struct SentimentMaxima {
  double r_f = 0;
  double extreme_share = 0;
  double neutral_deviation = 0;
  double delta_f_max = 0;
  double delta_p_max = 0;

  /// Names of maxima equal to zero; their components evaluate to 0.
  std::vector<std::string> degenerate_components() const;
};

SentimentMaxima universe_maxima(std::span<const FgiIndicators> indicators);

/// Mean of the three normalized instability components, in [0,1].
double instability_index(const FgiIndicators& ind, const SentimentMaxima& maxima);

/// Product of the normalized FGI jump and the normalized price move, in [0,1].
double shock_index(const FgiIndicators& ind, const SentimentMaxima& maxima);

/// u * k^delta.
double sas(double u, double k, double delta);

}  // namespace me2f::sentiment
