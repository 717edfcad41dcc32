#pragma once

#include "me2f/domain.hpp"

namespace me2f::whale {

struct ConcentrationResult {
  TokenId token_id;
  double c = 0;           // cumulative top-n share
  double h = 0;           // Herfindahl-Hirschman index of the top-n shares
  double n_internal = 0;  // HHI rescaled onto [0,1] for fixed c
  double wds = 0;
};

// The snapshot is validated first; invalid shares raise kInvalidShares.
double cumulative_share(const HolderSnapshot& snapshot);
double hhi(const HolderSnapshot& snapshot);

/// ((h / c^2) - 1/n) / (1 - 1/n). Requires c > 0, n >= 2 and h in
/// [c^2/n, c^2] up to 1e-12; the result is clamped onto [0,1].
double internal_concentration(double c, double h, int n);

/// Full breakdown. A snapshot with zero cumulative share scores 0.
ConcentrationResult concentration(const HolderSnapshot& snapshot, int n);

inline double wds(const HolderSnapshot& snapshot, int n) { return concentration(snapshot, n).wds; }

}  // namespace me2f::whale
