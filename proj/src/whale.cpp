#include "me2f/whale.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::whale {
namespace {

constexpr double kRangeTolerance = 1e-12;

// Neumaier-compensated sum; keeps equal-share snapshots exactly on the
// lower bound of the HHI range.
template <class Fn>
double compensated_sum(const std::vector<double>& values, Fn&& transform) {
  double sum = 0;
  double carry = 0;
  for (double raw : values) {
    const double v = transform(raw);
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

void check_length(const HolderSnapshot& snapshot, int n) {
  if (snapshot.shares.size() > static_cast<std::size_t>(n)) {
    throw Error(ErrorCode::kInvalidShares,
                fmt::format("{}: snapshot holds {} shares, more than n = {}", snapshot.token_id,
                            snapshot.shares.size(), n));
  }
}

// Same quantity as internal_concentration, written as
// sum_{i<j} (s_i - s_j)^2 / (c^2 (n - 1)) over the n slots, absent holders
// counting as zero. Equal shares give exactly 0 and a lone holder exactly 1,
// which the h/c^2 - 1/n form only reaches up to rounding.
double dispersion_concentration(const std::vector<double>& shares, double c, int n) {
  std::vector<double> terms;
  terms.reserve(shares.size() * (shares.size() + 1) / 2);
  for (std::size_t i = 0; i < shares.size(); ++i) {
    for (std::size_t j = i + 1; j < shares.size(); ++j) {
      const double d = shares[i] - shares[j];
      terms.push_back(d * d);
    }
  }
  const double pairs = compensated_sum(terms, [](double t) { return t; });
  const double squares = compensated_sum(shares, [](double s) { return s * s; });
  const double empty_slots = static_cast<double>(n) - static_cast<double>(shares.size());
  const double spread = pairs + empty_slots * squares;
  return std::clamp(spread / ((c * c) * (n - 1)), 0.0, 1.0);
}

}  // namespace

double cumulative_share(const HolderSnapshot& snapshot) {
  validate_snapshot(snapshot);
  // float dust above 1 is tolerated by validation
  return std::min(1.0, compensated_sum(snapshot.shares, [](double s) { return s; }));
}

double hhi(const HolderSnapshot& snapshot) {
  validate_snapshot(snapshot);
  return compensated_sum(snapshot.shares, [](double s) { return s * s; });
}

double internal_concentration(double c, double h, int n) {
  if (!(c > 0)) {
    throw Error(ErrorCode::kZeroCumulativeShare, "internal concentration is undefined at zero cumulative share");
  }
  if (n < 2) {
    throw Error(ErrorCode::kInvalidParams, fmt::format("n must be >= 2, got {}", n));
  }
  const double c2 = c * c;
  const double inv_n = 1.0 / n;
  if (h < c2 * inv_n - kRangeTolerance || h > c2 + kRangeTolerance) {
    throw Error(ErrorCode::kHOutOfRange, fmt::format("h = {} outside [{}, {}]", h, c2 * inv_n, c2));
  }
  const double value = (h / c2 - inv_n) / (1.0 - inv_n);
  return std::clamp(value, 0.0, 1.0);
}

ConcentrationResult concentration(const HolderSnapshot& snapshot, int n) {
  check_length(snapshot, n);
  ConcentrationResult out;
  out.token_id = snapshot.token_id;
  out.c = cumulative_share(snapshot);
  out.h = hhi(snapshot);
  if (out.c == 0) {
    return out;
  }
  internal_concentration(out.c, out.h, n);  // range checks
  out.n_internal = dispersion_concentration(snapshot.shares, out.c, n);
  out.wds = out.c * out.n_internal;
  return out;
}

}  // namespace me2f::whale
