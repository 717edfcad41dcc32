#pragma once

#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "me2f/domain.hpp"

namespace me2f::warning {

enum class Metric { kVds, kWds, kSas };

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view text);

struct ScorePoint {
  Date date;
  double value = 0;
};

struct ScoreSeries {
  TokenId token_id;
  Metric metric = Metric::kVds;
  std::vector<ScorePoint> points;  // date-ascending
};

struct WarningFlag {
  TokenId token_id;
  Metric metric = Metric::kVds;
  Date date;
  double value = 0;
  double window_percentile = 0;

  friend bool operator==(const WarningFlag&, const WarningFlag&) = default;
};

/// Two metrics of one token flagged within the joint window. `first < second`.
struct JointEvent {
  TokenId token_id;
  Date date;
  Metric first = Metric::kVds;
  Metric second = Metric::kSas;

  friend auto operator<=>(const JointEvent&, const JointEvent&) = default;
};

enum class ActionBucket { kTightenRisk, kGovernanceWatch, kStandardMonitoring };

std::string_view to_string(ActionBucket bucket);
std::optional<ActionBucket> parse_bucket(std::string_view text);

struct BucketAssignment {
  TokenId token_id;
  Date date;
  ActionBucket bucket = ActionBucket::kStandardMonitoring;
  std::vector<Metric> active;  // metrics flagged within the joint window

  friend bool operator==(const BucketAssignment&, const BucketAssignment&) = default;
};

struct WarningSettings {
  int window_days = 90;
  double threshold = 0.90;
  int x_days = 3;

  void validate() const;
};

/// Percentile of the last value within `window`: the share of the other window
/// values lying strictly below it. A tie group sits at its lowest rank, so a
/// flat window scores 0 and the strict window maximum scores 1.
double window_percentile(const std::vector<double>& window);

/// Flags every point whose trailing-window percentile (window counted in
/// observations, inclusive of the point) reaches `threshold`. Points before
/// the first full window are never flagged.
/// Throws kWindowTooShort when window_days < 2, kInvalidParams when the
/// threshold is outside (0,1), kNonMonotonicDates on unordered points.
std::vector<WarningFlag> rolling_flags(const ScoreSeries& series, int window_days, double threshold);

/// One event per (token, later flag date, metric pair) for every pair of flags
/// on distinct metrics of the same token at most `x_days` apart. Sorted and
/// free of duplicates.
std::vector<JointEvent> joint_spike(const std::map<Metric, std::vector<WarningFlag>>& flags_by_metric, int x_days);

ActionBucket action_bucket(const std::set<Metric>& flagged);

/// Bucket for every (token, date) carrying a flag; metrics count as active
/// when flagged within the preceding `x_days` (inclusive).
std::vector<BucketAssignment> assign_buckets(const std::vector<WarningFlag>& flags, int x_days);

struct WarningOutcome {
  std::vector<WarningFlag> flags;
  std::vector<JointEvent> joint_events;
  std::vector<BucketAssignment> buckets;
};

WarningOutcome evaluate(const std::vector<ScoreSeries>& history, const WarningSettings& settings);

}  // namespace me2f::warning
