#include "me2f/warning.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f::warning {

std::string_view to_string(Metric metric) {
  switch (metric) {
    case Metric::kVds: return "VDS";
    case Metric::kWds: return "WDS";
    case Metric::kSas: return "SAS";
  }
  return "?";
}

std::optional<Metric> parse_metric(std::string_view text) {
  for (Metric m : {Metric::kVds, Metric::kWds, Metric::kSas}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

std::string_view to_string(ActionBucket bucket) {
  switch (bucket) {
    case ActionBucket::kTightenRisk: return "TightenRisk";
    case ActionBucket::kGovernanceWatch: return "GovernanceWatch";
    case ActionBucket::kStandardMonitoring: return "StandardMonitoring";
  }
  return "?";
}

std::optional<ActionBucket> parse_bucket(std::string_view text) {
  for (ActionBucket b : {ActionBucket::kTightenRisk, ActionBucket::kGovernanceWatch, ActionBucket::kStandardMonitoring}) {
    if (text == to_string(b)) return b;
  }
  return std::nullopt;
}

void WarningSettings::validate() const {
  if (window_days < 2) {
    throw Error(ErrorCode::kWindowTooShort, fmt::format("window must cover at least 2 points, got {}", window_days));
  }
  if (!(threshold > 0 && threshold < 1)) {
    throw Error(ErrorCode::kInvalidParams, fmt::format("threshold must lie in (0,1), got {}", threshold));
  }
  if (x_days < 0) {
    throw Error(ErrorCode::kInvalidParams, fmt::format("x_days must be >= 0, got {}", x_days));
  }
}

double window_percentile(const std::vector<double>& window) {
  if (window.size() < 2) {
    return 0;
  }
  const double current = window.back();
  const auto below = std::count_if(window.begin(), window.end(), [current](double v) { return v < current; });
  return static_cast<double>(below) / static_cast<double>(window.size() - 1);
}

std::vector<WarningFlag> rolling_flags(const ScoreSeries& series, int window_days, double threshold) {
  WarningSettings{window_days, threshold, 0}.validate();
  const auto& pts = series.points;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(pts[i - 1].date < pts[i].date)) {
      throw Error(ErrorCode::kNonMonotonicDates,
                  fmt::format("{} {}: point dated {} does not follow {}", series.token_id, to_string(series.metric),
                              pts[i].date.iso(), pts[i - 1].date.iso()));
    }
  }

  std::vector<WarningFlag> flags;
  const auto window = static_cast<std::size_t>(window_days);
  std::vector<double> buf;
  buf.reserve(window);
  for (std::size_t t = window - 1; t < pts.size(); ++t) {
    buf.clear();
    for (std::size_t j = t + 1 - window; j <= t; ++j) {
      buf.push_back(pts[j].value);
    }
    const double pct = window_percentile(buf);
    if (pct >= threshold) {
      flags.push_back({series.token_id, series.metric, pts[t].date, pts[t].value, pct});
    }
  }
  return flags;
}

std::vector<JointEvent> joint_spike(const std::map<Metric, std::vector<WarningFlag>>& flags_by_metric, int x_days) {
  if (x_days < 0) {
    throw Error(ErrorCode::kInvalidParams, fmt::format("x_days must be >= 0, got {}", x_days));
  }
  std::set<JointEvent> events;
  for (auto a = flags_by_metric.begin(); a != flags_by_metric.end(); ++a) {
    for (auto b = std::next(a); b != flags_by_metric.end(); ++b) {
      for (const WarningFlag& fa : a->second) {
        for (const WarningFlag& fb : b->second) {
          if (fa.token_id != fb.token_id || std::abs(days_between(fa.date, fb.date)) > x_days) {
            continue;
          }
          events.insert({fa.token_id, std::max(fa.date, fb.date), std::min(a->first, b->first),
                         std::max(a->first, b->first)});
        }
      }
    }
  }
  return {events.begin(), events.end()};
}

ActionBucket action_bucket(const std::set<Metric>& flagged) {
  if (flagged.contains(Metric::kVds) && flagged.contains(Metric::kSas)) {
    return ActionBucket::kTightenRisk;
  }
  if (flagged.contains(Metric::kWds)) {
    return ActionBucket::kGovernanceWatch;
  }
  return ActionBucket::kStandardMonitoring;
}

std::vector<BucketAssignment> assign_buckets(const std::vector<WarningFlag>& flags, int x_days) {
  std::set<std::pair<TokenId, Date>> dates;
  for (const auto& f : flags) {
    dates.emplace(f.token_id, f.date);
  }
  std::vector<BucketAssignment> out;
  out.reserve(dates.size());
  for (const auto& [token, date] : dates) {
    std::set<Metric> active;
    for (const auto& f : flags) {
      const int age = days_between(f.date, date);
      if (f.token_id == token && age >= 0 && age <= x_days) {
        active.insert(f.metric);
      }
    }
    out.push_back({token, date, action_bucket(active), {active.begin(), active.end()}});
  }
  return out;
}

WarningOutcome evaluate(const std::vector<ScoreSeries>& history, const WarningSettings& settings) {
  settings.validate();
  WarningOutcome out;
  std::map<Metric, std::vector<WarningFlag>> by_metric;
  for (const ScoreSeries& series : history) {
    auto flags = rolling_flags(series, settings.window_days, settings.threshold);
    auto& bucket = by_metric[series.metric];
    bucket.insert(bucket.end(), flags.begin(), flags.end());
    out.flags.insert(out.flags.end(), flags.begin(), flags.end());
  }
  std::sort(out.flags.begin(), out.flags.end(), [](const WarningFlag& a, const WarningFlag& b) {
    return std::tie(a.token_id, a.date, a.metric) < std::tie(b.token_id, b.date, b.metric);
  });
  out.joint_events = joint_spike(by_metric, settings.x_days);
  out.buckets = assign_buckets(out.flags, settings.x_days);
  return out;
}

}  // namespace me2f::warning
