#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace me2f {

/// A UTC calendar day. Ordering and arithmetic work on whole days.
class Date {
 public:
  Date() = default;
  explicit constexpr Date(std::chrono::sys_days days) : days_(days) {}
  constexpr Date(int year, unsigned month, unsigned day)
      : days_(std::chrono::year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                          std::chrono::day{day}}) {}

  /// Parses `YYYY-MM-DD`. Throws Error(kParseError) on anything else.
  static Date parse(std::string_view text);

  std::string iso() const;

  constexpr std::chrono::sys_days days() const { return days_; }

  /// Seconds since the Unix epoch at midnight UTC.
  constexpr long long unix_seconds() const {
    return std::chrono::duration_cast<std::chrono::seconds>(days_.time_since_epoch()).count();
  }

  constexpr Date plus_days(int n) const { return Date(days_ + std::chrono::days{n}); }

  friend constexpr int days_between(Date from, Date to) {
    return static_cast<int>((to.days_ - from.days_).count());
  }

  friend constexpr auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

struct DateRange {
  Date first;
  Date last;

  std::string label() const { return first.iso() + "_" + last.iso(); }
  friend bool operator==(const DateRange&, const DateRange&) = default;
};

}  // namespace me2f
