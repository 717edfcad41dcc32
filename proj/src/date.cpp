#include "me2f/date.hpp"

#include <charconv>

#include <fmt/format.h>

#include "me2f/error.hpp"

namespace me2f {
namespace {

template <class T>
bool parse_field(std::string_view text, T& out) {
  if (text.empty()) {
    return false;
  }
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Date Date::parse(std::string_view text) {
  int year = 0;
  unsigned month = 0;
  unsigned day = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_field(text.substr(0, 4), year) ||
      !parse_field(text.substr(5, 2), month) || !parse_field(text.substr(8, 2), day)) {
    throw Error(ErrorCode::kParseError, fmt::format("expected YYYY-MM-DD, got '{}'", text));
  }
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}};
  if (!ymd.ok()) {
    throw Error(ErrorCode::kParseError, fmt::format("'{}' is not a calendar date", text));
  }
  return Date(std::chrono::sys_days(ymd));
}

std::string Date::iso() const {
  std::chrono::year_month_day ymd(days_);
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                     static_cast<unsigned>(ymd.day()));
}

}  // namespace me2f
