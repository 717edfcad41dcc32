#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "me2f/ingest/remote.hpp"

namespace testkit {

using me2f::Date;
using me2f::DailyBar;
using me2f::TokenSeries;
using me2f::ingest::Clock;
using me2f::ingest::HttpHeaders;
using me2f::ingest::HttpResponse;
using me2f::ingest::HttpTransport;
using nlohmann::json;

class SimClock final : public Clock {
 public:
  TimePoint now() override { return now_; }
  void sleep_for(Duration d) override { now_ += d; }
  void advance(Duration d) { now_ += d; }

 private:
  TimePoint now_{};
};

// Serves the bars of one series as paged JSON, optionally dropping days or
// answering with scripted statuses first.
class FakeProvider final : public HttpTransport {
 public:
  explicit FakeProvider(TokenSeries series, SimClock& clock) : series_(std::move(series)), clock_(clock) {}

  HttpResponse get(const std::string& url, const HttpHeaders& headers, Clock::Duration) override {
    times.push_back(clock_.now());
    urls.push_back(url);
    last_headers = headers;
    if (!scripted.empty()) {
      auto r = scripted.front();
      scripted.pop_front();
      return r;
    }
    int page = 1;
    if (auto pos = url.find("page="); pos != std::string::npos) page = std::stoi(url.substr(pos + 5));
    std::vector<DailyBar> served;
    for (const auto& b : series_.bars) {
      if (!drop || b.date != *drop) served.push_back(b);
    }
    json records = json::array();
    const std::size_t begin = static_cast<std::size_t>((page - 1) * page_size);
    for (std::size_t i = begin; i < served.size() && i < begin + page_size; ++i) {
      const auto& b = served[i];
      records.push_back({{"day", b.date.iso()},
                         {"ohlc", {{"h", b.high}, {"l", b.low}, {"c", b.close}}},
                         {"vol", b.volume_usd},
                         {"mcap", b.market_cap_usd}});
    }
    return {200, json{{"data", records}}.dump(), {}};
  }

  std::vector<Clock::TimePoint> times;
  std::vector<std::string> urls;
  HttpHeaders last_headers;
  std::deque<HttpResponse> scripted;
  std::optional<Date> drop;
  std::size_t page_size = 10;

 private:
  TokenSeries series_;
  SimClock& clock_;
};

/// Provider description matching FakeProvider's response layout.
inline me2f::ingest::ProviderEndpointSpec provider_spec(int rate_limit = 30) {
  return me2f::ingest::ProviderEndpointSpec::from_json(json{
      {"name", "fake"},
      {"base_url", "http://localhost"},
      {"path_template", "/coins/{token}/daily?from={from}&to={to}"},
      {"api_key_header", "X-Api-Key"},
      {"rate_limit", rate_limit},
      {"pagination", {{"page_param", "page"}, {"page_size", 10}}},
      {"fields",
       {{"records", "data"},
        {"date", "day"},
        {"high", "ohlc.h"},
        {"low", "ohlc.l"},
        {"close", "ohlc.c"},
        {"volume", "vol"},
        {"market_cap", "mcap"}}}});
}

}  // namespace testkit
