#include <deque>
#include <random>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include <fmt/format.h>

#include "checks.hpp"
#include "me2f/ingest/remote.hpp"
#include "fakes.hpp"
#include "testkit.hpp"

using namespace me2f;
using namespace me2f::ingest;
using nlohmann::json;
using testkit::FakeProvider;
using testkit::SimClock;
using testkit::provider_spec;

namespace {

TokenSeries contiguous_series(int days) {
  std::mt19937_64 rng(99);
  auto s = testkit::random_series(rng, "DOGE", days);
  for (int i = 0; i < days; ++i) s.bars[static_cast<std::size_t>(i)].date = Date(2024, 3, 1).plus_days(i);
  return s;
}

DateRange range_of(const TokenSeries& s) { return {s.bars.front().date, s.bars.back().date}; }

}  // namespace

TEST_CASE("provider configuration") {
  auto spec = provider_spec();
  CHECK(spec.api_key_env() == "ME2F_API_KEY_FAKE");
  CHECK(spec.fields.high == "ohlc.h");

  testkit::TempDir dir;
  testkit::write_file(dir / "p.json", json{{"providers", {json::parse(R"({"name":"my-api","base_url":"https://x",
      "path_template":"/d","fields":{"date":"t","high":"h","low":"l","close":"c"}})")}}}
                                          .dump());
  auto specs = load_provider_config(dir / "p.json");
  REQUIRE(specs.size() == 1);
  CHECK(specs[0].api_key_env() == "ME2F_API_KEY_MY_API");

  testkit::write_file(dir / "bad.json", R"({"name":"x","base_url":"https://x","path_template":"/d","rate_limit":0,
      "fields":{"date":"t","high":"h","low":"l","close":"c"}})");
  CHECK_CODE(load_provider_config(dir / "bad.json"), ErrorCode::kConfigError);
  CHECK_CODE(load_provider_config(dir / "absent.json"), ErrorCode::kConfigError);
}

TEST_CASE("checksums") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("cache entries are write-once and checksummed") {
  testkit::TempDir dir;
  ResponseCache cache(dir.path());
  CacheKey key{"fake", "DOGE", "daily", {Date(2024, 1, 1), Date(2024, 1, 31)}};
  CHECK(cache.payload_path(key) == dir.path() / "fake" / "DOGE" / "daily" / "2024-01-01_2024-01-31.json");
  CHECK_FALSE(cache.get(key));
  CHECK(cache.put(key, "payload-1", 1700000000));
  CHECK_FALSE(cache.put(key, "payload-2", 1700000001));
  auto e = cache.get(key);
  REQUIRE(e);
  CHECK(e->payload == "payload-1");
  CHECK(e->fetched_at == 1700000000);
  CHECK(e->checksum == sha256_hex("payload-1"));

  testkit::write_file(cache.payload_path(key), "tampered");
  CHECK_CODE(cache.get(key), ErrorCode::kCacheCorrupt);
}

TEST_CASE("fetch pages through the provider and then serves from cache") {
  SimClock clock;
  auto series = contiguous_series(25);
  FakeProvider fake(series, clock);
  testkit::TempDir dir;
  setenv("ME2F_API_KEY_FAKE", "secret", 1);

  MarketDataClient client(provider_spec(), fake, clock, dir.path());
  auto got = client.fetch_daily("DOGE", range_of(series));
  CHECK(got == series);
  CHECK(client.network_calls() == 3);  // pages of 10, 10, 5
  CHECK(fake.last_headers.at("X-Api-Key") == "secret");
  CHECK(fake.urls[0].find("from=2024-03-01") != std::string::npos);
  CHECK(fake.urls[1].find("page=2") != std::string::npos);
  unsetenv("ME2F_API_KEY_FAKE");

  MarketDataClient again(provider_spec(), fake, clock, dir.path());
  CHECK(again.fetch_daily("DOGE", range_of(series)) == series);
  CHECK(again.network_calls() == 0);

  // a narrower request is a different cache key
  DateRange sub{series.bars[2].date, series.bars[6].date};
  auto part = again.fetch_daily("DOGE", sub);
  CHECK(part.bars.size() == 5);
  CHECK(again.network_calls() > 0);
}

TEST_CASE("a 429 is retried once after its advertised delay") {
  SimClock clock;
  auto series = contiguous_series(5);
  FakeProvider fake(series, clock);
  fake.scripted.push_back({429, "slow down", {{"retry-after", "7"}}});
  MarketDataClient client(provider_spec(), fake, clock, std::nullopt);
  CHECK(client.fetch_daily("DOGE", range_of(series)) == series);
  REQUIRE(fake.times.size() >= 2);
  CHECK(fake.times[1] - fake.times[0] >= std::chrono::seconds(7));

  FakeProvider stubborn(series, clock);
  stubborn.scripted.push_back({429, "", {{"retry-after", "2"}}});
  stubborn.scripted.push_back({429, "", {{"retry-after", "2"}}});
  MarketDataClient c2(provider_spec(), stubborn, clock, std::nullopt);
  CHECK_CODE(c2.fetch_daily("DOGE", range_of(series)), ErrorCode::kRateLimited);
  CHECK(stubborn.times.size() == 2);
}

TEST_CASE("http errors carry the status and a body excerpt") {
  SimClock clock;
  auto series = contiguous_series(5);
  FakeProvider fake(series, clock);
  fake.scripted.push_back({503, std::string(500, 'x') + "tail", {}});
  MarketDataClient client(provider_spec(), fake, clock, std::nullopt);
  try {
    client.fetch_daily("DOGE", range_of(series));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kHttpError);
    const std::string what = e.what();
    CHECK(what.find("503") != std::string::npos);
    CHECK(what.find("tail") == std::string::npos);
  }

  FakeProvider garbage(series, clock);
  garbage.scripted.push_back({200, "not json", {}});
  MarketDataClient c2(provider_spec(), garbage, clock, std::nullopt);
  CHECK_CODE(c2.fetch_daily("DOGE", range_of(series)), ErrorCode::kParseError);
}

TEST_CASE("a missing day is reported and nothing is cached") {
  SimClock clock;
  auto series = contiguous_series(30);
  FakeProvider fake(series, clock);
  fake.drop = series.bars[17].date;
  testkit::TempDir dir;
  MarketDataClient client(provider_spec(), fake, clock, dir.path());
  try {
    client.fetch_daily("DOGE", range_of(series));
    FAIL("expected a partial range");
  } catch (const PartialRangeError& e) {
    CHECK(e.code() == ErrorCode::kPartialRange);
    CHECK(e.missing() == std::vector<Date>{series.bars[17].date});
    CHECK(e.partial().bars.size() == 29);
  }
  CHECK_FALSE(ResponseCache(dir.path()).get({"fake", "DOGE", "daily", range_of(series)}));
}

TEST_CASE("rate limiter keeps every rolling minute within the limit") {
  SimClock clock;
  RateLimiter limiter(5, clock);
  std::vector<Clock::TimePoint> issued;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 60; ++i) {
    clock.advance(std::chrono::milliseconds(testkit::uniform_int(rng, 0, 4000)));
    limiter.acquire();
    issued.push_back(clock.now());
  }
  for (std::size_t i = 0; i < issued.size(); ++i) {
    int in_window = 0;
    for (std::size_t j = i; j < issued.size() && issued[j] - issued[i] < std::chrono::seconds(60); ++j) ++in_window;
    CHECK(in_window <= 5);
  }
}

TEST_CASE("the http transport talks to a local server") {
  httplib::Server server;
  server.Get("/ok", [](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Retry-After", "3");
    res.set_content("key=" + req.get_header_value("X-Api-Key"), "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttplibTransport transport;
  auto r = transport.get(fmt::format("http://127.0.0.1:{}/ok", port), {{"X-Api-Key", "k1"}}, std::chrono::seconds(5));
  CHECK(r.status == 200);
  CHECK(r.body == "key=k1");
  CHECK(r.headers.at("retry-after") == "3");
  auto missing = transport.get(fmt::format("http://127.0.0.1:{}/nope", port), {}, std::chrono::seconds(5));
  CHECK(missing.status == 404);

  server.stop();
  t.join();
  CHECK_CODE(transport.get(fmt::format("http://127.0.0.1:{}/ok", port), {}, std::chrono::seconds(1)),
             ErrorCode::kHttpError);
}
