#pragma once

#include <chrono>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "me2f/domain.hpp"
#include "me2f/error.hpp"

namespace me2f::ingest {

/// Time source for rate limiting and retry delays; swapped for a simulated
/// clock in tests.
class Clock {
 public:
  using Duration = std::chrono::milliseconds;
  using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_for(Duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() override;
  void sleep_for(Duration d) override;
};

/// Sliding-window limiter: at most `max_requests` calls to acquire() return
/// within any half-open 60 second interval. Blocks (via the clock) otherwise.
class RateLimiter {
 public:
  RateLimiter(int max_requests_per_minute, Clock& clock);

  void acquire();

 private:
  int max_requests_;
  Clock& clock_;
  std::mutex mutex_;
  std::deque<Clock::TimePoint> issued_;
};

struct FieldPaths {
  std::string records = "";  // path to the record array; empty = document root
  std::string date;
  std::string high;
  std::string low;
  std::string close;
  std::string volume;      // optional; missing values read as 0
  std::string market_cap;  // optional; missing values read as 0
  std::string date_format = "iso";  // iso | unix_s | unix_ms
};

struct Pagination {
  std::string page_param;  // empty disables pagination
  int first_page = 1;
  int page_size = 0;  // > 0: a shorter page ends the listing
  std::string page_size_param;
  int max_pages = 100;
};

/// Declarative description of one market-data provider.
struct ProviderEndpointSpec {
  std::string name;
  std::string base_url;  // scheme://host[:port]
  // Placeholders: {token} {from} {to} {from_unix} {to_unix}
  std::string path_template;
  std::optional<std::string> api_key_header;
  int rate_limit = 30;  // requests per minute
  double timeout_seconds = 10;
  Pagination pagination;
  FieldPaths fields;

  void validate() const;

  /// `ME2F_API_KEY_<NAME>` with the name upper-cased and non-alphanumerics as '_'.
  std::string api_key_env() const;

  static ProviderEndpointSpec from_json(const nlohmann::json& j);
};

/// Reads a provider config file: either one provider object or
/// `{"providers": [...]}`. Throws kConfigError.
std::vector<ProviderEndpointSpec> load_provider_config(const std::filesystem::path& path);

struct HttpResponse {
  int status = 0;
  std::string body;
  std::map<std::string, std::string> headers;  // lower-cased names
};

using HttpHeaders = std::map<std::string, std::string>;

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// `url` is absolute. Transport failures throw kHttpError.
  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers, Clock::Duration timeout) = 0;
};

/// cpp-httplib backed transport (http and https).
class HttplibTransport final : public HttpTransport {
 public:
  HttpResponse get(const std::string& url, const HttpHeaders& headers, Clock::Duration timeout) override;
};

struct CacheKey {
  std::string provider;
  TokenId token;
  std::string kind;
  DateRange range;
};

struct CacheEntry {
  CacheKey key;
  long long fetched_at = 0;  // unix seconds
  std::string payload;
  std::string checksum;  // hex SHA-256 of payload
};

std::string sha256_hex(std::string_view data);

/// On-disk response cache laid out as
/// `<root>/<provider>/<token>/<kind>/<range>.json` plus a `.sha256` sidecar
/// holding the checksum and fetch time. Entries are write-once.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path payload_path(const CacheKey& key) const;
  std::filesystem::path sidecar_path(const CacheKey& key) const;

  /// Throws kCacheCorrupt when the payload does not match its checksum.
  std::optional<CacheEntry> get(const CacheKey& key) const;

  /// Returns false (and leaves the entry alone) if the key is already cached.
  bool put(const CacheKey& key, std::string_view payload, long long fetched_at);

 private:
  std::filesystem::path root_;
  std::mutex write_mutex_;
};

/// Raised when the provider's data leaves days of the requested range
/// uncovered. The partial series is kept for callers that accept gaps.
class PartialRangeError : public Error {
 public:
  PartialRangeError(std::vector<Date> missing, TokenSeries partial);

  const std::vector<Date>& missing() const { return missing_; }
  const TokenSeries& partial() const { return partial_; }

 private:
  std::vector<Date> missing_;
  TokenSeries partial_;
};

/// Converts cached or freshly fetched page bodies into a series restricted to
/// `range`. Throws kParseError on malformed bodies.
TokenSeries parse_daily_pages(const ProviderEndpointSpec& spec, const TokenId& token, const DateRange& range,
                              const std::vector<std::string>& pages);

class MarketDataClient {
 public:
  MarketDataClient(ProviderEndpointSpec spec, HttpTransport& transport, Clock& clock,
                   std::optional<std::filesystem::path> cache_dir);

  /// Cache-first daily bars. On a miss, pages through the provider (each
  /// request rate limited), retries a 429 once after its Retry-After delay,
  /// then caches the complete response. Throws kHttpError, kRateLimited,
  /// kParseError or PartialRangeError.
  TokenSeries fetch_daily(const TokenId& token, const DateRange& range);

  int network_calls() const { return network_calls_; }

 private:
  std::string page_url(const TokenId& token, const DateRange& range, std::optional<int> page) const;
  HttpResponse request(const std::string& url);

  ProviderEndpointSpec spec_;
  HttpTransport& transport_;
  Clock& clock_;
  RateLimiter limiter_;
  std::optional<ResponseCache> cache_;
  int network_calls_ = 0;
};

}  // namespace me2f::ingest
