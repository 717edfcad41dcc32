#include "me2f/ingest/remote.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace me2f::ingest {

using nlohmann::json;

Clock::TimePoint SystemClock::now() {
  return std::chrono::time_point_cast<Duration>(std::chrono::steady_clock::now());
}

void SystemClock::sleep_for(Duration d) { std::this_thread::sleep_for(d); }

RateLimiter::RateLimiter(int max_requests_per_minute, Clock& clock)
    : max_requests_(max_requests_per_minute), clock_(clock) {
  if (max_requests_ <= 0) {
    throw Error(ErrorCode::kConfigError, "rate limit must be > 0 requests per minute");
  }
}

void RateLimiter::acquire() {
  constexpr auto kWindow = std::chrono::minutes(1);
  std::lock_guard lock(mutex_);
  while (true) {
    const auto now = clock_.now();
    while (!issued_.empty() && issued_.front() <= now - kWindow) {
      issued_.pop_front();
    }
    if (issued_.size() < static_cast<std::size_t>(max_requests_)) {
      issued_.push_back(now);
      return;
    }
    clock_.sleep_for(issued_.front() + kWindow - now);
  }
}

// ---------------------------------------------------------------------------
// Provider configuration

void ProviderEndpointSpec::validate() const {
  auto fail = [this](std::string_view why) {
    throw Error(ErrorCode::kConfigError, fmt::format("provider '{}': {}", name, why));
  };
  if (name.empty()) fail("missing name");
  if (!base_url.starts_with("http://") && !base_url.starts_with("https://")) fail("base_url must be http(s)");
  if (rate_limit <= 0) fail("rate_limit must be > 0");
  if (!(timeout_seconds > 0)) fail("timeout must be > 0");
  if (fields.date.empty() || fields.high.empty() || fields.low.empty() || fields.close.empty()) {
    fail("field paths for date, high, low and close are required");
  }
  if (fields.date_format != "iso" && fields.date_format != "unix_s" && fields.date_format != "unix_ms") {
    fail("date_format must be iso, unix_s or unix_ms");
  }
}

std::string ProviderEndpointSpec::api_key_env() const {
  std::string env = "ME2F_API_KEY_";
  for (char c : name) {
    env += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(static_cast<unsigned char>(c)))
                                                       : '_';
  }
  return env;
}

ProviderEndpointSpec ProviderEndpointSpec::from_json(const json& j) {
  try {
    ProviderEndpointSpec spec;
    spec.name = j.at("name").get<std::string>();
    spec.base_url = j.at("base_url").get<std::string>();
    spec.path_template = j.at("path_template").get<std::string>();
    if (j.contains("api_key_header")) spec.api_key_header = j["api_key_header"].get<std::string>();
    spec.rate_limit = j.value("rate_limit", spec.rate_limit);
    spec.timeout_seconds = j.value("timeout_seconds", spec.timeout_seconds);
    if (j.contains("pagination")) {
      const json& p = j["pagination"];
      spec.pagination.page_param = p.value("page_param", std::string());
      spec.pagination.first_page = p.value("first_page", 1);
      spec.pagination.page_size = p.value("page_size", 0);
      spec.pagination.page_size_param = p.value("page_size_param", std::string());
      spec.pagination.max_pages = p.value("max_pages", 100);
    }
    const json& f = j.at("fields");
    spec.fields.records = f.value("records", std::string());
    spec.fields.date = f.at("date").get<std::string>();
    spec.fields.high = f.at("high").get<std::string>();
    spec.fields.low = f.at("low").get<std::string>();
    spec.fields.close = f.at("close").get<std::string>();
    spec.fields.volume = f.value("volume", std::string());
    spec.fields.market_cap = f.value("market_cap", std::string());
    spec.fields.date_format = f.value("date_format", std::string("iso"));
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, fmt::format("invalid provider entry: {}", e.what()));
  }
}

std::vector<ProviderEndpointSpec> load_provider_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kConfigError, fmt::format("cannot open provider config '{}'", path.string()));
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, fmt::format("{}: {}", path.string(), e.what()));
  }
  std::vector<ProviderEndpointSpec> out;
  if (doc.contains("providers")) {
    for (const json& p : doc["providers"]) out.push_back(ProviderEndpointSpec::from_json(p));
  } else {
    out.push_back(ProviderEndpointSpec::from_json(doc));
  }
  if (out.empty()) {
    throw Error(ErrorCode::kConfigError, fmt::format("{}: no providers configured", path.string()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cache

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kIoError, "SHA-256 digest failed");
  }
  std::string hex;
  hex.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    hex += fmt::format("{:02x}", digest[i]);
  }
  return hex;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, fmt::format("cannot read '{}'", path.string()));
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorCode::kIoError, fmt::format("cannot write '{}'", tmp.string()));
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::filesystem::path ResponseCache::payload_path(const CacheKey& key) const {
  return root_ / key.provider / key.token / key.kind / (key.range.label() + ".json");
}

std::filesystem::path ResponseCache::sidecar_path(const CacheKey& key) const {
  return root_ / key.provider / key.token / key.kind / (key.range.label() + ".sha256");
}

std::optional<CacheEntry> ResponseCache::get(const CacheKey& key) const {
  const auto payload_file = payload_path(key);
  const auto sidecar_file = sidecar_path(key);
  if (!std::filesystem::exists(payload_file) || !std::filesystem::exists(sidecar_file)) {
    return std::nullopt;
  }
  CacheEntry entry{key, 0, read_file(payload_file), {}};
  std::istringstream sidecar(read_file(sidecar_file));
  sidecar >> entry.checksum >> entry.fetched_at;
  if (entry.checksum != sha256_hex(entry.payload)) {
    throw Error(ErrorCode::kCacheCorrupt, fmt::format("checksum mismatch for '{}'", payload_file.string()));
  }
  return entry;
}

bool ResponseCache::put(const CacheKey& key, std::string_view payload, long long fetched_at) {
  std::lock_guard lock(write_mutex_);
  const auto payload_file = payload_path(key);
  if (std::filesystem::exists(sidecar_path(key))) {
    return false;
  }
  std::filesystem::create_directories(payload_file.parent_path());
  write_file_atomically(payload_file, payload);
  // sidecar last: its presence marks the entry complete
  write_file_atomically(sidecar_path(key), fmt::format("{}\n{}\n", sha256_hex(payload), fetched_at));
  return true;
}

// ---------------------------------------------------------------------------
// Page parsing

namespace {

const json* resolve(const json& root, std::string_view path) {
  const json* node = &root;
  while (!path.empty()) {
    const auto dot = path.find('.');
    const std::string_view part = path.substr(0, dot);
    if (node->is_object()) {
      auto it = node->find(std::string(part));
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
      if (ec != std::errc() || ptr != part.data() + part.size() || idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else {
      return nullptr;
    }
    if (dot == std::string_view::npos) break;
    path.remove_prefix(dot + 1);
  }
  return node;
}

double as_number(const json& node, std::string_view field) {
  if (node.is_number()) return node.get<double>();
  if (node.is_string()) {
    const auto& s = node.get_ref<const std::string&>();
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  throw Error(ErrorCode::kParseError, fmt::format("field '{}' is not numeric", field));
}

Date as_date(const json& node, const std::string& format) {
  if (format == "iso") {
    if (!node.is_string()) throw Error(ErrorCode::kParseError, "date field is not a string");
    return Date::parse(std::string_view(node.get_ref<const std::string&>()).substr(0, 10));
  }
  double raw = as_number(node, "date");
  long long seconds = format == "unix_ms" ? static_cast<long long>(raw / 1000.0) : static_cast<long long>(raw);
  auto days = std::chrono::floor<std::chrono::days>(std::chrono::sys_seconds{std::chrono::seconds{seconds}});
  return Date(days);
}

std::vector<Date> missing_days(const DateRange& range, const std::vector<DailyBar>& bars) {
  std::vector<Date> missing;
  std::size_t i = 0;
  for (Date d = range.first; d <= range.last; d = d.plus_days(1)) {
    while (i < bars.size() && bars[i].date < d) ++i;
    if (i >= bars.size() || bars[i].date != d) missing.push_back(d);
  }
  return missing;
}

std::string describe_gaps(const std::vector<Date>& missing) {
  std::string out;
  for (std::size_t i = 0; i < missing.size();) {
    std::size_t j = i;
    while (j + 1 < missing.size() && days_between(missing[j], missing[j + 1]) == 1) ++j;
    if (!out.empty()) out += ", ";
    out += i == j ? missing[i].iso() : missing[i].iso() + ".." + missing[j].iso();
    i = j + 1;
  }
  return out;
}

std::string substitute(std::string text, std::string_view placeholder, std::string_view value) {
  for (auto pos = text.find(placeholder); pos != std::string::npos; pos = text.find(placeholder, pos + value.size())) {
    text.replace(pos, placeholder.size(), value);
  }
  return text;
}

}  // namespace

PartialRangeError::PartialRangeError(std::vector<Date> missing, TokenSeries partial)
    : Error(ErrorCode::kPartialRange,
            fmt::format("{}: {} day(s) missing: {}", partial.token_id, missing.size(), describe_gaps(missing))),
      missing_(std::move(missing)),
      partial_(std::move(partial)) {}

TokenSeries parse_daily_pages(const ProviderEndpointSpec& spec, const TokenId& token, const DateRange& range,
                              const std::vector<std::string>& pages) {
  const FieldPaths& f = spec.fields;
  std::map<Date, DailyBar> by_date;
  for (std::size_t p = 0; p < pages.size(); ++p) {
    json doc;
    try {
      doc = json::parse(pages[p]);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, fmt::format("{} page {}: {}", spec.name, p + 1, e.what()));
    }
    const json* records = resolve(doc, f.records);
    if (records == nullptr || !records->is_array()) {
      throw Error(ErrorCode::kParseError,
                  fmt::format("{} page {}: no record array at '{}'", spec.name, p + 1, f.records));
    }
    for (const json& rec : *records) {
      auto required = [&](const std::string& path) -> const json& {
        const json* node = resolve(rec, path);
        if (node == nullptr || node->is_null()) {
          throw Error(ErrorCode::kParseError, fmt::format("{} page {}: record lacks '{}'", spec.name, p + 1, path));
        }
        return *node;
      };
      auto optional_number = [&](const std::string& path) {
        if (path.empty()) return 0.0;
        const json* node = resolve(rec, path);
        return node == nullptr || node->is_null() ? 0.0 : as_number(*node, path);
      };
      DailyBar bar;
      bar.date = as_date(required(f.date), f.date_format);
      bar.high = as_number(required(f.high), f.high);
      bar.low = as_number(required(f.low), f.low);
      bar.close = as_number(required(f.close), f.close);
      bar.volume_usd = optional_number(f.volume);
      bar.market_cap_usd = optional_number(f.market_cap);
      if (bar.date < range.first || range.last < bar.date) continue;
      by_date.emplace(bar.date, bar);  // first occurrence wins
    }
  }
  TokenSeries series{token, {}};
  for (auto& [date, bar] : by_date) series.bars.push_back(bar);
  try {
    validate_series(series);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, fmt::format("{}: provider data invalid: {}", spec.name, e.what()));
  }
  return series;
}

// ---------------------------------------------------------------------------
// Client

MarketDataClient::MarketDataClient(ProviderEndpointSpec spec, HttpTransport& transport, Clock& clock,
                                   std::optional<std::filesystem::path> cache_dir)
    : spec_(std::move(spec)), transport_(transport), clock_(clock), limiter_(spec_.rate_limit, clock) {
  spec_.validate();
  if (cache_dir) cache_.emplace(*cache_dir);
}

std::string MarketDataClient::page_url(const TokenId& token, const DateRange& range, std::optional<int> page) const {
  std::string path = spec_.path_template;
  path = substitute(path, "{token}", token);
  path = substitute(path, "{from}", range.first.iso());
  path = substitute(path, "{to}", range.last.iso());
  path = substitute(path, "{from_unix}", std::to_string(range.first.unix_seconds()));
  path = substitute(path, "{to_unix}", std::to_string(range.last.plus_days(1).unix_seconds() - 1));
  std::string url = spec_.base_url + path;
  auto append = [&url](std::string_view name, int value) {
    url += url.find('?') == std::string::npos ? '?' : '&';
    url += fmt::format("{}={}", name, value);
  };
  if (page) {
    append(spec_.pagination.page_param, *page);
    if (!spec_.pagination.page_size_param.empty() && spec_.pagination.page_size > 0) {
      append(spec_.pagination.page_size_param, spec_.pagination.page_size);
    }
  }
  return url;
}

HttpResponse MarketDataClient::request(const std::string& url) {
  HttpHeaders headers{{"Accept", "application/json"}};
  if (spec_.api_key_header) {
    if (const char* key = std::getenv(spec_.api_key_env().c_str()); key != nullptr && *key != '\0') {
      headers[*spec_.api_key_header] = key;
    }
  }
  const auto timeout = Clock::Duration(static_cast<long long>(spec_.timeout_seconds * 1000));

  limiter_.acquire();
  ++network_calls_;
  HttpResponse resp = transport_.get(url, headers, timeout);
  if (resp.status == 429) {
    long long delay_s = 1;
    if (auto it = resp.headers.find("retry-after"); it != resp.headers.end()) {
      long long parsed = 0;
      const auto& v = it->second;
      auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), parsed);
      if (ec == std::errc() && parsed >= 0) delay_s = parsed;
    }
    clock_.sleep_for(std::chrono::seconds(delay_s));
    limiter_.acquire();
    ++network_calls_;
    resp = transport_.get(url, headers, timeout);
    if (resp.status == 429) {
      throw Error(ErrorCode::kRateLimited,
                  fmt::format("{}: still rate limited after waiting {} s for {}", spec_.name, delay_s, url));
    }
  }
  if (resp.status < 200 || resp.status >= 300) {
    throw Error(ErrorCode::kHttpError,
                fmt::format("{}: HTTP {} for {}: {}", spec_.name, resp.status, url, resp.body.substr(0, 200)));
  }
  return resp;
}

TokenSeries MarketDataClient::fetch_daily(const TokenId& token, const DateRange& range) {
  const CacheKey key{spec_.name, token, "daily", range};
  if (cache_) {
    if (auto entry = cache_->get(key)) {
      std::vector<std::string> cached;
      try {
        cached = json::parse(entry->payload).get<std::vector<std::string>>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kCacheCorrupt,
                    fmt::format("{}: unreadable payload: {}", cache_->payload_path(key).string(), e.what()));
      }
      return parse_daily_pages(spec_, token, range, cached);
    }
  }

  std::vector<std::string> pages;
  const Pagination& pg = spec_.pagination;
  if (pg.page_param.empty()) {
    pages.push_back(request(page_url(token, range, std::nullopt)).body);
  } else {
    for (int i = 0; i < pg.max_pages; ++i) {
      std::string body = request(page_url(token, range, pg.first_page + i)).body;
      const auto count = parse_daily_pages(spec_, token, DateRange{Date(std::chrono::sys_days::min()),
                                                                   Date(std::chrono::sys_days::max())},
                                           {body})
                             .bars.size();
      if (count == 0) break;
      pages.push_back(std::move(body));
      if (pg.page_size > 0 && count < static_cast<std::size_t>(pg.page_size)) break;
    }
  }

  TokenSeries series = parse_daily_pages(spec_, token, range, pages);
  auto missing = missing_days(range, series.bars);
  if (!missing.empty()) {
    throw PartialRangeError(std::move(missing), std::move(series));
  }
  if (cache_) {
    const auto fetched_at = std::chrono::duration_cast<std::chrono::seconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count();
    cache_->put(key, json(pages).dump(), fetched_at);
  }
  return series;
}

}  // namespace me2f::ingest
