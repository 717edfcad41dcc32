#include "httplib.h"

#include <algorithm>
#include <cctype>

#include <fmt/format.h>

#include "me2f/ingest/remote.hpp"

namespace me2f::ingest {

HttpResponse HttplibTransport::get(const std::string& url, const HttpHeaders& headers, Clock::Duration timeout) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kHttpError, fmt::format("not an absolute URL: {}", url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = url.substr(0, path_start);
  const std::string target = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_follow_location(true);

  httplib::Headers request_headers(headers.begin(), headers.end());
  auto result = client.Get(target, request_headers);
  if (!result) {
    throw Error(ErrorCode::kHttpError, fmt::format("GET {} failed: {}", url, httplib::to_string(result.error())));
  }

  HttpResponse resp;
  resp.status = result->status;
  resp.body = result->body;
  for (const auto& [name, value] : result->headers) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    resp.headers.emplace(std::move(lower), value);
  }
  return resp;
}

}  // namespace me2f::ingest
