#include "http_client.hpp"

#include <httplib.h>

#include "qscope/error.hpp"

namespace qscope::detail {

namespace {

struct ParsedEndpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing '/'
};

ParsedEndpoint parse_endpoint(std::string_view endpoint) {
  auto scheme = endpoint.find("://");
  if (scheme == std::string_view::npos) {
    throw InvalidArgument("endpoint must start with http:// : " + std::string(endpoint));
  }
  auto path = endpoint.find('/', scheme + 3);
  ParsedEndpoint out;
  out.origin = std::string(endpoint.substr(0, path));
  if (path != std::string_view::npos) out.prefix = std::string(endpoint.substr(path));
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

std::string post_json(std::string_view endpoint, std::string_view route, const std::string& body,
                      double timeout_seconds) {
  auto ep = parse_endpoint(endpoint);
  httplib::Client client(ep.origin);
  auto secs = static_cast<time_t>(timeout_seconds);
  auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  std::string target = ep.prefix + std::string(route);
  auto res = client.Post(target, body, "application/json");
  if (!res) {
    throw BackendUnavailable("POST " + std::string(endpoint) + std::string(route) +
                             " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendError("POST " + std::string(endpoint) + std::string(route) + " returned HTTP " +
                       std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  return res->body;
}

}  // namespace qscope::detail
