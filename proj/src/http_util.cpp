#include "http_util.hpp"

#include "topiclabel/error.hpp"

namespace topiclabel::detail {

SplitUrl split_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::InvalidConfig, "URL without scheme: '" + std::string(url) + "'");
  }
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string_view::npos) {
    out.origin = std::string(url);
  } else {
    out.origin = std::string(url.substr(0, path_start));
    out.path = std::string(url.substr(path_start));
  }
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

std::unique_ptr<httplib::Client> make_client(const std::string& origin, int timeout_ms) {
  auto client = std::make_unique<httplib::Client>(origin);
  if (!client->is_valid()) throw Error(ErrorCode::InvalidConfig, "invalid URL origin '" + origin + "'");
  auto sec = timeout_ms / 1000;
  auto usec = (timeout_ms % 1000) * 1000;
  client->set_connection_timeout(sec, usec);
  client->set_read_timeout(sec, usec);
  client->set_write_timeout(sec, usec);
  client->set_follow_location(true);
  return client;
}

}  // namespace topiclabel::detail
