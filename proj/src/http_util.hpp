#pragma once

#include <memory>
#include <string>
#include <string_view>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace topiclabel::detail {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // no trailing slash; may be empty
};

SplitUrl split_url(std::string_view url);

std::unique_ptr<httplib::Client> make_client(const std::string& origin, int timeout_ms);

}  // namespace topiclabel::detail
