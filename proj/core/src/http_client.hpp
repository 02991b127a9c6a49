#pragma once

#include <string>
#include <string_view>

namespace qscope::detail {

/// POSTs a JSON body to `endpoint` + `route` and returns the 200 response
/// body. Transport failures throw BackendUnavailable, other statuses
/// BackendError. `endpoint` is `http://host[:port][/prefix]`.
std::string post_json(std::string_view endpoint, std::string_view route, const std::string& body,
                      double timeout_seconds);

}  // namespace qscope::detail
