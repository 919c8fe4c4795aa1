#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dris {

enum class ErrorCode {
    bad_query,
    bad_domain,
    bad_datestamp,
    bad_token,
    not_child,
    not_found,
    timeout,
    internal,
};

/// Wire spelling, e.g. "BAD_QUERY".
std::string_view to_string(ErrorCode code);
ErrorCode error_code_from_string(std::string_view text);

/// HTTP status used when an error of this code crosses the wire.
int http_status(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace dris
