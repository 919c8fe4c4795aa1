#include "dris/error.hpp"

#include <array>
#include <utility>

namespace dris {

namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 8> kNames{{
    {ErrorCode::bad_query, "BAD_QUERY"},
    {ErrorCode::bad_domain, "BAD_DOMAIN"},
    {ErrorCode::bad_datestamp, "BAD_DATESTAMP"},
    {ErrorCode::bad_token, "BAD_TOKEN"},
    {ErrorCode::not_child, "NOT_CHILD"},
    {ErrorCode::not_found, "NOT_FOUND"},
    {ErrorCode::timeout, "TIMEOUT"},
    {ErrorCode::internal, "INTERNAL"},
}};

}  // namespace

std::string_view to_string(ErrorCode code) {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "INTERNAL";
}

ErrorCode error_code_from_string(std::string_view text) {
    for (const auto& [c, name] : kNames) {
        if (name == text) return c;
    }
    return ErrorCode::internal;
}

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::bad_query:
        case ErrorCode::bad_domain:
        case ErrorCode::bad_datestamp:
        case ErrorCode::bad_token:
            return 400;
        case ErrorCode::not_child:
            return 409;
        case ErrorCode::not_found:
            return 404;
        case ErrorCode::timeout:
            return 504;
        case ErrorCode::internal:
            break;
    }
    return 500;
}

}  // namespace dris
