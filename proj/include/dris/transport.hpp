#pragma once

#include "dris/error.hpp"
#include "dris/wire.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace dris {

struct Request {
    std::string method = "GET";
    std::string path;
    std::map<std::string, std::string> params;
    std::string body;

    std::optional<std::string_view> param(const std::string& name) const {
        const auto it = params.find(name);
        if (it == params.end()) return std::nullopt;
        return std::string_view(it->second);
    }
};

struct Response {
    int status = 200;
    std::string body;

    bool ok() const noexcept { return status >= 200 && status < 300; }
};

/// A node's request handler. Errors are reported in the response, never thrown.
class Service {
public:
    virtual ~Service() = default;
    virtual Response handle(const Request& request) = 0;
};

/// Runs `fn` and converts Error / other exceptions into the wire error shape.
Response respond(const std::function<wire::json()>& fn);

/// Parses an optional positive integer query parameter. Throws BAD_QUERY.
std::size_t count_param(const Request& request, const std::string& name, std::size_t fallback, std::size_t min,
                        std::size_t max);

/// Moves requests between nodes. Transport failures throw Error(TIMEOUT) or
/// Error(INTERNAL); error responses from the peer come back as a Response.
class Transport {
public:
    virtual ~Transport() = default;
    virtual Response send(const std::string& endpoint, const Request& request, std::chrono::milliseconds timeout) = 0;
};

/// Sends and decodes a 2xx body as T; non-2xx throws the peer's error.
/// `bytes`, when given, accumulates the response body size.
template <class T>
T call(Transport& transport, const std::string& endpoint, const Request& request, std::chrono::milliseconds timeout,
       std::uint64_t* bytes = nullptr) {
    const Response response = transport.send(endpoint, request, timeout);
    if (bytes) *bytes += response.body.size();
    if (!response.ok()) throw wire::error_from_body(response.status, response.body);
    return wire::decode<T>(response.body);
}

/// Direct handler dispatch by endpoint string. Bodies still go through the wire
/// encoding, so byte counts match what HTTP would carry. Faults are injected per
/// endpoint; simulated latency is compared with the timeout and never slept.
class InProcessTransport final : public Transport {
public:
    struct Fault {
        bool down = false;
        std::chrono::milliseconds latency{0};
        /// Requests still allowed through before the endpoint starts failing; negative = unlimited.
        std::int64_t fail_after = -1;
    };

    void attach(const std::string& endpoint, Service& service);
    void detach(const std::string& endpoint);
    void set_fault(const std::string& endpoint, Fault fault);
    void clear_fault(const std::string& endpoint);

    Response send(const std::string& endpoint, const Request& request, std::chrono::milliseconds timeout) override;

    std::uint64_t requests() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, Service*> services_;
    std::map<std::string, Fault> faults_;
    std::uint64_t requests_ = 0;
};

}  // namespace dris
