#include "dris/transport.hpp"

#include <charconv>

namespace dris {

Response respond(const std::function<wire::json()>& fn) {
    try {
        return {200, fn().dump()};
    } catch (const Error& e) {
        return {http_status(e.code()), wire::error_body(e.code(), e.what())};
    } catch (const std::exception& e) {
        return {500, wire::error_body(ErrorCode::internal, e.what())};
    }
}

std::size_t count_param(const Request& request, const std::string& name, std::size_t fallback, std::size_t min,
                        std::size_t max) {
    const auto raw = request.param(name);
    if (!raw || raw->empty()) return fallback;
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
    if (ec != std::errc{} || ptr != raw->data() + raw->size() || value < min || value > max) {
        throw Error(ErrorCode::bad_query, "parameter '" + name + "' must be an integer in [" + std::to_string(min) +
                                              ", " + std::to_string(max) + "]");
    }
    return value;
}

void InProcessTransport::attach(const std::string& endpoint, Service& service) {
    std::lock_guard lock(mutex_);
    services_[endpoint] = &service;
}

void InProcessTransport::detach(const std::string& endpoint) {
    std::lock_guard lock(mutex_);
    services_.erase(endpoint);
}

void InProcessTransport::set_fault(const std::string& endpoint, Fault fault) {
    std::lock_guard lock(mutex_);
    faults_[endpoint] = fault;
}

void InProcessTransport::clear_fault(const std::string& endpoint) {
    std::lock_guard lock(mutex_);
    faults_.erase(endpoint);
}

std::uint64_t InProcessTransport::requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
}

Response InProcessTransport::send(const std::string& endpoint, const Request& request,
                                  std::chrono::milliseconds timeout) {
    Service* service = nullptr;
    {
        std::lock_guard lock(mutex_);
        ++requests_;
        if (auto f = faults_.find(endpoint); f != faults_.end()) {
            Fault& fault = f->second;
            if (fault.down) throw Error(ErrorCode::internal, "connection refused: " + endpoint);
            if (fault.fail_after == 0) throw Error(ErrorCode::internal, "connection reset: " + endpoint);
            if (fault.fail_after > 0) --fault.fail_after;
            if (fault.latency > timeout) throw Error(ErrorCode::timeout, "timed out: " + endpoint);
        }
        const auto it = services_.find(endpoint);
        if (it == services_.end()) throw Error(ErrorCode::internal, "no route to " + endpoint);
        service = it->second;
    }
    return service->handle(request);
}

}  // namespace dris
