#include "dris/http.hpp"

#include <httplib.h>

namespace dris {

namespace {

std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    std::string base = endpoint;
    if (base.find("://") == std::string::npos) base = "http://" + base;
    std::string prefix;
    const auto slash = base.find('/', base.find("://") + 3);
    if (slash != std::string::npos) {
        prefix = base.substr(slash);
        base.resize(slash);
        while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    }
    return {base, prefix};
}

}  // namespace

Response HttpTransport::send(const std::string& endpoint, const Request& request, std::chrono::milliseconds timeout) {
    const auto [base, prefix] = split_endpoint(endpoint);
    httplib::Client client(base);
    if (!client.is_valid()) throw Error(ErrorCode::internal, "invalid endpoint " + endpoint);

    const auto secs = static_cast<time_t>(timeout.count() / 1000);
    const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Params params(request.params.begin(), request.params.end());
    const std::string path = prefix + request.path;
    const auto started = std::chrono::steady_clock::now();
    httplib::Result result = request.method == "POST"
                                 ? client.Post(path + (params.empty() ? "" : "?" + httplib::detail::params_to_query_str(params)),
                                               request.body, "application/json")
                                 : client.Get(path, params, httplib::Headers{});
    if (!result) {
        const auto elapsed = std::chrono::steady_clock::now() - started;
        const auto err = result.error();
        if (err == httplib::Error::ConnectionTimeout || elapsed >= timeout) {
            throw Error(ErrorCode::timeout, "timed out after " + std::to_string(timeout.count()) + " ms: " + endpoint);
        }
        throw Error(ErrorCode::internal, "transport failure (" + httplib::to_string(err) + "): " + endpoint);
    }
    return {result->status, result->body};
}

HttpServer::HttpServer(Service& service) : server_(std::make_unique<httplib::Server>()) {
    auto handler = [&service](const httplib::Request& req, httplib::Response& res) {
        Request r{.method = req.method, .path = req.path, .params = {}, .body = req.body};
        for (const auto& [name, value] : req.params) r.params.emplace(name, value);
        const Response out = service.handle(r);
        res.status = out.status;
        res.set_content(out.body, "application/json");
    };
    server_->Get(R"(/dris/.*)", handler);
    server_->Post(R"(/dris/.*)", handler);
    server_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        res.set_content(wire::error_body(ErrorCode::not_found, "no route " + req.method + " " + req.path),
                        "application/json");
    });
}

HttpServer::~HttpServer() {
    stop();
}

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error(ErrorCode::internal, "cannot bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port)) {
        throw Error(ErrorCode::internal, "cannot bind " + host + ":" + std::to_string(port));
    }
    return port;
}

void HttpServer::run() {
    server_->listen_after_bind();
}

void HttpServer::start() {
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
}

void HttpServer::stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
}

std::pair<std::string, int> split_listen_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon + 1 == address.size()) {
        throw Error(ErrorCode::bad_query, "listen address must be host:port, got '" + address + "'");
    }
    const std::string host = colon == 0 ? "0.0.0.0" : address.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(address.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error(ErrorCode::bad_query, "bad port in '" + address + "'");
    }
    if (port < 0 || port > 65535) throw Error(ErrorCode::bad_query, "bad port in '" + address + "'");
    return {host, port};
}

}  // namespace dris
