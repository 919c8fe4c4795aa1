#pragma once

#include "dris/transport.hpp"

#include <memory>
#include <string>
#include <thread>

namespace httplib {
class Server;
}

namespace dris {

/// Transport over HTTP/1.1. The timeout bounds connect, each read and each write.
class HttpTransport final : public Transport {
public:
    Response send(const std::string& endpoint, const Request& request, std::chrono::milliseconds timeout) override;
};

/// Exposes a Service on /dris/* over HTTP.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds host:port; port 0 picks a free port. Returns the bound port. Throws Error(INTERNAL).
    int bind(const std::string& host, int port);

    /// Serves on the calling thread until stop().
    void run();
    /// Serves on a background thread.
    void start();
    void stop();

private:
    std::unique_ptr<httplib::Server> server_;
    std::thread thread_;
};

/// Splits "host:port" (port required).
std::pair<std::string, int> split_listen_address(const std::string& address);

}  // namespace dris
