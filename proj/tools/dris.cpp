// dris: run a node, feed it, query it, or simulate a whole three-layer fabric.

#include "dris/broker_node.hpp"
#include "dris/harvest_node.hpp"
#include "dris/http.hpp"
#include "dris/org_node.hpp"
#include "dris/sim.hpp"

#include <CLI11.hpp>

#include <condition_variable>
#include <csignal>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

namespace {

using namespace dris;

constexpr int kExitRuntime = 2;

struct ServeArgs {
    std::string role;
    std::string domain;
    std::string listen;
    std::string parent;
    std::string snapshot;
    std::string advertise;
    std::int64_t period = 0;
    std::int64_t register_interval = 60;
    std::int64_t timeout_ms = 2000;
};

/// Blocks SIGINT/SIGTERM in every thread and reports them on a dedicated one.
class ShutdownSignal {
public:
    ShutdownSignal() {
        sigemptyset(&set_);
        sigaddset(&set_, SIGINT);
        sigaddset(&set_, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set_, nullptr);
    }

    template <class F>
    std::thread watch(F on_signal) {
        return std::thread([this, on_signal] {
            int sig = 0;
            sigwait(&set_, &sig);
            on_signal();
        });
    }

private:
    sigset_t set_;
};

/// Sleeps in small steps so shutdown is prompt. Returns false once stopping.
class Stopper {
public:
    bool wait_for(std::chrono::seconds d) {
        std::unique_lock lock(mutex_);
        return !cv_.wait_for(lock, d, [this] { return stopping_; });
    }
    void stop() {
        {
            std::lock_guard lock(mutex_);
            stopping_ = true;
        }
        cv_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stopping_ = false;
};

int serve(const ServeArgs& args) {
    ShutdownSignal signals;
    SystemClock clock;
    HttpTransport transport;
    const auto domain = parse_domain(args.domain);
    const auto [host, port] = split_listen_address(args.listen);
    const auto timeout = std::chrono::milliseconds(args.timeout_ms);

    std::unique_ptr<OrgNode> org;
    std::unique_ptr<HarvestNode> mid;
    std::unique_ptr<BrokerNode> broker;
    Service* service = nullptr;
    if (args.role == "org") {
        org = std::make_unique<OrgNode>(domain, clock);
        service = org.get();
    } else if (args.role == "mid") {
        HarvestNode::Options o;
        o.timeout = timeout;
        mid = std::make_unique<HarvestNode>(domain, clock, transport, o);
        service = mid.get();
    } else {
        BrokerNode::Options o;
        o.timeout = timeout;
        broker = std::make_unique<BrokerNode>(domain, clock, transport, o);
        service = broker.get();
    }

    auto save = [&] {
        if (args.snapshot.empty()) return;
        if (org) org->save_snapshot(args.snapshot);
        if (mid) mid->save_snapshot(args.snapshot);
        if (broker) broker->save_snapshot(args.snapshot);
    };
    if (!args.snapshot.empty() && std::filesystem::exists(args.snapshot)) {
        if (org) org->load_snapshot(args.snapshot);
        if (mid) mid->load_snapshot(args.snapshot);
        if (broker) broker->load_snapshot(args.snapshot);
        std::cerr << "loaded snapshot " << args.snapshot << '\n';
    }

    HttpServer server(*service);
    const int bound = server.bind(host, port);
    const std::string self_endpoint =
        !args.advertise.empty()
            ? args.advertise
            : "http://" + std::string(host == "0.0.0.0" ? "127.0.0.1" : host) + ":" + std::to_string(bound);

    Stopper stopper;
    auto announce = [&] {
        if (args.parent.empty()) return;
        const auto cd = org ? org->collection_description()
                            : mid ? mid->aggregate_collection() : broker->aggregate_collection();
        try {
            register_with_parent(transport, args.parent, domain, self_endpoint, cd, timeout);
        } catch (const Error& e) {
            std::cerr << "register with " << args.parent << " failed: " << to_string(e.code()) << ' ' << e.what()
                      << '\n';
        }
    };

    std::vector<std::thread> workers;
    workers.emplace_back([&] {
        do {
            announce();
            try {
                save();
            } catch (const Error& e) {
                std::cerr << e.what() << '\n';
            }
        } while (stopper.wait_for(std::chrono::seconds(std::max<std::int64_t>(1, args.register_interval))));
    });
    if (mid && args.period > 0) {
        workers.emplace_back([&] {
            mid->run_schedule(args.period, 0, [&](std::int64_t p) { return stopper.wait_for(std::chrono::seconds(p)); });
        });
    }
    auto watcher = signals.watch([&] {
        stopper.stop();
        server.stop();
    });

    std::cerr << class_name(domain) << " (" << args.role << ") serving on " << self_endpoint << '\n';
    server.run();
    watcher.join();
    for (auto& w : workers) w.join();
    save();
    return 0;
}

Request get(std::string path) {
    return Request{.method = "GET", .path = std::move(path), .params = {}, .body = {}};
}

int print_response(const Response& r) {
    if (!r.ok()) {
        const auto e = wire::error_from_body(r.status, r.body);
        std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitRuntime;
    }
    std::cout << wire::parse_body(r.body).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DRIS hierarchical federated search: serve nodes, ingest, harvest, query, simulate"};
    app.require_subcommand(1);

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "Run a node over HTTP");
    serve_cmd->add_option("--role", serve_args.role, "org | mid | broker")
        ->required()
        ->check(CLI::IsMember({"org", "mid", "broker"}));
    serve_cmd->add_option("--domain", serve_args.domain, "Node domain, e.g. hust.edu.cn")->required();
    serve_cmd->add_option("--listen", serve_args.listen, "host:port")->required();
    serve_cmd->add_option("--parent", serve_args.parent, "Parent endpoint to register with");
    serve_cmd->add_option("--snapshot", serve_args.snapshot, "Snapshot file, loaded at start and saved periodically");
    serve_cmd->add_option("--advertise", serve_args.advertise, "Endpoint announced to the parent");
    serve_cmd->add_option("--period", serve_args.period, "mid: harvest every N seconds (0 = only on request)");
    serve_cmd->add_option("--register-interval", serve_args.register_interval, "Seconds between re-registrations");
    serve_cmd->add_option("--timeout", serve_args.timeout_ms, "Child request timeout in ms")
        ->check(CLI::PositiveNumber);

    std::string endpoint;
    std::string dir;
    std::size_t batch = 100;
    auto* ingest_cmd = app.add_subcommand("ingest", "Load a directory of text files into an org node");
    ingest_cmd->add_option("--endpoint", endpoint)->required();
    ingest_cmd->add_option("--dir", dir)->required()->check(CLI::ExistingDirectory);
    ingest_cmd->add_option("--batch", batch, "Documents per request")->check(CLI::Range(1, 10000));

    bool once = false;
    std::int64_t period = 3600;
    auto* harvest_cmd = app.add_subcommand("harvest", "Trigger harvest passes on a mid node");
    harvest_cmd->add_option("--endpoint", endpoint)->required();
    harvest_cmd->add_flag("--once", once, "One pass, then exit");
    harvest_cmd->add_option("--period", period, "Seconds between passes without --once")->check(CLI::PositiveNumber);

    std::string query;
    std::size_t k = 10;
    std::string kind;
    auto* query_cmd = app.add_subcommand("query", "Search any node");
    query_cmd->add_option("--endpoint", endpoint)->required();
    query_cmd->add_option("--q", query)->required();
    query_cmd->add_option("-k", k)->check(CLI::Range(1, 10000));
    query_cmd->add_option("--kind", kind, "Restrict to one resource kind");

    std::string config_path;
    std::string csv_path;
    std::string log_path;
    auto* sim_cmd = app.add_subcommand("sim", "Compare harvest strategies on a simulated topology");
    sim_cmd->add_option("--config", config_path, "JSON with SimConfig fields")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--csv", csv_path);
    sim_cmd->add_option("--log", log_path, "Event log of the configured strategy's run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const auto timeout = std::chrono::milliseconds(30000);
    HttpTransport transport;
    try {
        if (*serve_cmd) return serve(serve_args);

        if (*ingest_cmd) {
            auto docs = load_directory(dir);
            std::size_t sent = 0;
            for (std::size_t i = 0; i < docs.size(); i += batch) {
                auto body = wire::json::array();
                for (std::size_t j = i; j < std::min(docs.size(), i + batch); ++j) body.push_back(wire::to_json(docs[j]));
                Request r{.method = "POST", .path = "/dris/ingest", .params = {}, .body = {}};
                r.body = wire::json{{"documents", std::move(body)}}.dump();
                const auto resp = transport.send(endpoint, r, timeout);
                if (!resp.ok()) return print_response(resp);
                sent += wire::parse_body(resp.body).at("ingested").get<std::size_t>();
            }
            std::cout << "ingested " << sent << " documents\n";
            return 0;
        }

        if (*harvest_cmd) {
            Request r{.method = "POST", .path = "/dris/harvest", .params = {}, .body = {}};
            while (true) {
                const int rc = print_response(transport.send(endpoint, r, timeout));
                if (once || rc != 0) return rc;
                std::this_thread::sleep_for(std::chrono::seconds(period));
            }
        }

        if (*query_cmd) {
            auto r = get("/dris/search");
            r.params["q"] = query;
            r.params["k"] = std::to_string(k);
            if (!kind.empty()) r.params["kind"] = kind;
            return print_response(transport.send(endpoint, r, timeout));
        }

        if (*sim_cmd) {
            const auto config = sim::load_config(config_path);
            sim::compare_strategies(config, std::cout,
                                    csv_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(csv_path));
            if (!log_path.empty()) {
                std::ofstream log(log_path, std::ios::binary | std::ios::trunc);
                sim::run_sim(config, &log);
            }
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << to_string(e.code()) << ": " << e.what() << '\n';
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 1;
}
