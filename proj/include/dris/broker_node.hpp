#pragma once

#include "dris/datestamp.hpp"
#include "dris/records.hpp"
#include "dris/registry.hpp"
#include "dris/transport.hpp"
#include "dris/wire.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace dris {

/// What one child contributed to a fanned-out query.
struct ChildOutcome {
    DomainName domain;
    std::optional<ResultList> result;  // set on success
    std::optional<ErrorCode> error;    // set on failure
    std::string message;

    bool ok() const noexcept { return result.has_value(); }
};

struct MergedHit {
    DomainName source;
    std::string id;
    std::string title;
    ResourceKind kind = ResourceKind::webpage;
    double raw_score = 0.0;
    double normalized_score = 0.0;

    friend bool operator==(const MergedHit&, const MergedHit&) = default;
};

struct MergedResult {
    std::string query;
    std::size_t k = 10;
    bool partial = false;
    std::vector<MergedHit> hits;  // (normalized desc, source asc, id asc), unique (source, id)

    struct ChildSummary {
        std::optional<std::size_t> hits;
        std::optional<ErrorCode> error;

        friend bool operator==(const ChildSummary&, const ChildSummary&) = default;
    };
    std::map<DomainName, ChildSummary> per_child;

    friend bool operator==(const MergedResult&, const MergedResult&) = default;
};

/// Search response shape, plus "raw_score" per hit and "per_child". "score" is the normalized score.
wire::json to_json(const MergedResult& result);

/// Min-max normalizes each child's list to [0, 1] (constant lists map to 1),
/// dedupes (source, id) keeping the best normalized score, sorts globally and keeps k.
MergedResult merge(std::string query, const std::vector<ChildOutcome>& outcomes, std::size_t k);

/// Top-layer node: keeps only child collection descriptions and answers
/// queries by selecting children, fanning out, and merging.
class BrokerNode final : public Service {
public:
    struct Options {
        std::chrono::milliseconds timeout{2000};
        std::size_t max_collections = 10;
        /// Concurrent child requests per query; 1 runs them in order on the calling thread.
        std::size_t parallelism = 16;
    };

    BrokerNode(DomainName domain, const Clock& clock, Transport& transport)
        : BrokerNode(std::move(domain), clock, transport, Options{}) {}
    BrokerNode(DomainName domain, const Clock& clock, Transport& transport, Options options);

    const DomainName& domain() const noexcept { return domain_; }
    NodeRegistry& registry() noexcept { return registry_; }
    const NodeRegistry& registry() const noexcept { return registry_; }
    const Options& options() const noexcept { return options_; }

    /// Children ranked by sum over distinct query terms of ln(1 + df); zero-score
    /// children dropped, unless all score zero, in which case every child is returned.
    std::vector<DomainName> select_collections(std::string_view query, std::size_t max_n) const;

    /// Queries `children` concurrently; each failure is captured in its outcome.
    std::vector<ChildOutcome> fan_out(std::string_view query, const std::vector<DomainName>& children, std::size_t k,
                                      std::chrono::milliseconds timeout);

    MergedResult broker_search(std::string_view query, std::size_t k);
    MergedResult broker_search(std::string_view query, std::size_t k, std::size_t max_n);

    /// Same union rule as the harvest layer, over the registered descriptions.
    CollectionDescription aggregate_collection() const;

    /// Outcome of the child's most recent fan-out; nullopt before the first.
    std::optional<bool> healthy(const DomainName& child) const;

    wire::json snapshot() const;
    void restore(const wire::json& snapshot);
    void save_snapshot(const std::filesystem::path& path) const;
    void load_snapshot(const std::filesystem::path& path);

    Response handle(const Request& request) override;

private:
    ChildOutcome query_child(const DomainName& child, std::string_view query, std::size_t k,
                             std::chrono::milliseconds timeout);

    DomainName domain_;
    const Clock* clock_;
    Transport* transport_;
    Options options_;
    NodeRegistry registry_;

    mutable std::mutex health_mutex_;
    std::map<DomainName, bool> health_;
};

}  // namespace dris
