#pragma once

#include "dris/datestamp.hpp"
#include "dris/inverted_index.hpp"
#include "dris/records.hpp"
#include "dris/registry.hpp"
#include "dris/transport.hpp"
#include "dris/version_log.hpp"
#include "dris/wire.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace dris {

struct HarvestReport {
    DomainName child;
    bool ok = true;
    std::uint64_t new_records = 0;
    std::uint64_t updated = 0;
    std::uint64_t bytes = 0;  // response payload bytes, including failed pages
    std::uint64_t pages = 0;
    std::uint64_t restarts = 0;  // passes restarted after BAD_TOKEN
    std::optional<ErrorCode> error;
    std::string message;
};

wire::json to_json(const HarvestReport& report);

/// Second-layer node: pulls metadata from registered children into a union
/// index and answers union search over it. Holds metadata only, never bodies.
class HarvestNode final : public Service {
public:
    /// What the node asks children for. `document` pulls full bodies and reduces
    /// them to metadata locally; only the transfer size differs.
    enum class Payload { metadata, document };

    struct Options {
        std::chrono::milliseconds timeout{5000};
        std::size_t batch = wire::default_batch;
        Payload payload = Payload::metadata;
        std::int64_t token_ttl_seconds = 3600;
    };

    HarvestNode(DomainName domain, const Clock& clock, Transport& transport)
        : HarvestNode(std::move(domain), clock, transport, Options{}) {}
    HarvestNode(DomainName domain, const Clock& clock, Transport& transport, Options options);

    const DomainName& domain() const noexcept { return domain_; }
    NodeRegistry& registry() noexcept { return registry_; }
    const NodeRegistry& registry() const noexcept { return registry_; }

    /// One incremental pass over `child` from its cursor up to the node clock.
    /// Transport and protocol failures are reported, not thrown; the cursor then
    /// stays where it was. Throws NOT_FOUND if `child` is not registered.
    HarvestReport harvest_once(const DomainName& child);

    /// harvest_once over every registered child, in domain order.
    std::vector<HarvestReport> harvest_all();

    /// Each tick: `wait(period)` then harvest_all(). Runs `ticks` ticks, or until
    /// `wait` returns false when ticks == 0.
    std::vector<HarvestReport> run_schedule(std::int64_t period_seconds, std::size_t ticks,
                                            const std::function<bool(std::int64_t)>& wait);

    /// BM25 over title + description of the union records.
    ResultList union_search(std::string_view query, std::size_t k,
                            std::optional<ResourceKind> kind = std::nullopt) const;

    CollectionDescription aggregate_collection() const;

    /// Union records as a child would serve them: datestamps are the harvested ones.
    HarvestBatch list_records(Datestamp from, Datestamp until, std::optional<std::string_view> token,
                              std::size_t batch = wire::default_batch) const;

    std::optional<Datestamp> cursor(const DomainName& child) const;
    std::size_t record_count() const;
    std::optional<MetadataRecord> record(const DomainName& source, const std::string& identifier) const;
    /// Sorted by (source, identifier).
    std::vector<MetadataRecord> records() const;
    std::size_t df(std::string_view term) const;

    /// Records and cursors, canonical text; equal text means equal union state.
    std::string union_state() const;

    wire::json snapshot() const;
    void restore(const wire::json& snapshot);
    void save_snapshot(const std::filesystem::path& path) const;
    void load_snapshot(const std::filesystem::path& path);

    Response handle(const Request& request) override;

private:
    struct Applied {
        std::uint64_t inserted = 0;
        std::uint64_t updated = 0;
    };

    Applied apply(std::vector<MetadataRecord> records, const DomainName& child, std::optional<Datestamp> final_until);
    std::mutex& child_mutex(const DomainName& child);

    DomainName domain_;
    const Clock* clock_;
    Transport* transport_;
    Options options_;
    wire::TokenCodec tokens_;
    NodeRegistry registry_;

    std::mutex child_mutexes_guard_;
    std::map<DomainName, std::unique_ptr<std::mutex>> child_mutexes_;

    mutable std::shared_mutex mutex_;
    VersionLog<MetadataRecord> union_;
    InvertedIndex index_;
    std::map<DomainName, Datestamp> cursors_;
    std::uint64_t applied_since_prune_ = 0;
    std::uint64_t generation_ = 0;
};

/// Sends POST /dris/register to `parent_endpoint` on behalf of `self`.
void register_with_parent(Transport& transport, const std::string& parent_endpoint, const DomainName& self,
                          const std::string& self_endpoint, const CollectionDescription& collection,
                          std::chrono::milliseconds timeout);

/// Union of child descriptions: counts and dfs summed, terms cut to the top
/// max_terms by (df desc, term asc).
CollectionDescription merge_descriptions(const DomainName& domain, const std::vector<CollectionDescription>& parts,
                                         Datestamp generated_at);

}  // namespace dris
