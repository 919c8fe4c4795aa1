#pragma once

#include "dris/datestamp.hpp"
#include "dris/naming.hpp"
#include "dris/records.hpp"
#include "dris/transport.hpp"

#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace dris {

/// The children a non-leaf node knows about. Only strict one-level children of
/// the owner may register; re-registration replaces endpoint and description.
class NodeRegistry {
public:
    struct Entry {
        std::string endpoint;
        CollectionDescription collection;
        Datestamp registered_at;

        friend bool operator==(const Entry&, const Entry&) = default;
    };

    NodeRegistry(DomainName owner, const Clock& clock) : owner_(std::move(owner)), clock_(&clock) {}

    const DomainName& owner() const noexcept { return owner_; }

    /// Throws NOT_CHILD, or BAD_DOMAIN when cd.domain differs from `child`.
    void register_child(const DomainName& child, std::string endpoint, CollectionDescription cd);

    /// Registered endpoint, else the conventional service URL.
    std::string resolve(const DomainName& d) const;

    std::optional<Entry> find(const DomainName& d) const;
    std::size_t size() const;

    /// Sorted by domain.
    std::vector<std::pair<DomainName, Entry>> entries() const;
    std::vector<ChildInfo> children() const;

    /// Reinstates an entry loaded from a snapshot, keeping its original timestamp.
    void restore(const DomainName& child, Entry entry);

private:
    void check_child(const DomainName& child) const;

    DomainName owner_;
    const Clock* clock_;
    mutable std::shared_mutex mutex_;
    std::map<DomainName, Entry> entries_;
};

wire::json registry_snapshot(const NodeRegistry& registry);
void restore_registry(NodeRegistry& registry, const wire::json& entries);

/// Serves POST /dris/register and GET /dris/children; nullopt for other routes.
std::optional<Response> handle_registry_routes(NodeRegistry& registry, const Request& request);

}  // namespace dris
