#include "dris/registry.hpp"

#include "dris/error.hpp"

#include <mutex>

namespace dris {

void NodeRegistry::check_child(const DomainName& child) const {
    if (!owner_.is_parent_of(child)) {
        throw Error(ErrorCode::not_child, "'" + child.str() + "' is not a direct child of '" + owner_.str() + "'");
    }
}

void NodeRegistry::register_child(const DomainName& child, std::string endpoint, CollectionDescription cd) {
    check_child(child);
    if (cd.domain != child) {
        throw Error(ErrorCode::bad_domain,
                    "collection describes '" + cd.domain.str() + "', registering '" + child.str() + "'");
    }
    Entry entry{std::move(endpoint), std::move(cd), clock_->now()};
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(child, std::move(entry));
}

void NodeRegistry::restore(const DomainName& child, Entry entry) {
    check_child(child);
    std::unique_lock lock(mutex_);
    entries_.insert_or_assign(child, std::move(entry));
}

std::string NodeRegistry::resolve(const DomainName& d) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(d);
    if (it != entries_.end() && !it->second.endpoint.empty()) return it->second.endpoint;
    return service_url(d);
}

std::optional<NodeRegistry::Entry> NodeRegistry::find(const DomainName& d) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(d);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::size_t NodeRegistry::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::vector<std::pair<DomainName, NodeRegistry::Entry>> NodeRegistry::entries() const {
    std::shared_lock lock(mutex_);
    return {entries_.begin(), entries_.end()};
}

std::vector<ChildInfo> NodeRegistry::children() const {
    std::shared_lock lock(mutex_);
    std::vector<ChildInfo> out;
    out.reserve(entries_.size());
    for (const auto& [domain, entry] : entries_) out.push_back({domain, entry.endpoint, entry.registered_at});
    return out;
}


wire::json registry_snapshot(const NodeRegistry& registry) {
    auto out = wire::json::array();
    for (const auto& [domain, entry] : registry.entries()) {
        out.push_back({{"domain", domain.str()},
                       {"endpoint", entry.endpoint},
                       {"registered_at", format_datestamp(entry.registered_at)},
                       {"collection", wire::to_json(entry.collection)}});
    }
    return out;
}

void restore_registry(NodeRegistry& registry, const wire::json& entries) {
    for (const auto& e : entries) {
        registry.restore(parse_domain(e.at("domain").get<std::string>()),
                         {e.at("endpoint").get<std::string>(),
                          wire::from_json<CollectionDescription>(e.at("collection")),
                          parse_datestamp(e.at("registered_at").get<std::string>())});
    }
}

std::optional<Response> handle_registry_routes(NodeRegistry& registry, const Request& request) {
    if (request.path == "/dris/register") {
        if (request.method != "POST") return respond([]() -> wire::json {
            throw Error(ErrorCode::not_found, "/dris/register expects POST");
        });
        return respond([&] {
            auto req = wire::decode<RegisterRequest>(request.body);
            registry.register_child(req.domain, std::move(req.endpoint), std::move(req.collection));
            return wire::json{{"ok", true}};
        });
    }
    if (request.path == "/dris/children") {
        return respond([&] {
            auto children = wire::json::array();
            for (const auto& c : registry.children()) children.push_back(wire::to_json(c));
            return wire::json{{"children", std::move(children)}};
        });
    }
    return std::nullopt;
}

}  // namespace dris
