#include "dris/broker_node.hpp"

#include "dris/harvest_node.hpp"
#include "dris/org_node.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>

namespace dris {

wire::json to_json(const MergedResult& result) {
    auto hits = wire::json::array();
    for (const auto& h : result.hits) {
        hits.push_back({{"source", h.source.str()},
                        {"id", h.id},
                        {"title", h.title},
                        {"kind", to_string(h.kind)},
                        {"score", h.normalized_score},
                        {"raw_score", h.raw_score}});
    }
    auto per_child = wire::json::object();
    for (const auto& [domain, summary] : result.per_child) {
        if (summary.error) {
            per_child[domain.str()] = {{"error", to_string(*summary.error)}};
        } else {
            per_child[domain.str()] = {{"hits", summary.hits.value_or(0)}};
        }
    }
    return {{"query", result.query},
            {"k", result.k},
            {"partial", result.partial},
            {"hits", std::move(hits)},
            {"per_child", std::move(per_child)}};
}

MergedResult merge(std::string query, const std::vector<ChildOutcome>& outcomes, std::size_t k) {
    MergedResult out{.query = std::move(query), .k = k, .partial = false, .hits = {}, .per_child = {}};
    std::map<std::pair<DomainName, std::string>, MergedHit> best;

    for (const auto& outcome : outcomes) {
        if (!outcome.ok()) {
            out.partial = true;
            out.per_child[outcome.domain] = {std::nullopt, outcome.error.value_or(ErrorCode::internal)};
            continue;
        }
        const auto& hits = outcome.result->hits;
        out.per_child[outcome.domain] = {hits.size(), std::nullopt};
        if (hits.empty()) continue;
        const auto [lo, hi] = std::minmax_element(hits.begin(), hits.end(),
                                                  [](const Hit& a, const Hit& b) { return a.score < b.score; });
        const double min = lo->score;
        const double span = hi->score - min;
        for (const auto& h : hits) {
            const double norm = span > 0.0 ? (h.score - min) / span : 1.0;
            MergedHit m{h.source, h.id, h.title, h.kind, h.score, norm};
            auto [it, inserted] = best.try_emplace({h.source, h.id}, m);
            if (!inserted && norm > it->second.normalized_score) it->second = std::move(m);
        }
    }

    out.hits.reserve(best.size());
    for (auto& [key, hit] : best) out.hits.push_back(std::move(hit));
    std::sort(out.hits.begin(), out.hits.end(), [](const MergedHit& a, const MergedHit& b) {
        if (a.normalized_score != b.normalized_score) return a.normalized_score > b.normalized_score;
        if (a.source != b.source) return a.source < b.source;
        return a.id < b.id;
    });
    if (out.hits.size() > k) out.hits.erase(out.hits.begin() + static_cast<std::ptrdiff_t>(k), out.hits.end());
    return out;
}

BrokerNode::BrokerNode(DomainName domain, const Clock& clock, Transport& transport, Options options)
    : domain_(std::move(domain)),
      clock_(&clock),
      transport_(&transport),
      options_(options),
      registry_(domain_, clock) {
    if (options_.timeout.count() < 1) throw Error(ErrorCode::bad_query, "timeout must be at least 1 ms");
}

std::vector<DomainName> BrokerNode::select_collections(std::string_view query, std::size_t max_n) const {
    if (max_n == 0) throw Error(ErrorCode::bad_query, "max_n must be at least 1");
    const auto tokens = query_tokens(query);
    const std::set<std::string> terms(tokens.begin(), tokens.end());

    struct Scored {
        DomainName domain;
        double score;
    };
    std::vector<Scored> scored;
    std::vector<DomainName> all;
    for (const auto& [domain, entry] : registry_.entries()) {
        double score = 0.0;
        for (const auto& t : terms) {
            const auto it = entry.collection.terms.find(t);
            const double df = it == entry.collection.terms.end() ? 0.0 : static_cast<double>(it->second);
            score += std::log(1.0 + df);
        }
        all.push_back(domain);
        if (score > 0.0) scored.push_back({domain, score});
    }
    if (scored.empty()) return all;

    std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
        return a.score != b.score ? a.score > b.score : a.domain < b.domain;
    });
    std::vector<DomainName> out;
    for (std::size_t i = 0; i < scored.size() && i < max_n; ++i) out.push_back(scored[i].domain);
    return out;
}

ChildOutcome BrokerNode::query_child(const DomainName& child, std::string_view query, std::size_t k,
                                     std::chrono::milliseconds timeout) {
    ChildOutcome outcome{.domain = child, .result = std::nullopt, .error = std::nullopt, .message = {}};
    Request request{.method = "GET", .path = "/dris/search", .params = {}, .body = {}};
    request.params["q"] = std::string(query);
    request.params["k"] = std::to_string(k);
    try {
        outcome.result = call<ResultList>(*transport_, registry_.resolve(child), request, timeout);
    } catch (const Error& e) {
        outcome.error = e.code();
        outcome.message = e.what();
    } catch (const std::exception& e) {
        outcome.error = ErrorCode::internal;
        outcome.message = e.what();
    }
    return outcome;
}

std::vector<ChildOutcome> BrokerNode::fan_out(std::string_view query, const std::vector<DomainName>& children,
                                              std::size_t k, std::chrono::milliseconds timeout) {
    if (timeout.count() < 1) throw Error(ErrorCode::bad_query, "timeout must be at least 1 ms");
    std::vector<std::optional<ChildOutcome>> slots(children.size());

    const std::size_t workers = std::min(options_.parallelism, children.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < children.size(); ++i) slots[i] = query_child(children[i], query, k, timeout);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < children.size(); i = next++) {
                    slots[i] = query_child(children[i], query, k, timeout);
                }
            });
        }
    }

    std::vector<ChildOutcome> out;
    out.reserve(children.size());
    {
        std::lock_guard lock(health_mutex_);
        for (auto& s : slots) {
            health_[s->domain] = s->ok();
            out.push_back(std::move(*s));
        }
    }
    return out;
}

MergedResult BrokerNode::broker_search(std::string_view query, std::size_t k) {
    return broker_search(query, k, options_.max_collections);
}

MergedResult BrokerNode::broker_search(std::string_view query, std::size_t k, std::size_t max_n) {
    if (k == 0) throw Error(ErrorCode::bad_query, "k must be at least 1");
    const auto selected = select_collections(query, max_n);
    return merge(std::string(query), fan_out(query, selected, k, options_.timeout), k);
}

CollectionDescription BrokerNode::aggregate_collection() const {
    std::vector<CollectionDescription> parts;
    for (const auto& [domain, entry] : registry_.entries()) parts.push_back(entry.collection);
    return merge_descriptions(domain_, parts, clock_->now());
}

std::optional<bool> BrokerNode::healthy(const DomainName& child) const {
    std::lock_guard lock(health_mutex_);
    const auto it = health_.find(child);
    if (it == health_.end()) return std::nullopt;
    return it->second;
}

wire::json BrokerNode::snapshot() const {
    return {{"role", "broker"}, {"domain", domain_.str()}, {"registry", registry_snapshot(registry_)}};
}

void BrokerNode::restore(const wire::json& snapshot) {
    try {
        if (parse_domain(snapshot.at("domain").get<std::string>()) != domain_) {
            throw Error(ErrorCode::bad_domain, "snapshot belongs to another node");
        }
        restore_registry(registry_, snapshot.at("registry"));
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::internal, std::string("corrupt snapshot: ") + e.what());
    }
}

void BrokerNode::save_snapshot(const std::filesystem::path& path) const {
    wire::write_json_file(path, snapshot());
}

void BrokerNode::load_snapshot(const std::filesystem::path& path) {
    restore(wire::read_json_file(path));
}

Response BrokerNode::handle(const Request& request) {
    if (auto r = handle_registry_routes(registry_, request)) return *r;
    return respond([&]() -> wire::json {
        if (request.path == "/dris/search") {
            const auto q = request.param("q");
            if (!q) throw Error(ErrorCode::bad_query, "missing parameter 'q'");
            const auto k = count_param(request, "k", 10, 1, 10000);
            const auto n = count_param(request, "n", options_.max_collections, 1, 10000);
            return to_json(broker_search(*q, k, n));
        }
        if (request.path == "/dris/collection") return wire::to_json(aggregate_collection());
        throw Error(ErrorCode::not_found, "no route " + request.method + " " + request.path);
    });
}

}  // namespace dris
