#include "dris/harvest_node.hpp"

#include "dris/org_node.hpp"
#include "dris/paging.hpp"
#include "dris/text.hpp"

#include <algorithm>

namespace dris {

namespace {

std::string union_key(const DomainName& source, const std::string& identifier) {
    return source.str() + '\x1f' + identifier;
}

std::string union_sort_key(const MetadataRecord& rec) {
    return rec.identifier + '\x1f' + rec.source.str();
}

std::vector<std::string> record_tokens(const MetadataRecord& rec) {
    return tokenize(rec.title + " " + rec.description);
}

}  // namespace

wire::json to_json(const HarvestReport& report) {
    wire::json j{{"child", report.child.str()},   {"ok", report.ok},       {"new", report.new_records},
                 {"updated", report.updated},     {"bytes", report.bytes}, {"pages", report.pages},
                 {"restarts", report.restarts}};
    if (report.error) j["error"] = {{"code", to_string(*report.error)}, {"message", report.message}};
    return j;
}

HarvestNode::HarvestNode(DomainName domain, const Clock& clock, Transport& transport, Options options)
    : domain_(std::move(domain)),
      clock_(&clock),
      transport_(&transport),
      options_(options),
      tokens_(class_name(domain_)),
      registry_(domain_, clock) {}

std::mutex& HarvestNode::child_mutex(const DomainName& child) {
    std::lock_guard lock(child_mutexes_guard_);
    auto& slot = child_mutexes_[child];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

HarvestReport HarvestNode::harvest_once(const DomainName& child) {
    if (!registry_.find(child)) throw Error(ErrorCode::not_found, "child '" + child.str() + "' is not registered");
    std::lock_guard child_lock(child_mutex(child));

    const std::string endpoint = registry_.resolve(child);
    const Datestamp from = cursor(child).value_or(Datestamp::epoch());
    const Datestamp until = std::max(from, clock_->now());

    HarvestReport report{.child = child};
    std::optional<std::string> token;
    while (true) {
        Request request{.method = "GET", .path = "/dris/records", .params = {}, .body = {}};
        request.params["from"] = format_datestamp(from);
        request.params["until"] = format_datestamp(until);
        request.params["batch"] = std::to_string(options_.batch);
        if (token) request.params["token"] = *token;
        if (options_.payload == Payload::document) request.params["format"] = "document";

        std::vector<MetadataRecord> records;
        bool complete = false;
        try {
            if (options_.payload == Payload::document) {
                auto batch = call<DocumentBatch>(*transport_, endpoint, request, options_.timeout, &report.bytes);
                records.reserve(batch.documents.size());
                for (auto& doc : batch.documents) {
                    if (!doc.datestamp) throw Error(ErrorCode::internal, "child sent a document without datestamp");
                    records.push_back(extract_metadata(doc, child));
                }
                complete = batch.complete;
                token = std::move(batch.token);
            } else {
                auto batch = call<HarvestBatch>(*transport_, endpoint, request, options_.timeout, &report.bytes);
                records = std::move(batch.records);
                complete = batch.complete;
                token = std::move(batch.token);
            }
            if (!complete && !token) throw Error(ErrorCode::internal, "incomplete page without resumption token");
        } catch (const Error& e) {
            if (e.code() == ErrorCode::bad_token && report.restarts == 0) {
                ++report.restarts;
                token.reset();
                continue;
            }
            report.ok = false;
            report.error = e.code();
            report.message = e.what();
            return report;
        }
        ++report.pages;
        const auto applied = apply(std::move(records), child, complete ? std::optional(until) : std::nullopt);
        report.new_records += applied.inserted;
        report.updated += applied.updated;
        if (complete) break;
    }
    return report;
}

HarvestNode::Applied HarvestNode::apply(std::vector<MetadataRecord> records, const DomainName& child,
                                        std::optional<Datestamp> final_until) {
    Applied applied;
    std::unique_lock lock(mutex_);
    const Datestamp now = clock_->now();
    for (auto& rec : records) {
        const auto key = union_key(rec.source, rec.identifier);
        auto sort_key = union_sort_key(rec);
        auto tokens = record_tokens(rec);
        const Datestamp ds = rec.datestamp;
        switch (union_.upsert(key, std::move(sort_key), ds, std::move(rec), now)) {
            case VersionLog<MetadataRecord>::Change::inserted:
                ++applied.inserted;
                index_.upsert(key, tokens);
                break;
            case VersionLog<MetadataRecord>::Change::updated:
                ++applied.updated;
                index_.upsert(key, tokens);
                break;
            case VersionLog<MetadataRecord>::Change::unchanged:
                break;
        }
    }
    if (final_until) {
        auto [it, inserted] = cursors_.try_emplace(child, *final_until);
        if (!inserted && it->second < *final_until) it->second = *final_until;
    }
    applied_since_prune_ += applied.inserted + applied.updated;
    if (applied_since_prune_ >= 1024) {
        union_.prune(now + (-options_.token_ttl_seconds));
        applied_since_prune_ = 0;
    }
    return applied;
}

std::vector<HarvestReport> HarvestNode::harvest_all() {
    std::vector<HarvestReport> reports;
    for (const auto& child : registry_.children()) reports.push_back(harvest_once(child.domain));
    return reports;
}

std::vector<HarvestReport> HarvestNode::run_schedule(std::int64_t period_seconds, std::size_t ticks,
                                                     const std::function<bool(std::int64_t)>& wait) {
    if (period_seconds < 1) throw Error(ErrorCode::bad_query, "harvest period must be at least 1 second");
    std::vector<HarvestReport> reports;
    for (std::size_t tick = 0; ticks == 0 || tick < ticks; ++tick) {
        if (!wait(period_seconds)) break;
        auto round = harvest_all();
        reports.insert(reports.end(), std::make_move_iterator(round.begin()), std::make_move_iterator(round.end()));
    }
    return reports;
}

ResultList HarvestNode::union_search(std::string_view query, std::size_t k, std::optional<ResourceKind> kind) const {
    if (k == 0) throw Error(ErrorCode::bad_query, "k must be at least 1");
    const auto terms = query_tokens(query);

    std::shared_lock lock(mutex_);
    struct Candidate {
        const MetadataRecord* rec;
        double score;
    };
    std::vector<Candidate> candidates;
    for (const auto& s : index_.score(terms)) {
        const MetadataRecord* rec = union_.find(std::string(s.key));
        if (kind && rec->kind != *kind) continue;
        candidates.push_back({rec, s.score});
    }
    const auto better = [](const Candidate& a, const Candidate& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.rec->source != b.rec->source) return a.rec->source < b.rec->source;
        return a.rec->identifier < b.rec->identifier;
    };
    const std::size_t n = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n), candidates.end(),
                      better);

    ResultList out{.query = std::string(query), .k = k, .partial = false, .hits = {}};
    out.hits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const MetadataRecord& r = *candidates[i].rec;
        out.hits.push_back({r.source, r.identifier, r.title, r.kind, candidates[i].score});
    }
    return out;
}

CollectionDescription HarvestNode::aggregate_collection() const {
    std::shared_lock lock(mutex_);
    CollectionDescription cd{.domain = domain_};
    cd.doc_count = union_.size();
    union_.for_each([&](const MetadataRecord& r) { ++cd.kinds[r.kind]; });
    for (auto& [term, df] : index_.top_terms(CollectionDescription::max_terms)) cd.terms.emplace(std::move(term), df);
    cd.generated_at = clock_->now();
    return cd;
}

HarvestBatch HarvestNode::list_records(Datestamp from, Datestamp until, std::optional<std::string_view> token,
                                       std::size_t batch) const {
    std::shared_lock lock(mutex_);
    return harvest_page<HarvestBatch>(union_, tokens_, clock_->now(), options_.token_ttl_seconds, from, until, token,
                                      batch,
                                      [](HarvestBatch& out, const MetadataRecord& r) { out.records.push_back(r); });
}

std::optional<Datestamp> HarvestNode::cursor(const DomainName& child) const {
    std::shared_lock lock(mutex_);
    const auto it = cursors_.find(child);
    if (it == cursors_.end()) return std::nullopt;
    return it->second;
}

std::size_t HarvestNode::record_count() const {
    std::shared_lock lock(mutex_);
    return union_.size();
}

std::optional<MetadataRecord> HarvestNode::record(const DomainName& source, const std::string& identifier) const {
    std::shared_lock lock(mutex_);
    const MetadataRecord* r = union_.find(union_key(source, identifier));
    if (!r) return std::nullopt;
    return *r;
}

std::vector<MetadataRecord> HarvestNode::records() const {
    std::vector<MetadataRecord> out;
    {
        std::shared_lock lock(mutex_);
        out.reserve(union_.size());
        union_.for_each([&](const MetadataRecord& r) { out.push_back(r); });
    }
    std::sort(out.begin(), out.end(), [](const MetadataRecord& a, const MetadataRecord& b) {
        return a.source != b.source ? a.source < b.source : a.identifier < b.identifier;
    });
    return out;
}

std::size_t HarvestNode::df(std::string_view term) const {
    std::shared_lock lock(mutex_);
    return index_.df(term);
}

std::string HarvestNode::union_state() const {
    auto snap = snapshot();
    snap.erase("registry");
    return snap.dump();
}

wire::json HarvestNode::snapshot() const {
    auto recs = wire::json::array();
    for (const auto& r : records()) recs.push_back(wire::to_json(r));
    auto cursors = wire::json::object();
    {
        std::shared_lock lock(mutex_);
        for (const auto& [child, ds] : cursors_) cursors[child.str()] = format_datestamp(ds);
    }
    return {{"role", "mid"},
            {"domain", domain_.str()},
            {"records", std::move(recs)},
            {"cursors", std::move(cursors)},
            {"registry", registry_snapshot(registry_)}};
}

void HarvestNode::restore(const wire::json& snapshot) {
    try {
        if (parse_domain(snapshot.at("domain").get<std::string>()) != domain_) {
            throw Error(ErrorCode::bad_domain, "snapshot belongs to another node");
        }
        std::vector<MetadataRecord> recs;
        for (const auto& r : snapshot.at("records")) recs.push_back(wire::from_json<MetadataRecord>(r));
        std::map<DomainName, Datestamp> cursors;
        for (const auto& [child, ds] : snapshot.at("cursors").items()) {
            cursors.emplace(parse_domain(child), parse_datestamp(ds.get<std::string>()));
        }
        {
            std::unique_lock lock(mutex_);
            union_.clear();
            index_.clear();
            cursors_.clear();
            tokens_ = wire::TokenCodec(class_name(domain_) + "#" + std::to_string(++generation_));
        }
        for (auto& r : recs) {
            const auto source = r.source;
            apply({std::move(r)}, source, std::nullopt);
        }
        {
            std::unique_lock lock(mutex_);
            cursors_ = std::move(cursors);
        }
        restore_registry(registry_, snapshot.at("registry"));
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::internal, std::string("corrupt snapshot: ") + e.what());
    }
}

void HarvestNode::save_snapshot(const std::filesystem::path& path) const {
    wire::write_json_file(path, snapshot());
}

void HarvestNode::load_snapshot(const std::filesystem::path& path) {
    restore(wire::read_json_file(path));
}

Response HarvestNode::handle(const Request& request) {
    if (auto r = handle_registry_routes(registry_, request)) return *r;
    return respond([&]() -> wire::json {
        if (request.path == "/dris/search") {
            const auto q = request.param("q");
            if (!q) throw Error(ErrorCode::bad_query, "missing parameter 'q'");
            return wire::to_json(union_search(*q, count_param(request, "k", 10, 1, 10000), kind_param(request)));
        }
        if (request.path == "/dris/records") {
            if (request.param("format").value_or("metadata") != "metadata") {
                throw Error(ErrorCode::bad_query, "a union index serves metadata only");
            }
            const auto [from, until] = interval_params(request);
            const auto token = request.param("token");
            return wire::to_json(list_records(from, until, token && !token->empty() ? token : std::nullopt,
                                              count_param(request, "batch", wire::default_batch, 1, wire::max_batch)));
        }
        if (request.path == "/dris/collection") return wire::to_json(aggregate_collection());
        if (request.path == "/dris/harvest" && request.method == "POST") {
            auto reports = wire::json::array();
            for (const auto& r : harvest_all()) reports.push_back(to_json(r));
            return {{"reports", std::move(reports)}};
        }
        throw Error(ErrorCode::not_found, "no route " + request.method + " " + request.path);
    });
}

void register_with_parent(Transport& transport, const std::string& parent_endpoint, const DomainName& self,
                          const std::string& self_endpoint, const CollectionDescription& collection,
                          std::chrono::milliseconds timeout) {
    Request request{.method = "POST", .path = "/dris/register", .params = {}, .body = {}};
    request.body = wire::encode(RegisterRequest{self, self_endpoint, collection});
    const Response response = transport.send(parent_endpoint, request, timeout);
    if (!response.ok()) throw wire::error_from_body(response.status, response.body);
}

CollectionDescription merge_descriptions(const DomainName& domain, const std::vector<CollectionDescription>& parts,
                                         Datestamp generated_at) {
    CollectionDescription cd{.domain = domain};
    std::map<std::string, std::uint64_t> dfs;
    for (const auto& p : parts) {
        cd.doc_count += p.doc_count;
        for (const auto& [kind, n] : p.kinds) cd.kinds[kind] += n;
        for (const auto& [term, df] : p.terms) dfs[term] += df;
    }
    std::vector<std::pair<std::string, std::uint64_t>> ranked(dfs.begin(), dfs.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > CollectionDescription::max_terms) ranked.resize(CollectionDescription::max_terms);
    cd.terms.insert(ranked.begin(), ranked.end());
    cd.generated_at = generated_at;
    return cd;
}

}  // namespace dris
