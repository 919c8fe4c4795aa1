#include "dris/org_node.hpp"

#include "dris/paging.hpp"
#include "dris/text.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

namespace dris {

namespace {

constexpr Datestamp kFarFuture{253402300799};  // 9999-12-31T23:59:59Z

std::vector<std::string> document_tokens(const Document& doc) {
    auto tokens = tokenize(doc.title);
    auto body = tokenize(doc.body);
    tokens.insert(tokens.end(), std::make_move_iterator(body.begin()), std::make_move_iterator(body.end()));
    return tokens;
}

}  // namespace

MetadataRecord extract_metadata(const Document& doc, const DomainName& source) {
    return MetadataRecord{
        .identifier = doc.identifier,
        .source = source,
        .kind = doc.kind,
        .title = doc.title,
        .description = std::string(prefix_codepoints(doc.body, description_limit)),
        .datestamp = doc.datestamp.value_or(Datestamp{}),
    };
}

std::vector<std::string> query_tokens(std::string_view query) {
    auto tokens = tokenize(query);
    if (tokens.empty()) throw Error(ErrorCode::bad_query, "query has no searchable terms");
    return tokens;
}

std::optional<ResourceKind> kind_param(const Request& request) {
    const auto raw = request.param("kind");
    if (!raw || raw->empty()) return std::nullopt;
    return resource_kind_from_string(*raw);
}

std::pair<Datestamp, Datestamp> interval_params(const Request& request) {
    const auto from = request.param("from");
    const auto until = request.param("until");
    return {from && !from->empty() ? parse_datestamp(*from) : Datestamp::epoch(),
            until && !until->empty() ? parse_datestamp(*until) : kFarFuture};
}

OrgNode::OrgNode(DomainName domain, const Clock& clock, Options options)
    : domain_(std::move(domain)),
      clock_(&clock),
      options_(options),
      tokens_(class_name(domain_)),
      registry_(domain_, clock) {}

void OrgNode::ingest(Document doc) {
    std::unique_lock lock(mutex_);
    ingest_locked(std::move(doc));
}

std::size_t OrgNode::ingest(std::vector<Document> docs) {
    for (const auto& d : docs) {
        if (d.identifier.empty()) throw Error(ErrorCode::bad_query, "document identifier must not be empty");
    }
    std::unique_lock lock(mutex_);
    for (auto& d : docs) ingest_locked(std::move(d));
    return docs.size();
}

void OrgNode::ingest_locked(Document doc) {
    if (doc.identifier.empty()) throw Error(ErrorCode::bad_query, "document identifier must not be empty");
    const Datestamp now = clock_->now();
    if (!doc.datestamp) doc.datestamp = now;
    const auto tokens = document_tokens(doc);
    const std::string key = doc.identifier;
    const Datestamp ds = *doc.datestamp;
    if (docs_.upsert(key, key, ds, std::move(doc), now) == VersionLog<Document>::Change::unchanged) return;
    index_.upsert(key, tokens);

    const std::size_t retained = docs_.retained_versions() - docs_.size();
    if (++ingests_since_prune_ >= 1024 || retained > std::max<std::size_t>(1024, docs_.size())) {
        docs_.prune(now + (-options_.token_ttl_seconds));
        ingests_since_prune_ = 0;
    }
}

ResultList OrgNode::search(std::string_view query, std::size_t k, std::optional<ResourceKind> kind) const {
    if (k == 0) throw Error(ErrorCode::bad_query, "k must be at least 1");
    const auto terms = query_tokens(query);

    std::shared_lock lock(mutex_);
    struct Candidate {
        const Document* doc;
        double score;
    };
    std::vector<Candidate> candidates;
    for (const auto& s : index_.score(terms)) {
        const Document* doc = docs_.find(std::string(s.key));
        if (kind && doc->kind != *kind) continue;
        candidates.push_back({doc, s.score});
    }
    const auto better = [](const Candidate& a, const Candidate& b) {
        return a.score != b.score ? a.score > b.score : a.doc->identifier < b.doc->identifier;
    };
    const std::size_t n = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(n), candidates.end(),
                      better);

    ResultList out{.query = std::string(query), .k = k, .partial = false, .hits = {}};
    out.hits.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Document& d = *candidates[i].doc;
        out.hits.push_back({domain_, d.identifier, d.title, d.kind, candidates[i].score});
    }
    return out;
}

template <class Out, class Convert>
Out OrgNode::page(Datestamp from, Datestamp until, std::optional<std::string_view> token, std::size_t batch,
                  Convert&& convert) const {
    std::shared_lock lock(mutex_);
    return harvest_page<Out>(docs_, tokens_, clock_->now(), options_.token_ttl_seconds, from, until, token, batch,
                             std::forward<Convert>(convert));
}

HarvestBatch OrgNode::list_records(Datestamp from, Datestamp until, std::optional<std::string_view> token,
                                   std::size_t batch) const {
    return page<HarvestBatch>(from, until, token, batch, [this](HarvestBatch& out, const Document& doc) {
        out.records.push_back(extract_metadata(doc, domain_));
    });
}

DocumentBatch OrgNode::list_documents(Datestamp from, Datestamp until, std::optional<std::string_view> token,
                                      std::size_t batch) const {
    return page<DocumentBatch>(from, until, token, batch,
                               [](DocumentBatch& out, const Document& doc) { out.documents.push_back(doc); });
}

CollectionDescription OrgNode::collection_description() const {
    std::shared_lock lock(mutex_);
    CollectionDescription cd{.domain = domain_};
    cd.doc_count = docs_.size();
    docs_.for_each([&](const Document& d) { ++cd.kinds[d.kind]; });
    for (auto& [term, df] : index_.top_terms(CollectionDescription::max_terms)) cd.terms.emplace(std::move(term), df);
    cd.generated_at = clock_->now();
    return cd;
}

std::size_t OrgNode::doc_count() const {
    std::shared_lock lock(mutex_);
    return docs_.size();
}

std::uint64_t OrgNode::total_length() const {
    std::shared_lock lock(mutex_);
    return index_.total_length();
}

std::size_t OrgNode::df(std::string_view term) const {
    std::shared_lock lock(mutex_);
    return index_.df(term);
}

std::optional<Document> OrgNode::document(const std::string& identifier) const {
    std::shared_lock lock(mutex_);
    const Document* d = docs_.find(identifier);
    if (!d) return std::nullopt;
    return *d;
}

std::vector<Document> OrgNode::documents() const {
    std::shared_lock lock(mutex_);
    std::vector<Document> out;
    out.reserve(docs_.size());
    docs_.for_each([&](const Document& d) { out.push_back(d); });
    return out;
}

wire::json OrgNode::snapshot() const {
    auto docs = wire::json::array();
    for (const auto& d : documents()) docs.push_back(wire::to_json(d));
    return {{"role", "org"},
            {"domain", domain_.str()},
            {"documents", std::move(docs)},
            {"registry", registry_snapshot(registry_)}};
}

void OrgNode::restore(const wire::json& snapshot) {
    try {
        if (parse_domain(snapshot.at("domain").get<std::string>()) != domain_) {
            throw Error(ErrorCode::bad_domain, "snapshot belongs to another node");
        }
        std::vector<Document> docs;
        for (const auto& d : snapshot.at("documents")) docs.push_back(wire::from_json<Document>(d));
        {
            std::unique_lock lock(mutex_);
            docs_.clear();
            index_.clear();
            tokens_ = wire::TokenCodec(class_name(domain_) + "#" + std::to_string(++generation_));
            for (auto& d : docs) ingest_locked(std::move(d));
        }
        restore_registry(registry_, snapshot.at("registry"));
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::internal, std::string("corrupt snapshot: ") + e.what());
    }
}

void OrgNode::save_snapshot(const std::filesystem::path& path) const {
    wire::write_json_file(path, snapshot());
}

void OrgNode::load_snapshot(const std::filesystem::path& path) {
    restore(wire::read_json_file(path));
}

Response OrgNode::handle(const Request& request) {
    if (auto r = handle_registry_routes(registry_, request)) return *r;
    return respond([&]() -> wire::json {
        if (request.path == "/dris/search") {
            const auto q = request.param("q");
            if (!q) throw Error(ErrorCode::bad_query, "missing parameter 'q'");
            return wire::to_json(search(*q, count_param(request, "k", 10, 1, 10000), kind_param(request)));
        }
        if (request.path == "/dris/records") {
            const auto [from, until] = interval_params(request);
            const auto token = request.param("token");
            const auto batch = count_param(request, "batch", wire::default_batch, 1, wire::max_batch);
            const auto t = token && !token->empty() ? token : std::nullopt;
            if (request.param("format").value_or("metadata") == "document") {
                return wire::to_json(list_documents(from, until, t, batch));
            }
            return wire::to_json(list_records(from, until, t, batch));
        }
        if (request.path == "/dris/collection") return wire::to_json(collection_description());
        if (request.path == "/dris/ingest" && request.method == "POST") {
            const auto body = wire::parse_body(request.body);
            std::vector<Document> docs;
            try {
                for (const auto& d : body.at("documents")) docs.push_back(wire::from_json<Document>(d));
            } catch (const wire::json::exception& e) {
                throw Error(ErrorCode::bad_query, std::string("malformed ingest body: ") + e.what());
            }
            return {{"ingested", ingest(std::move(docs))}};
        }
        throw Error(ErrorCode::not_found, "no route " + request.method + " " + request.path);
    });
}

std::vector<Document> load_directory(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw Error(ErrorCode::bad_query, "not a directory: " + root.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<Document> docs;
    docs.reserve(files.size());
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        Document doc;
        doc.identifier = fs::relative(file, root).generic_string();
        doc.body = buf.str();
        auto ext = file.extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        doc.kind = ext == ".pdf" ? ResourceKind::pdf : ResourceKind::webpage;

        std::istringstream lines(doc.body);
        for (std::string line; std::getline(lines, line);) {
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto last = line.find_last_not_of(" \t\r");
            doc.title = std::string(prefix_codepoints(line.substr(first, last - first + 1), description_limit));
            break;
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

}  // namespace dris
