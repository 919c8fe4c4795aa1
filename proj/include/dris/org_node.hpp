#pragma once

#include "dris/datestamp.hpp"
#include "dris/inverted_index.hpp"
#include "dris/records.hpp"
#include "dris/registry.hpp"
#include "dris/transport.hpp"
#include "dris/version_log.hpp"
#include "dris/wire.hpp"

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

namespace dris {

inline constexpr std::size_t description_limit = 200;  // codepoints

/// Harvestable surrogate of `doc` as published by node `source`.
/// The document must carry a datestamp.
MetadataRecord extract_metadata(const Document& doc, const DomainName& source);

/// Third-layer node: a centralized document store with full-text search and
/// an incremental metadata harvest endpoint.
class OrgNode final : public Service {
public:
    struct Options {
        /// Resumption tokens older than this are rejected; superseded versions are kept this long.
        std::int64_t token_ttl_seconds = 3600;
    };

    OrgNode(DomainName domain, const Clock& clock) : OrgNode(std::move(domain), clock, Options{}) {}
    OrgNode(DomainName domain, const Clock& clock, Options options);

    const DomainName& domain() const noexcept { return domain_; }
    NodeRegistry& registry() noexcept { return registry_; }
    const NodeRegistry& registry() const noexcept { return registry_; }

    /// Upsert by identifier. Throws BAD_QUERY for an empty identifier.
    void ingest(Document doc);
    std::size_t ingest(std::vector<Document> docs);

    /// BM25 over title and body. Throws BAD_QUERY when the query has no tokens.
    ResultList search(std::string_view query, std::size_t k, std::optional<ResourceKind> kind = std::nullopt) const;

    /// Records with from <= datestamp < until in (datestamp, identifier) order.
    /// Throws BAD_DATESTAMP (from > until) and BAD_TOKEN.
    HarvestBatch list_records(Datestamp from, Datestamp until, std::optional<std::string_view> token,
                              std::size_t batch = wire::default_batch) const;
    /// Same paging over full documents.
    DocumentBatch list_documents(Datestamp from, Datestamp until, std::optional<std::string_view> token,
                                 std::size_t batch = wire::default_batch) const;

    CollectionDescription collection_description() const;

    std::size_t doc_count() const;
    std::uint64_t total_length() const;
    std::size_t df(std::string_view term) const;
    std::optional<Document> document(const std::string& identifier) const;
    /// Current documents in (datestamp, identifier) order.
    std::vector<Document> documents() const;

    wire::json snapshot() const;
    void restore(const wire::json& snapshot);
    void save_snapshot(const std::filesystem::path& path) const;
    void load_snapshot(const std::filesystem::path& path);

    Response handle(const Request& request) override;

private:
    template <class Out, class Convert>
    Out page(Datestamp from, Datestamp until, std::optional<std::string_view> token, std::size_t batch,
             Convert&& convert) const;
    void ingest_locked(Document doc);

    DomainName domain_;
    const Clock* clock_;
    Options options_;
    wire::TokenCodec tokens_;
    NodeRegistry registry_;

    mutable std::shared_mutex mutex_;
    VersionLog<Document> docs_;
    InvertedIndex index_;
    std::uint64_t ingests_since_prune_ = 0;
    std::uint64_t generation_ = 0;  // bumped by restore() so older tokens stop validating
};

/// One document per regular file under `root`; identifier = path relative to
/// `root`, title = first non-blank line, kind from the extension.
std::vector<Document> load_directory(const std::filesystem::path& root);

/// Shared helpers for the query surfaces of every layer.
std::vector<std::string> query_tokens(std::string_view query);
std::optional<ResourceKind> kind_param(const Request& request);
std::pair<Datestamp, Datestamp> interval_params(const Request& request);

}  // namespace dris
