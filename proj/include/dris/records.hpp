#pragma once

#include "dris/datestamp.hpp"
#include "dris/naming.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dris {

/// Full-text item held by an organization node.
struct Document {
    std::string identifier;
    ResourceKind kind = ResourceKind::webpage;
    std::string title;
    std::string body;
    std::optional<Datestamp> datestamp;  // filled from the node clock on ingest when absent

    friend bool operator==(const Document&, const Document&) = default;
};

/// Harvested surrogate of a Document.
struct MetadataRecord {
    std::string identifier;
    DomainName source;
    ResourceKind kind = ResourceKind::webpage;
    std::string title;
    std::string description;
    Datestamp datestamp;

    friend bool operator==(const MetadataRecord&, const MetadataRecord&) = default;
};

/// Statistical summary of a node's holdings, enough for collection selection.
struct CollectionDescription {
    DomainName domain;
    std::uint64_t doc_count = 0;
    std::map<ResourceKind, std::uint64_t> kinds;
    std::map<std::string, std::uint64_t> terms;  // term -> document frequency, at most max_terms entries
    Datestamp generated_at;

    static constexpr std::size_t max_terms = 1000;

    friend bool operator==(const CollectionDescription&, const CollectionDescription&) = default;
};

struct Hit {
    DomainName source;
    std::string id;
    std::string title;
    ResourceKind kind = ResourceKind::webpage;
    double score = 0.0;

    friend bool operator==(const Hit&, const Hit&) = default;
};

struct ResultList {
    std::string query;
    std::size_t k = 10;
    bool partial = false;
    std::vector<Hit> hits;

    friend bool operator==(const ResultList&, const ResultList&) = default;
};

/// One page of GET /dris/records.
struct HarvestBatch {
    std::vector<MetadataRecord> records;
    std::optional<std::string> token;
    bool complete = true;

    friend bool operator==(const HarvestBatch&, const HarvestBatch&) = default;
};

/// One page of GET /dris/records?format=document (full-download strategy).
struct DocumentBatch {
    std::vector<Document> documents;
    std::optional<std::string> token;
    bool complete = true;

    friend bool operator==(const DocumentBatch&, const DocumentBatch&) = default;
};

struct ChildInfo {
    DomainName domain;
    std::string endpoint;
    Datestamp registered_at;

    friend bool operator==(const ChildInfo&, const ChildInfo&) = default;
};

struct RegisterRequest {
    DomainName domain;
    std::string endpoint;
    CollectionDescription collection;

    friend bool operator==(const RegisterRequest&, const RegisterRequest&) = default;
};

}  // namespace dris
