#pragma once

#include "dris/naming.hpp"
#include "dris/records.hpp"
#include "dris/wire.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dris::sim {

enum class Strategy { full_download, metadata_harvest };

std::string_view to_string(Strategy s);
/// "FULL_DOWNLOAD" or "METADATA_HARVEST"; throws BAD_QUERY otherwise.
Strategy strategy_from_string(std::string_view text);

struct SimConfig {
    std::uint64_t seed = 1;
    std::size_t org_nodes = 4;
    std::size_t docs_per_org = 50;
    std::size_t vocab_size = 1000;
    std::size_t doc_length = 500;       // body tokens
    std::int64_t harvest_period = 3600;  // simulated seconds
    std::size_t churn_rate = 2;          // documents re-ingested per org per period
    std::size_t query_count = 20;        // extra random broker queries after the last period
    std::size_t periods = 10;
    Strategy strategy = Strategy::metadata_harvest;

    /// Throws BAD_QUERY naming the first invalid field.
    void validate() const;
};

/// Missing fields keep their defaults; unknown fields are ignored.
SimConfig config_from_json(const wire::json& j);
wire::json to_json(const SimConfig& config);
SimConfig load_config(const std::filesystem::path& path);

struct Metrics {
    double coverage = 0.0;  // fraction of documents found at the broker by their unique title token
    double staleness_mean = 0.0;
    std::int64_t staleness_max = 0;  // seconds from modification to visibility in a mid index
    std::uint64_t traffic_bytes = 0;  // harvest response payloads
    std::uint64_t queries_ok = 0;     // broker queries answered with partial = false

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

struct OrgCorpus {
    DomainName domain;
    std::vector<Document> documents;
};

/// Simulation start instant, 2004-03-01T00:00:00Z.
inline constexpr Datestamp sim_epoch{1078099200};

/// Org domains of the fixed topology: the first ceil(n/2) are u{i}.edu.cn, the rest c{i}.com.cn.
std::vector<DomainName> org_domains(std::size_t org_nodes);

/// Zipf(1.1) bodies over "w0".."w{V-1}"; document n (global, 0-based) gets the
/// title token "uniq{n}". Byte-identical for identical (seed, config).
std::vector<OrgCorpus> gen_corpus(const SimConfig& config);

/// Title token that identifies the document `identifier` of org number `org`.
std::string unique_token(const SimConfig& config, std::size_t org, std::size_t doc);

/// Builds broker "cn" <- mids "edu.cn", "com.cn" <- orgs in process, runs
/// `periods` harvest periods with churn and measures. `log`, when given,
/// receives one deterministic line per event.
Metrics run_sim(const SimConfig& config, std::ostream* log = nullptr);

struct StrategyRow {
    Strategy strategy;
    Metrics metrics;
};

/// Runs both strategies on the same config and seed, writes a table to `out`
/// and, when `csv` is set, a CSV with a header and one row per strategy.
std::vector<StrategyRow> compare_strategies(const SimConfig& config, std::ostream& out,
                                            const std::optional<std::filesystem::path>& csv = std::nullopt);

std::string csv_header();
std::string csv_row(const StrategyRow& row);

}  // namespace dris::sim
