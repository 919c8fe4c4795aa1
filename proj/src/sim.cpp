#include "dris/sim.hpp"

#include "dris/broker_node.hpp"
#include "dris/harvest_node.hpp"
#include "dris/org_node.hpp"
#include "dris/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <random>

namespace dris::sim {

namespace {

constexpr double kZipfExponent = 1.1;
constexpr std::array kKinds{ResourceKind::webpage, ResourceKind::ftp,     ResourceKind::video,
                            ResourceKind::pdf,     ResourceKind::picture, ResourceKind::database};

// Independent streams derived from the seed.
enum Stream : std::uint64_t { corpus = 1, churn = 2, queries = 3 };

std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
    return std::mt19937_64(seed * 0x9E3779B97F4A7C15ULL + stream);
}

// std::uniform_*_distribution output differs between standard libraries; these do not.
double unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) {
    return static_cast<std::uint64_t>(unit(rng) * static_cast<double>(n));
}

class Zipf {
public:
    explicit Zipf(std::size_t n) : cdf_(n) {
        double total = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            total += 1.0 / std::pow(static_cast<double>(r + 1), kZipfExponent);
            cdf_[r] = total;
        }
        for (auto& c : cdf_) c /= total;
    }

    std::size_t draw(std::mt19937_64& rng) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), unit(rng));
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

private:
    std::vector<double> cdf_;
};

std::string body_text(const Zipf& zipf, std::mt19937_64& rng, std::size_t length) {
    std::string body;
    for (std::size_t i = 0; i < length; ++i) {
        if (i) body += ' ';
        body += 'w';
        body += std::to_string(zipf.draw(rng));
    }
    return body;
}

std::string document_id(std::size_t doc) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "doc-%04zu", doc);
    return buf;
}

}  // namespace

std::string_view to_string(Strategy s) {
    return s == Strategy::full_download ? "FULL_DOWNLOAD" : "METADATA_HARVEST";
}

Strategy strategy_from_string(std::string_view text) {
    if (text == "FULL_DOWNLOAD") return Strategy::full_download;
    if (text == "METADATA_HARVEST") return Strategy::metadata_harvest;
    throw Error(ErrorCode::bad_query, "unknown strategy '" + std::string(text) + "'");
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw Error(ErrorCode::bad_query, std::string("config field '") + field + "' is out of range");
    };
    require(org_nodes >= 1, "org_nodes");
    require(org_nodes <= 20000, "org_nodes");
    require(docs_per_org >= 1, "docs_per_org");
    require(docs_per_org <= 10000, "docs_per_org");
    require(vocab_size >= 1, "vocab_size");
    require(doc_length >= 1, "doc_length");
    require(harvest_period >= 1, "harvest_period");
    require(query_count >= 1, "query_count");
    require(periods >= 1, "periods");
}

SimConfig config_from_json(const wire::json& j) {
    SimConfig c;
    try {
        c.seed = j.value("seed", c.seed);
        c.org_nodes = j.value("org_nodes", c.org_nodes);
        c.docs_per_org = j.value("docs_per_org", c.docs_per_org);
        c.vocab_size = j.value("vocab_size", c.vocab_size);
        c.doc_length = j.value("doc_length", c.doc_length);
        c.harvest_period = j.value("harvest_period", c.harvest_period);
        c.churn_rate = j.value("churn_rate", c.churn_rate);
        c.query_count = j.value("query_count", c.query_count);
        c.periods = j.value("periods", c.periods);
        if (j.contains("strategy")) c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
    } catch (const wire::json::exception& e) {
        throw Error(ErrorCode::bad_query, std::string("malformed config: ") + e.what());
    }
    c.validate();
    return c;
}

wire::json to_json(const SimConfig& c) {
    return {{"seed", c.seed},
            {"org_nodes", c.org_nodes},
            {"docs_per_org", c.docs_per_org},
            {"vocab_size", c.vocab_size},
            {"doc_length", c.doc_length},
            {"harvest_period", c.harvest_period},
            {"churn_rate", c.churn_rate},
            {"query_count", c.query_count},
            {"periods", c.periods},
            {"strategy", to_string(c.strategy)}};
}

SimConfig load_config(const std::filesystem::path& path) {
    return config_from_json(wire::read_json_file(path));
}

std::vector<DomainName> org_domains(std::size_t org_nodes) {
    const std::size_t edu = (org_nodes + 1) / 2;
    std::vector<DomainName> out;
    out.reserve(org_nodes);
    for (std::size_t i = 0; i < org_nodes; ++i) {
        out.push_back(parse_domain(i < edu ? "u" + std::to_string(i) + ".edu.cn"
                                           : "c" + std::to_string(i - edu) + ".com.cn"));
    }
    return out;
}

std::string unique_token(const SimConfig& config, std::size_t org, std::size_t doc) {
    return "uniq" + std::to_string(org * config.docs_per_org + doc);
}

std::vector<OrgCorpus> gen_corpus(const SimConfig& config) {
    config.validate();
    auto rng = make_rng(config.seed, Stream::corpus);
    const Zipf zipf(config.vocab_size);

    std::vector<OrgCorpus> out;
    for (auto& domain : org_domains(config.org_nodes)) {
        const std::size_t org = out.size();
        OrgCorpus corpus{std::move(domain), {}};
        corpus.documents.reserve(config.docs_per_org);
        for (std::size_t d = 0; d < config.docs_per_org; ++d) {
            Document doc;
            doc.identifier = document_id(d);
            doc.kind = kKinds[below(rng, kKinds.size())];
            doc.title = unique_token(config, org, d);
            for (int t = 0; t < 3; ++t) doc.title += " w" + std::to_string(zipf.draw(rng));
            doc.body = body_text(zipf, rng, config.doc_length);
            corpus.documents.push_back(std::move(doc));
        }
        out.push_back(std::move(corpus));
    }
    return out;
}

Metrics run_sim(const SimConfig& config, std::ostream* log) {
    config.validate();
    const auto corpus = gen_corpus(config);
    const std::int64_t period = config.harvest_period;

    ManualClock clock(sim_epoch);
    InProcessTransport net;

    BrokerNode broker(parse_domain("cn"), clock, net, {.timeout = std::chrono::milliseconds(2000),
                                                       .max_collections = 10,
                                                       .parallelism = 1});
    HarvestNode::Options mid_options;
    mid_options.payload = config.strategy == Strategy::full_download ? HarvestNode::Payload::document
                                                                     : HarvestNode::Payload::metadata;
    std::vector<std::unique_ptr<HarvestNode>> mids;
    for (const char* name : {"edu.cn", "com.cn"}) {
        mids.push_back(std::make_unique<HarvestNode>(parse_domain(name), clock, net, mid_options));
    }
    std::vector<std::unique_ptr<OrgNode>> orgs;
    std::vector<HarvestNode*> parent_of;
    for (const auto& c : corpus) {
        orgs.push_back(std::make_unique<OrgNode>(c.domain, clock));
        parent_of.push_back(c.domain.parent() == mids[0]->domain() ? mids[0].get() : mids[1].get());
    }

    const auto timeout = std::chrono::milliseconds(2000);
    net.attach(service_url(broker.domain()), broker);
    for (auto& m : mids) net.attach(service_url(m->domain()), *m);
    for (auto& o : orgs) net.attach(service_url(o->domain()), *o);

    for (std::size_t i = 0; i < orgs.size(); ++i) {
        orgs[i]->ingest(corpus[i].documents);
        register_with_parent(net, service_url(parent_of[i]->domain()), orgs[i]->domain(),
                             service_url(orgs[i]->domain()), orgs[i]->collection_description(), timeout);
    }
    auto register_mids = [&] {
        for (auto& m : mids) {
            register_with_parent(net, service_url(broker.domain()), m->domain(), service_url(m->domain()),
                                 m->aggregate_collection(), timeout);
        }
    };
    register_mids();

    Metrics metrics;
    std::map<std::pair<std::size_t, std::string>, Datestamp> visible;  // (org, id) -> datestamp seen upstream
    double staleness_sum = 0.0;
    std::uint64_t staleness_samples = 0;
    auto churn_rng = make_rng(config.seed, Stream::churn);
    const Zipf zipf(config.vocab_size);

    for (std::size_t k = 1; k <= config.periods; ++k) {
        const Datestamp period_start = sim_epoch + static_cast<std::int64_t>(k - 1) * period;
        const Datestamp tick = sim_epoch + static_cast<std::int64_t>(k) * period;

        struct Edit {
            Datestamp at;
            std::size_t org;
            std::size_t doc;
            std::string body;
        };
        std::vector<Edit> edits;
        for (std::size_t o = 0; o < orgs.size(); ++o) {
            std::vector<std::size_t> pick(config.docs_per_org);
            for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = i;
            const std::size_t n = std::min(config.churn_rate, pick.size());
            for (std::size_t i = 0; i < n; ++i) {
                std::swap(pick[i], pick[i + below(churn_rng, pick.size() - i)]);
                const std::int64_t offset =
                    period >= 2 ? 1 + static_cast<std::int64_t>(below(churn_rng, period - 1)) : 0;
                edits.push_back({period_start + offset, o, pick[i], body_text(zipf, churn_rng, config.doc_length)});
            }
        }
        std::stable_sort(edits.begin(), edits.end(), [](const Edit& a, const Edit& b) {
            return std::tie(a.at, a.org, a.doc) < std::tie(b.at, b.org, b.doc);
        });
        for (auto& e : edits) {
            clock.set(e.at);
            Document doc = corpus[e.org].documents[e.doc];
            doc.body = std::move(e.body);
            doc.datestamp.reset();
            orgs[e.org]->ingest(std::move(doc));
        }

        clock.set(tick);
        for (auto& m : mids) {
            for (const auto& r : m->harvest_all()) {
                metrics.traffic_bytes += r.bytes;
                if (log) {
                    *log << format_datestamp(tick) << " harvest " << m->domain().str() << " <- " << r.child.str()
                         << " ok=" << r.ok << " new=" << r.new_records << " updated=" << r.updated
                         << " bytes=" << r.bytes << '\n';
                }
            }
        }
        register_mids();

        for (std::size_t o = 0; o < orgs.size(); ++o) {
            for (const auto& doc : orgs[o]->documents()) {
                const Datestamp ds = *doc.datestamp;
                auto key = std::make_pair(o, doc.identifier);
                const auto seen = visible.find(key);
                if (seen != visible.end() && seen->second == ds) continue;
                const auto rec = parent_of[o]->record(orgs[o]->domain(), doc.identifier);
                if (!rec || rec->datestamp != ds) continue;
                const std::int64_t staleness = tick - ds;
                staleness_sum += static_cast<double>(staleness);
                ++staleness_samples;
                metrics.staleness_max = std::max(metrics.staleness_max, staleness);
                visible.insert_or_assign(std::move(key), ds);
            }
        }
        if (log) *log << format_datestamp(tick) << " tick " << k << " edits=" << edits.size() << '\n';
    }
    metrics.staleness_mean = staleness_samples ? staleness_sum / static_cast<double>(staleness_samples) : 0.0;

    std::uint64_t found = 0;
    std::uint64_t total = 0;
    for (std::size_t o = 0; o < orgs.size(); ++o) {
        for (std::size_t d = 0; d < config.docs_per_org; ++d) {
            ++total;
            const auto result = broker.broker_search(unique_token(config, o, d), 10);
            if (!result.partial) ++metrics.queries_ok;
            const auto& id = corpus[o].documents[d].identifier;
            const bool hit = std::any_of(result.hits.begin(), result.hits.end(), [&](const MergedHit& h) {
                return h.source == orgs[o]->domain() && h.id == id;
            });
            if (hit) ++found;
        }
    }
    metrics.coverage = total ? static_cast<double>(found) / static_cast<double>(total) : 0.0;

    auto query_rng = make_rng(config.seed, Stream::queries);
    for (std::size_t q = 0; q < config.query_count; ++q) {
        const std::string query = "w" + std::to_string(zipf.draw(query_rng)) + " w" + std::to_string(zipf.draw(query_rng));
        const auto result = broker.broker_search(query, 10);
        if (!result.partial) ++metrics.queries_ok;
        if (log) *log << "query '" << query << "' hits=" << result.hits.size() << '\n';
    }
    return metrics;
}

std::string csv_header() {
    return "strategy,coverage,staleness_mean,staleness_max,traffic_bytes,queries_ok";
}

std::string csv_row(const StrategyRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.3f,%lld,%llu,%llu", std::string(to_string(row.strategy)).c_str(),
                  row.metrics.coverage, row.metrics.staleness_mean,
                  static_cast<long long>(row.metrics.staleness_max),
                  static_cast<unsigned long long>(row.metrics.traffic_bytes),
                  static_cast<unsigned long long>(row.metrics.queries_ok));
    return buf;
}

std::vector<StrategyRow> compare_strategies(const SimConfig& config, std::ostream& out,
                                            const std::optional<std::filesystem::path>& csv) {
    std::vector<StrategyRow> rows;
    for (const auto s : {Strategy::full_download, Strategy::metadata_harvest}) {
        SimConfig c = config;
        c.strategy = s;
        rows.push_back({s, run_sim(c)});
    }

    out << "# staleness sampled at harvest-tick boundaries; traffic = harvest response payload bytes\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-18s %10s %16s %14s %14s %11s\n", "strategy", "coverage", "staleness_mean",
                  "staleness_max", "traffic_bytes", "queries_ok");
    out << line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-18s %10.6f %16.3f %14lld %14llu %11llu\n",
                      std::string(to_string(r.strategy)).c_str(), r.metrics.coverage, r.metrics.staleness_mean,
                      static_cast<long long>(r.metrics.staleness_max),
                      static_cast<unsigned long long>(r.metrics.traffic_bytes),
                      static_cast<unsigned long long>(r.metrics.queries_ok));
        out << line;
    }

    if (csv) {
        std::ofstream f(*csv, std::ios::binary | std::ios::trunc);
        f << csv_header() << '\n';
        for (const auto& r : rows) f << csv_row(r) << '\n';
        if (!f) throw Error(ErrorCode::internal, "cannot write " + csv->string());
    }
    return rows;
}

}  // namespace dris::sim
