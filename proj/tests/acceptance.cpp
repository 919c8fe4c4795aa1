// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
// Usage: dris_acceptance <path-to-dris-cli> <scratch-dir>

#include "dris/broker_node.hpp"
#include "dris/harvest_node.hpp"
#include "dris/naming.hpp"
#include "dris/org_node.hpp"
#include "dris/sim.hpp"
#include "dris/text.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <sys/wait.h>

using namespace dris;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

constexpr Datestamp t0{fixtures::march_2004_epoch};

struct Outcome {
    bool pass;
    std::string detail;
};

Document doc(std::string id, std::string title, std::string body, std::optional<Datestamp> ds = std::nullopt) {
    return Document{.identifier = std::move(id), .kind = ResourceKind::webpage, .title = std::move(title),
                    .body = std::move(body), .datestamp = ds};
}

Outcome naming() {
    if (class_name(parse_domain("hust.edu.cn")) != "DRIS.cn.edu.hust") return {false, "class_name mismatch"};
    if (service_url(parse_domain("hust.edu.cn")) != "http://DRIS.hust.edu.cn") return {false, "service_url mismatch"};

    std::mt19937_64 rng(1);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-";
    std::set<std::string> names, classes;
    for (int i = 0; i < 1000; ++i) {
        std::string text;
        const int labels = 1 + static_cast<int>(rng() % 8);
        for (int l = 0; l < labels; ++l) {
            if (l) text += '.';
            const int len = 1 + static_cast<int>(rng() % 12);
            std::string label;
            for (int c = 0; c < len; ++c) label += alphabet[rng() % alphabet.size()];
            if (label.front() == '-') label.front() = 'a';
            if (label.back() == '-') label.back() = 'z';
            text += label;
        }
        const auto d = parse_domain(text);
        if (parse_domain(d.str()) != d) return {false, "round trip failed for " + text};
        std::string lower = text;
        for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (d.str() != lower) return {false, "canonical form differs for " + text};
        if (service_url(d) != "http://DRIS." + d.str()) return {false, "service_url for " + text};
        if (names.insert(d.str()).second != classes.insert(class_name(d)).second) return {false, "class_name not injective"};
    }
    return {true, "literal names match; 1000 random domains round-trip"};
}

Outcome ranking() {
    ManualClock clock(t0);
    OrgNode node(parse_domain("hust.edu.cn"), clock);
    std::map<std::string, std::vector<std::string>> corpus;
    for (const auto& d : fixtures::bm25_docs) {
        node.ingest(doc(std::string(d.id), std::string(d.title), std::string(d.body)));
        corpus[std::string(d.id)] = tokenize(std::string(d.title) + " " + std::string(d.body));
    }
    double worst = 0.0;
    for (const auto& q : fixtures::bm25_expected) {
        const auto got = node.search(q.query, 20);
        const auto live = oracle::bm25(corpus, oracle::words(std::string(q.query)));
        if (got.hits.size() != q.hits.size() || got.hits.size() != live.size()) {
            return {false, "hit count differs for '" + std::string(q.query) + "'"};
        }
        for (std::size_t i = 0; i < got.hits.size(); ++i) {
            if (got.hits[i].id != q.hits[i].id) return {false, "ranking differs for '" + std::string(q.query) + "'"};
            worst = std::max(worst, std::abs(got.hits[i].score - q.hits[i].score));
            worst = std::max(worst, std::abs(got.hits[i].score - live.at(got.hits[i].id)));
        }
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "5 queries, max |delta| = %.3g", worst);
    return {worst <= 1e-9, buf};
}

Outcome harvest() {
    // (a) idempotence
    {
        ManualClock clock(t0);
        InProcessTransport transport;
        OrgNode org(parse_domain("hust.edu.cn"), clock);
        transport.attach(service_url(org.domain()), org);
        HarvestNode mid(parse_domain("edu.cn"), clock, transport);
        mid.registry().register_child(org.domain(), service_url(org.domain()), org.collection_description());
        for (int i = 0; i < 50; ++i) org.ingest(doc("d" + std::to_string(i), "t", "b"));
        clock.advance(10);
        if (mid.harvest_once(org.domain()).new_records != 50) return {false, "(a) cold start incomplete"};
        const auto before = mid.union_state();
        const auto again = mid.harvest_once(org.domain());
        if (again.new_records || again.updated || mid.union_state() != before) return {false, "(a) second pass changed state"};
    }
    // (b) partition completeness on 200 records
    {
        ManualClock clock(t0);
        OrgNode org(parse_domain("hust.edu.cn"), clock);
        std::mt19937_64 rng(200);
        for (int i = 0; i < 200; ++i) org.ingest(doc("r" + std::to_string(i), "t", "b", t0 + static_cast<std::int64_t>(rng() % 10000)));
        clock.set(t0 + 20000);
        auto collect = [&](Datestamp from, Datestamp until) {
            std::multiset<std::string> ids;
            std::optional<std::string> token;
            do {
                const auto page = org.list_records(from, until, token, 17);
                for (const auto& r : page.records) ids.insert(r.identifier);
                token = page.token;
            } while (token);
            return ids;
        };
        const auto whole = collect(Datestamp::epoch(), clock.now());
        auto split = collect(Datestamp::epoch(), t0 + 4321);
        const auto right = collect(t0 + 4321, clock.now());
        split.insert(right.begin(), right.end());
        if (whole.size() != 200 || split != whole) return {false, "(b) split harvest differs from full harvest"};
    }
    // (c) failure safety
    {
        ManualClock clock(t0);
        InProcessTransport transport;
        OrgNode org(parse_domain("hust.edu.cn"), clock);
        transport.attach(service_url(org.domain()), org);
        HarvestNode mid(parse_domain("edu.cn"), clock, transport, {.batch = 10});
        mid.registry().register_child(org.domain(), service_url(org.domain()), org.collection_description());
        for (int i = 0; i < 50; ++i) org.ingest(doc("d" + std::to_string(i), "t", "b"));
        clock.advance(10);
        transport.set_fault(service_url(org.domain()), {.fail_after = 2});
        const auto r = mid.harvest_once(org.domain());
        if (r.ok || mid.cursor(org.domain())) return {false, "(c) cursor moved after a failed pass"};
        transport.clear_fault(service_url(org.domain()));
        if (!mid.harvest_once(org.domain()).ok || mid.record_count() != 50) return {false, "(c) recovery pass incomplete"};
    }
    return {true, "(a) idempotent, (b) 200-record partition complete, (c) cursor unmoved on failure"};
}

Outcome coverage() {
    sim::SimConfig c;
    c.org_nodes = 4;
    c.docs_per_org = 50;
    c.churn_rate = 0;
    c.periods = 1;
    const auto m = sim::run_sim(c);
    char buf[96];
    std::snprintf(buf, sizeof buf, "coverage = %.6f over 200 documents", m.coverage);
    return {m.coverage == 1.0, buf};
}

Outcome freshness() {
    sim::SimConfig c;
    c.periods = 10;
    c.churn_rate = 2;
    const auto m = sim::run_sim(c);
    char buf[128];
    std::snprintf(buf, sizeof buf, "P = %lld s, staleness_max = %lld s, mean = %.1f s", static_cast<long long>(c.harvest_period),
                  static_cast<long long>(m.staleness_max), m.staleness_mean);
    return {m.staleness_max >= 0 && m.staleness_max <= 2 * c.harvest_period, buf};
}

Outcome traffic() {
    sim::SimConfig c;
    c.strategy = sim::Strategy::full_download;
    const auto full = sim::run_sim(c);
    c.strategy = sim::Strategy::metadata_harvest;
    const auto meta = sim::run_sim(c);

    const auto corpus = sim::gen_corpus(c);
    std::size_t body = 0, record = 0, n = 0;
    for (const auto& org : corpus) {
        for (const auto& d : org.documents) {
            body += d.body.size();
            record += wire::to_json(extract_metadata(d, org.domain)).dump().size();
            ++n;
        }
    }
    const double ratio = static_cast<double>(meta.traffic_bytes) / static_cast<double>(full.traffic_bytes);
    char buf[160];
    std::snprintf(buf, sizeof buf, "METADATA_HARVEST %llu B vs FULL_DOWNLOAD %llu B (ratio %.3f); body/record %.2f",
                  static_cast<unsigned long long>(meta.traffic_bytes), static_cast<unsigned long long>(full.traffic_bytes),
                  ratio, static_cast<double>(body) / static_cast<double>(record));
    return {ratio < 0.5 && body >= 5 * record && n > 0, buf};
}

Outcome robustness() {
    ManualClock clock(t0);
    InProcessTransport transport;
    std::vector<std::unique_ptr<OrgNode>> orgs;
    std::vector<std::unique_ptr<HarvestNode>> mids;
    BrokerNode broker(parse_domain("cn"), clock, transport, {.timeout = 200ms});
    std::mt19937_64 rng(7);
    for (const char* m : {"edu.cn", "com.cn", "org.cn"}) {
        mids.push_back(std::make_unique<HarvestNode>(parse_domain(m), clock, transport));
        transport.attach(service_url(mids.back()->domain()), *mids.back());
        for (int o = 0; o < 2; ++o) {
            const auto domain = parse_domain("o" + std::to_string(o) + "." + m);
            orgs.push_back(std::make_unique<OrgNode>(domain, clock));
            for (int i = 0; i < 20; ++i) {
                orgs.back()->ingest(doc("d" + std::to_string(i), oracle::random_text(rng, 1, 3, 10),
                                        oracle::random_text(rng, 5, 20, 10)));
            }
            transport.attach(service_url(domain), *orgs.back());
            mids.back()->registry().register_child(domain, service_url(domain), orgs.back()->collection_description());
        }
    }
    clock.advance(1);
    for (auto& m : mids) {
        m->harvest_all();
        broker.registry().register_child(m->domain(), service_url(m->domain()), m->aggregate_collection());
    }
    const auto slow = parse_domain("com.cn");
    transport.set_fault(service_url(slow), {.latency = 1000ms});

    int exercised = 0;
    for (int q = 0; q < 10; ++q) {
        const auto query = oracle::random_text(rng, 1, 3, 10);
        const auto r = broker.broker_search(query, 20);
        auto selected = broker.select_collections(query, 10);
        const bool slow_selected = std::erase(selected, slow) > 0;
        const auto baseline = merge(query, broker.fan_out(query, selected, 20, 200ms), 20);
        if (!slow_selected) continue;
        ++exercised;
        if (!r.partial) return {false, "partial flag not set for '" + query + "'"};
        if (r.per_child.at(slow).error != ErrorCode::timeout) return {false, "slow child not reported as TIMEOUT"};
        if (r.hits != baseline.hits) return {false, "merged order differs from excluding the slow child for '" + query + "'"};
        for (const auto& [d, s] : r.per_child) {
            if (d != slow && s.hits != baseline.per_child.at(d).hits) return {false, "remaining child hits changed"};
        }
    }
    if (exercised == 0) return {false, "slow child never selected"};
    return {true, std::to_string(exercised) + " queries with one child past its timeout: partial, remaining hits and order intact"};
}

int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const std::string& cli, const fs::path& scratch) {
    fs::create_directories(scratch);
    const auto config = scratch / "acceptance_sim.json";
    std::ofstream(config) << R"({"seed": 1, "org_nodes": 4, "docs_per_org": 50, "churn_rate": 2, "periods": 5})";
    const auto a = scratch / "acceptance_run1.csv";
    const auto b = scratch / "acceptance_run2.csv";
    fs::remove(a);
    fs::remove(b);
    if (run_cli(cli, "sim --config " + config.string() + " --csv " + a.string()) != 0 ||
        run_cli(cli, "sim --config " + config.string() + " --csv " + b.string()) != 0) {
        return {false, "dris sim exited non-zero"};
    }
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto x = slurp(a), y = slurp(b);
    if (x.empty()) return {false, "empty CSV"};
    return {x == y, std::to_string(x.size()) + " CSV bytes, identical across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: dris_acceptance <dris-cli> <scratch-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path scratch = argv[2];

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"naming conformance", naming},
        {"ranking oracle", ranking},
        {"harvest correctness", harvest},
        {"end-to-end coverage", coverage},
        {"freshness bound", freshness},
        {"traffic direction", traffic},
        {"broker robustness", robustness},
        {"determinism", [&] { return determinism(cli, scratch); }},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << " ("
                  << ms.count() << " ms)\n";
        failed += o.pass ? 0 : 1;
    }
    std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
    return failed ? 1 : 0;
}
