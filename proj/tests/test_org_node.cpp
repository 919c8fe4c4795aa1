#include "dris/org_node.hpp"
#include "dris/text.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

using namespace dris;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::internal;
}

Document doc(std::string id, std::string title, std::string body, std::optional<Datestamp> ds = std::nullopt) {
    return Document{.identifier = std::move(id), .kind = ResourceKind::webpage, .title = std::move(title),
                    .body = std::move(body), .datestamp = ds};
}

const DomainName hust = parse_domain("hust.edu.cn");
constexpr Datestamp t0{fixtures::march_2004_epoch};

void load_fixture(OrgNode& node) {
    for (const auto& d : fixtures::bm25_docs) node.ingest(doc(std::string(d.id), std::string(d.title), std::string(d.body)));
}

std::vector<std::string> all_record_ids(const OrgNode& node, Datestamp from, Datestamp until, std::size_t batch) {
    std::vector<std::string> ids;
    std::optional<std::string> token;
    do {
        const auto page = node.list_records(from, until, token, batch);
        for (const auto& r : page.records) ids.push_back(r.identifier);
        token = page.token;
        CHECK(page.complete == !token.has_value());
    } while (token);
    return ids;
}

}  // namespace

TEST_CASE("ingest upserts by identifier") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    node.ingest(doc("d1", "first", "alpha beta"));
    clock.advance(10);
    node.ingest(doc("d1", "first", "gamma delta"));
    CHECK(node.doc_count() == 1);
    CHECK(node.df("alpha") == 0);
    CHECK(node.df("gamma") == 1);
    CHECK(node.document("d1")->datestamp == t0 + 10);
    CHECK(node.search("alpha", 10).hits.empty());

    for (int i = 0; i < 50; ++i) node.ingest(doc("n" + std::to_string(i), "", "x"));
    CHECK(node.doc_count() == 51);

    CHECK(code_of([&] { node.ingest(doc("", "t", "b")); }) == ErrorCode::bad_query);
}

TEST_CASE("ingest without datestamp takes the node clock; explicit datestamps are kept") {
    ManualClock clock(t0 + 123);
    OrgNode node(hust, clock);
    node.ingest(doc("a", "", "x"));
    node.ingest(doc("b", "", "x", t0));
    CHECK(node.document("a")->datestamp == t0 + 123);
    CHECK(node.document("b")->datestamp == t0);
}

TEST_CASE("search_local basic cases") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    node.ingest(doc("only", "", "harvest"));
    node.ingest(doc("other", "", "crawl"));
    auto r = node.search("harvest", 10);
    REQUIRE(r.hits.size() == 1);
    CHECK(r.hits[0].id == "only");
    CHECK(r.hits[0].score > 0.0);
    CHECK(r.hits[0].source == hust);
    CHECK_FALSE(r.partial);

    CHECK(node.search("absent", 10).hits.empty());
    CHECK(code_of([&] { node.search(" ,, ", 10); }) == ErrorCode::bad_query);
    CHECK(code_of([&] { node.search("harvest", 0); }) == ErrorCode::bad_query);
}

TEST_CASE("search_local matches the brute-force BM25 oracle on the 20-document fixture") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    load_fixture(node);

    std::map<std::string, std::vector<std::string>> corpus;
    for (const auto& d : fixtures::bm25_docs) corpus[std::string(d.id)] = tokenize(std::string(d.title) + " " + std::string(d.body));

    for (const auto& q : fixtures::bm25_expected) {
        CAPTURE(q.query);
        const auto result = node.search(q.query, 20);
        REQUIRE(result.hits.size() == q.hits.size());
        const auto live_oracle = oracle::bm25(corpus, oracle::words(std::string(q.query)));
        for (std::size_t i = 0; i < q.hits.size(); ++i) {
            CHECK(result.hits[i].id == q.hits[i].id);
            CHECK(std::abs(result.hits[i].score - q.hits[i].score) <= 1e-9);
            CHECK(std::abs(result.hits[i].score - live_oracle.at(result.hits[i].id)) <= 1e-9);
        }
    }
    // k truncates after ordering.
    const auto top2 = node.search("grid search", 2);
    REQUIRE(top2.hits.size() == 2);
    CHECK(top2.hits[1].id == "f11");
}

TEST_CASE("search is deterministic and ties break by identifier") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    for (const char* id : {"z", "m", "a"}) node.ingest(doc(id, "", "same words here"));
    const auto r1 = node.search("words", 10);
    const auto r2 = node.search("words", 10);
    CHECK(r1 == r2);
    REQUIRE(r1.hits.size() == 3);
    CHECK(r1.hits[0].id == "a");
    CHECK(r1.hits[2].id == "z");
}

TEST_CASE("kind filter restricts hits") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    auto a = doc("a", "", "report");
    a.kind = ResourceKind::pdf;
    node.ingest(a);
    node.ingest(doc("b", "", "report"));
    const auto r = node.search("report", 10, ResourceKind::pdf);
    REQUIRE(r.hits.size() == 1);
    CHECK(r.hits[0].kind == ResourceKind::pdf);
}

TEST_CASE("property: adding a query-term occurrence never lowers the score") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        ManualClock clock(t0);
        OrgNode base(hust, clock);
        OrgNode probe(hust, clock);
        std::vector<std::string> target;
        for (int i = 0; i < 8; ++i) {
            const auto text = oracle::random_text(rng, 5, 15, 12);
            base.ingest(doc("d" + std::to_string(i), "", text));
            probe.ingest(doc("d" + std::to_string(i), "", text));
        }
        auto words = oracle::words(oracle::random_text(rng, 6, 12, 12));
        words.push_back("t3");
        std::string before, after;
        bool swapped = false;
        for (auto& w : words) {
            before += w + " ";
            if (!swapped && w != "t3") {
                after += "t3 ";
                swapped = true;
            } else {
                after += w + " ";
            }
        }
        if (!swapped) continue;
        base.ingest(doc("target", "", before));
        probe.ingest(doc("target", "", after));
        auto score_of = [](const OrgNode& n) {
            for (const auto& h : n.search("t3", 20).hits) {
                if (h.id == "target") return h.score;
            }
            return 0.0;
        };
        CHECK(score_of(probe) >= score_of(base) - 1e-12);
    }
}

TEST_CASE("extract_metadata copies fields and truncates the description") {
    Document d = doc("x", "T", std::string(50, 'a'), t0);
    d.kind = ResourceKind::video;
    auto rec = extract_metadata(d, hust);
    CHECK(rec.description == d.body);
    CHECK(rec.datestamp == t0);
    CHECK(rec.source == hust);
    CHECK(rec.kind == ResourceKind::video);
    CHECK(rec.title == "T");

    d.body = std::string(1000, 'b');
    CHECK(extract_metadata(d, hust).description.size() == 200);

    d.body.clear();
    for (int i = 0; i < 300; ++i) d.body += "\xe4\xb8\xad";
    CHECK(extract_metadata(d, hust).description.size() == 600);
}

TEST_CASE("list_records pages in batches") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    for (int i = 0; i < 250; ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "r%03d", i);
        node.ingest(doc(id, "", "x", t0 + (i % 7)));
    }
    clock.advance(100);
    auto p1 = node.list_records(Datestamp::epoch(), clock.now(), std::nullopt, 100);
    CHECK(p1.records.size() == 100);
    CHECK_FALSE(p1.complete);
    REQUIRE(p1.token);
    auto p2 = node.list_records(Datestamp::epoch(), clock.now(), p1.token, 100);
    CHECK(p2.records.size() == 100);
    REQUIRE(p2.token);
    auto p3 = node.list_records(Datestamp::epoch(), clock.now(), p2.token, 100);
    CHECK(p3.records.size() == 50);
    CHECK(p3.complete);
    CHECK_FALSE(p3.token);

    std::vector<MetadataRecord> all;
    for (auto* p : {&p1, &p2, &p3}) all.insert(all.end(), p->records.begin(), p->records.end());
    CHECK(std::is_sorted(all.begin(), all.end(), [](const MetadataRecord& a, const MetadataRecord& b) {
        return std::tie(a.datestamp, a.identifier) < std::tie(b.datestamp, b.identifier);
    }));

    const auto empty = node.list_records(t0 + 3, t0 + 3, std::nullopt, 100);
    CHECK(empty.records.empty());
    CHECK(empty.complete);
    CHECK(code_of([&] { node.list_records(t0 + 4, t0 + 3, std::nullopt, 100); }) == ErrorCode::bad_datestamp);
    CHECK(code_of([&] { node.list_records(t0, t0 + 9, std::nullopt, 0); }) == ErrorCode::bad_query);
}

TEST_CASE("property: adjacent intervals partition the record set") {
    std::mt19937_64 rng(2004);
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    std::map<std::string, Datestamp> truth;
    for (int i = 0; i < 200; ++i) {
        const Datestamp ds = t0 + static_cast<std::int64_t>(rng() % 10000);
        node.ingest(doc("p" + std::to_string(i), "", "x", ds));
        truth["p" + std::to_string(i)] = ds;
    }
    clock.set(t0 + 20000);
    for (int trial = 0; trial < 20; ++trial) {
        const Datestamp a = t0 + static_cast<std::int64_t>(rng() % 3000);
        const Datestamp b = a + static_cast<std::int64_t>(rng() % 5000);
        const Datestamp c = b + static_cast<std::int64_t>(rng() % 5000);
        const std::size_t batch = 1 + rng() % 60;
        auto left = all_record_ids(node, a, b, batch);
        auto right = all_record_ids(node, b, c, batch);
        auto whole = all_record_ids(node, a, c, batch);

        std::set<std::string> l(left.begin(), left.end()), r(right.begin(), right.end()), w(whole.begin(), whole.end());
        CHECK(l.size() == left.size());
        CHECK(w.size() == whole.size());
        for (const auto& id : l) CHECK(r.count(id) == 0);
        std::set<std::string> both = l;
        both.insert(r.begin(), r.end());
        CHECK(both == w);

        std::set<std::string> expected;
        for (const auto& [id, ds] : truth) {
            if (a <= ds && ds < c) expected.insert(id);
        }
        CHECK(w == expected);
    }
}

TEST_CASE("harvest pass is stable while documents change between pages") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    for (int i = 0; i < 120; ++i) node.ingest(doc("s" + std::to_string(i), "", "x", t0 + i));
    clock.set(t0 + 1000);
    const Datestamp until = clock.now();

    std::set<std::string> expected;
    for (const auto& d : node.documents()) expected.insert(d.identifier);

    std::vector<std::string> seen;
    std::optional<std::string> token;
    int round = 0;
    do {
        const auto page = node.list_records(Datestamp::epoch(), until, token, 10);
        for (const auto& r : page.records) seen.push_back(r.identifier);
        token = page.token;
        // Re-ingest early documents (moving them to the end of the datestamp order) and add new ones.
        node.ingest(doc("s" + std::to_string(round), "", "changed", t0 + 500 + round));
        node.ingest(doc("new" + std::to_string(round), "", "fresh", t0 + round));
        ++round;
    } while (token);

    const std::set<std::string> unique(seen.begin(), seen.end());
    CHECK(unique.size() == seen.size());
    CHECK(unique == expected);
}

TEST_CASE("tokens from other nodes, expired tokens and pre-restore tokens are rejected") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    OrgNode whu(parse_domain("whu.edu.cn"), clock);
    for (int i = 0; i < 30; ++i) {
        node.ingest(doc("a" + std::to_string(i), "", "x"));
        whu.ingest(doc("a" + std::to_string(i), "", "x"));
    }
    clock.advance(1);
    const auto page = node.list_records(Datestamp::epoch(), clock.now(), std::nullopt, 10);
    REQUIRE(page.token);
    CHECK(code_of([&] { whu.list_records(Datestamp::epoch(), clock.now(), page.token, 10); }) == ErrorCode::bad_token);
    CHECK(code_of([&] { node.list_records(Datestamp::epoch(), clock.now(), std::string("garbage"), 10); }) ==
          ErrorCode::bad_token);

    clock.advance(3601);
    CHECK(code_of([&] { node.list_records(Datestamp::epoch(), clock.now(), page.token, 10); }) == ErrorCode::bad_token);

    clock.set(t0 + 1);
    const auto fresh = node.list_records(Datestamp::epoch(), clock.now(), std::nullopt, 10);
    node.restore(node.snapshot());
    CHECK(code_of([&] { node.list_records(Datestamp::epoch(), clock.now(), fresh.token, 10); }) == ErrorCode::bad_token);
}

TEST_CASE("collection description") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    auto empty = node.collection_description();
    CHECK(empty.doc_count == 0);
    CHECK(empty.terms.empty());
    CHECK(empty.domain == hust);

    node.ingest(doc("g", "", "grid grid search"));
    auto one = node.collection_description();
    CHECK(one.terms.at("grid") == 1);
    CHECK(one.terms.at("search") == 1);
    CHECK(one.generated_at == t0);

    OrgNode fixture(hust, clock);
    load_fixture(fixture);
    const auto cd = fixture.collection_description();
    CHECK(cd.doc_count == 20);
    CHECK(cd.terms.size() == fixtures::fixture_df.size());
    for (const auto& e : fixtures::fixture_df) CHECK(cd.terms.at(std::string(e.term)) == e.df);
    std::uint64_t kinds = 0;
    for (const auto& [k, n] : cd.kinds) kinds += n;
    CHECK(kinds == cd.doc_count);
}

TEST_CASE("collection description keeps the top 1000 terms by df, ties by term") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    // "common" in every doc; 1500 singleton terms compete for the remaining 999 slots.
    for (int i = 0; i < 1500; ++i) {
        char term[16];
        std::snprintf(term, sizeof term, "u%04d", i);
        node.ingest(doc("d" + std::to_string(i), "", std::string("common ") + term));
    }
    const auto cd = node.collection_description();
    REQUIRE(cd.terms.size() == 1000);
    CHECK(cd.terms.at("common") == 1500);
    CHECK(cd.terms.count("u0000") == 1);
    CHECK(cd.terms.count("u0998") == 1);
    CHECK(cd.terms.count("u0999") == 0);
    for (const auto& [t, df] : cd.terms) CHECK(df <= cd.doc_count);
}

TEST_CASE("property: index statistics equal a from-scratch rebuild after any ingest sequence") {
    std::mt19937_64 rng(77);
    ManualClock clock(t0);
    OrgNode live(hust, clock);
    for (int step = 0; step < 300; ++step) {
        clock.advance(1);
        live.ingest(doc("k" + std::to_string(rng() % 40), oracle::random_text(rng, 0, 3), oracle::random_text(rng, 0, 10)));
    }
    OrgNode rebuilt(hust, clock);
    for (const auto& d : live.documents()) rebuilt.ingest(d);
    CHECK(live.doc_count() == rebuilt.doc_count());
    CHECK(live.total_length() == rebuilt.total_length());
    for (int t = 0; t < 40; ++t) CHECK(live.df("t" + std::to_string(t)) == rebuilt.df("t" + std::to_string(t)));
    CHECK(live.search("t1 t2 t3", 50) == rebuilt.search("t1 t2 t3", 50));
}

TEST_CASE("snapshot save and load rebuild the same node") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);
    load_fixture(node);
    node.registry().register_child(parse_domain("lib.hust.edu.cn"), "http://127.0.0.1:1",
                                   CollectionDescription{.domain = parse_domain("lib.hust.edu.cn")});
    const auto path = std::filesystem::temp_directory_path() / "dris_org_snapshot_test.json";
    node.save_snapshot(path);

    OrgNode loaded(hust, clock);
    loaded.load_snapshot(path);
    std::filesystem::remove(path);
    CHECK(loaded.documents() == node.documents());
    CHECK(loaded.search("library web search", 10) == node.search("library web search", 10));
    CHECK(loaded.registry().entries() == node.registry().entries());

    OrgNode other(parse_domain("whu.edu.cn"), clock);
    CHECK(code_of([&] { other.restore(node.snapshot()); }) == ErrorCode::bad_domain);
}

TEST_CASE("request handling maps routes and errors onto the wire") {
    ManualClock clock(t0);
    OrgNode node(hust, clock);

    Request ingest{.method = "POST", .path = "/dris/ingest", .params = {}, .body = {}};
    ingest.body = R"({"documents":[{"identifier":"a","kind":"pdf","title":"Grid","body":"grid search"},
                                   {"identifier":"b","title":"Other","body":"crawl"}]})";
    auto r = node.handle(ingest);
    CHECK(r.status == 200);
    CHECK(wire::json::parse(r.body) == wire::json{{"ingested", 2}});

    Request search{.method = "GET", .path = "/dris/search", .params = {{"q", "grid"}, {"k", "5"}}, .body = {}};
    r = node.handle(search);
    REQUIRE(r.status == 200);
    const auto list = wire::decode<ResultList>(r.body);
    CHECK(list.k == 5);
    REQUIRE(list.hits.size() == 1);
    CHECK(list.hits[0].kind == ResourceKind::pdf);

    auto expect_error = [&](const Request& req, int status, const char* code) {
        const auto resp = node.handle(req);
        CHECK(resp.status == status);
        const auto body = wire::json::parse(resp.body);
        CHECK(body.size() == 1);
        CHECK(body["error"]["code"] == code);
        CHECK(body["error"].size() == 2);
    };
    expect_error({.method = "GET", .path = "/dris/search", .params = {}, .body = {}}, 400, "BAD_QUERY");
    expect_error({.method = "GET", .path = "/dris/search", .params = {{"q", "grid"}, {"k", "0"}}, .body = {}}, 400,
                 "BAD_QUERY");
    expect_error({.method = "GET", .path = "/dris/search", .params = {{"q", "grid"}, {"kind", "mp3"}}, .body = {}}, 400,
                 "BAD_QUERY");
    expect_error({.method = "GET", .path = "/dris/records", .params = {{"from", "2004-13-01T00:00:00Z"}}, .body = {}},
                 400, "BAD_DATESTAMP");
    expect_error({.method = "GET", .path = "/dris/records", .params = {{"token", "nope"}}, .body = {}}, 400,
                 "BAD_TOKEN");
    expect_error({.method = "GET", .path = "/dris/nowhere", .params = {}, .body = {}}, 404, "NOT_FOUND");
    expect_error({.method = "POST", .path = "/dris/ingest", .params = {}, .body = R"({"documents":[{"identifier":""}]})"},
                 400, "BAD_QUERY");
    expect_error({.method = "POST", .path = "/dris/register", .params = {},
                  .body = wire::encode(RegisterRequest{parse_domain("edu.cn"), "x",
                                                       CollectionDescription{.domain = parse_domain("edu.cn")}})},
                 409, "NOT_CHILD");

    r = node.handle({.method = "GET", .path = "/dris/records", .params = {{"format", "document"}}, .body = {}});
    REQUIRE(r.status == 200);
    CHECK(wire::decode<DocumentBatch>(r.body).documents.size() == 2);

    r = node.handle({.method = "GET", .path = "/dris/collection", .params = {}, .body = {}});
    CHECK(wire::decode<CollectionDescription>(r.body).doc_count == 2);
}

TEST_CASE("directory loader: one file per document") {
    namespace fs = std::filesystem;
    const auto root = fs::temp_directory_path() / "dris_loader_test";
    fs::remove_all(root);
    fs::create_directories(root / "sub");
    std::ofstream(root / "index.html") << "\n  Welcome page  \nbody text";
    std::ofstream(root / "sub" / "paper.PDF") << "A Paper Title\nabstract";
    std::ofstream(root / "notes.txt") << "plain";

    const auto docs = load_directory(root);
    fs::remove_all(root);
    REQUIRE(docs.size() == 3);
    CHECK(docs[0].identifier == "index.html");
    CHECK(docs[0].title == "Welcome page");
    CHECK(docs[0].kind == ResourceKind::webpage);
    CHECK(docs[1].identifier == "notes.txt");
    CHECK(docs[2].identifier == "sub/paper.PDF");
    CHECK(docs[2].kind == ResourceKind::pdf);
    CHECK_FALSE(docs[2].datestamp);
}
