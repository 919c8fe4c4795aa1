#pragma once
// Generated by scripts/oracles.py; do not edit by hand.

#include <cstdint>
#include <string_view>
#include <vector>

namespace fixtures {

inline constexpr std::int64_t march_2004_epoch = 1078099200;

struct FixtureDoc { std::string_view id, title, body; };
inline const std::vector<FixtureDoc> bm25_docs = {
    {"f00", "Grid search", "grid computing schedules search jobs across a grid"},
    {"f01", "Metadata harvest", "harvesting metadata records from repositories with resumption tokens"},
    {"f02", "Union catalog", "a union catalog merges metadata from many library catalogs"},
    {"f03", "Inverted index", "an inverted index maps each term to postings of documents"},
    {"f04", "BM25 ranking", "ranking documents by term frequency and inverse document frequency"},
    {"f05", "Web crawling", "crawlers download web pages over and over again"},
    {"f06", "Domain names", "domain names form a hierarchy of labels under a root"},
    {"f07", "Federated search", "federated search sends one query to many collections and merges results"},
    {"f08", "Collection selection", "collection selection ranks collections by term statistics"},
    {"f09", "Result merging", "result merging normalizes scores from each collection"},
    {"f10", "Digital library", "the digital library integrates journals databases and web search"},
    {"f11", "Grid grid", "grid grid grid a document that repeats grid many times grid"},
    {"f12", "Video archive", "video and picture archives expose metadata for search"},
    {"f13", "PDF reports", "pdf reports are indexed by title and abstract"},
    {"f14", "FTP mirror", "an ftp mirror lists files and directories"},
    {"f15", "Search engine coverage", "no search engine covers the whole web and updates take a month"},
    {"f16", "Traffic load", "repeated crawling increases the traffic load of the internet"},
    {"f17", "University network", "a university network hosts web servers and library resources"},
    {"f18", "Country layer", "the country layer directs queries to sub internet nodes"},
    {"f19", "Short", "search"},
};

struct ExpectedHit { std::string_view id; double score; };
struct ExpectedQuery { std::string_view query; std::vector<ExpectedHit> hits; };
inline const std::vector<ExpectedQuery> bm25_expected = {
    {"grid search", {{"f00", 5.0132214577220244}, {"f11", 3.8951337502640255}, {"f19", 1.7533875744326417}, {"f07", 1.5112880348666284}, {"f15", 1.4390352204506942}, {"f12", 1.1960193388514047}, {"f10", 1.1503115934175929}}},
    {"metadata harvest", {{"f01", 5.1886016766349252}, {"f12", 1.8273573394776192}, {"f02", 1.7575220271408947}}},
    {"web", {{"f05", 2.1468645819534928}, {"f10", 1.5110097853876492}, {"f17", 1.5110097853876492}, {"f15", 1.3106548967174638}}},
    {"collection merging scores", {{"f09", 8.8437927924570303}, {"f08", 3.0488156530305797}}},
    {"library web search", {{"f10", 5.0924311432204004}, {"f17", 3.2685318125285439}, {"f15", 2.749690117168158}, {"f05", 2.1468645819534928}, {"f02", 1.7575220271408947}, {"f19", 1.7533875744326417}, {"f00", 1.6343793680231864}, {"f07", 1.5112880348666284}, {"f12", 1.1960193388514047}}},
};

struct ExpectedDf { std::string_view term; std::uint64_t df; };
inline const std::vector<ExpectedDf> fixture_df = {
    {"a", 6},
    {"abstract", 1},
    {"across", 1},
    {"again", 1},
    {"an", 2},
    {"and", 9},
    {"archive", 1},
    {"archives", 1},
    {"are", 1},
    {"bm25", 1},
    {"by", 3},
    {"catalog", 1},
    {"catalogs", 1},
    {"collection", 2},
    {"collections", 2},
    {"computing", 1},
    {"country", 1},
    {"coverage", 1},
    {"covers", 1},
    {"crawlers", 1},
    {"crawling", 2},
    {"databases", 1},
    {"digital", 1},
    {"directories", 1},
    {"directs", 1},
    {"document", 2},
    {"documents", 2},
    {"domain", 1},
    {"download", 1},
    {"each", 2},
    {"engine", 1},
    {"expose", 1},
    {"federated", 1},
    {"files", 1},
    {"for", 1},
    {"form", 1},
    {"frequency", 1},
    {"from", 3},
    {"ftp", 1},
    {"grid", 2},
    {"harvest", 1},
    {"harvesting", 1},
    {"hierarchy", 1},
    {"hosts", 1},
    {"increases", 1},
    {"index", 1},
    {"indexed", 1},
    {"integrates", 1},
    {"internet", 2},
    {"inverse", 1},
    {"inverted", 1},
    {"jobs", 1},
    {"journals", 1},
    {"labels", 1},
    {"layer", 1},
    {"library", 3},
    {"lists", 1},
    {"load", 1},
    {"many", 3},
    {"maps", 1},
    {"merges", 2},
    {"merging", 1},
    {"metadata", 3},
    {"mirror", 1},
    {"month", 1},
    {"names", 1},
    {"network", 1},
    {"no", 1},
    {"nodes", 1},
    {"normalizes", 1},
    {"of", 3},
    {"one", 1},
    {"over", 1},
    {"pages", 1},
    {"pdf", 1},
    {"picture", 1},
    {"postings", 1},
    {"queries", 1},
    {"query", 1},
    {"ranking", 1},
    {"ranks", 1},
    {"records", 1},
    {"repeated", 1},
    {"repeats", 1},
    {"reports", 1},
    {"repositories", 1},
    {"resources", 1},
    {"result", 1},
    {"results", 1},
    {"resumption", 1},
    {"root", 1},
    {"schedules", 1},
    {"scores", 1},
    {"search", 6},
    {"selection", 1},
    {"sends", 1},
    {"servers", 1},
    {"short", 1},
    {"statistics", 1},
    {"sub", 1},
    {"take", 1},
    {"term", 3},
    {"that", 1},
    {"the", 4},
    {"times", 1},
    {"title", 1},
    {"to", 3},
    {"tokens", 1},
    {"traffic", 1},
    {"under", 1},
    {"union", 1},
    {"university", 1},
    {"updates", 1},
    {"video", 1},
    {"web", 4},
    {"whole", 1},
    {"with", 1},
};

struct MergeInput { std::string_view source, id; double score; };
struct MergeChild { std::string_view domain; std::vector<MergeInput> hits; };
inline const std::vector<MergeChild> merge_children = {
    {"edu.cn", {{"u1.edu.cn", "a", 7.5}, {"u2.edu.cn", "b", 5}, {"u1.edu.cn", "c", 2.5}, {"u2.edu.cn", "d", 0.5}}},
    {"com.cn", {{"c1.com.cn", "x", 3}, {"c1.com.cn", "y", 3}, {"c2.com.cn", "z", 1}, {"u2.edu.cn", "b", 2}}},
    {"org.cn", {{"o1.org.cn", "p", 9}}},
};
inline constexpr std::size_t merge_k = 6;
struct MergedExpected { std::string_view source, id; double normalized, raw; };
inline const std::vector<MergedExpected> merge_expected = {
    {"c1.com.cn", "x", 1, 3},
    {"c1.com.cn", "y", 1, 3},
    {"o1.org.cn", "p", 1, 9},
    {"u1.edu.cn", "a", 1, 7.5},
    {"u2.edu.cn", "b", 0.6428571428571429, 5},
    {"u1.edu.cn", "c", 0.2857142857142857, 2.5},
};

}  // namespace fixtures
