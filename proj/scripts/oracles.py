#!/usr/bin/env python3
"""Independent oracles for frozen test fixtures.

Prints tests/fixtures.hpp. Nothing here shares code with the C++ library:
BM25 is recomputed by direct loops, the datestamp by the Python calendar
module, and result merging from its written rules.
"""
import calendar
import math
import re

DOCS = [
    ("f00", "Grid search", "grid computing schedules search jobs across a grid"),
    ("f01", "Metadata harvest", "harvesting metadata records from repositories with resumption tokens"),
    ("f02", "Union catalog", "a union catalog merges metadata from many library catalogs"),
    ("f03", "Inverted index", "an inverted index maps each term to postings of documents"),
    ("f04", "BM25 ranking", "ranking documents by term frequency and inverse document frequency"),
    ("f05", "Web crawling", "crawlers download web pages over and over again"),
    ("f06", "Domain names", "domain names form a hierarchy of labels under a root"),
    ("f07", "Federated search", "federated search sends one query to many collections and merges results"),
    ("f08", "Collection selection", "collection selection ranks collections by term statistics"),
    ("f09", "Result merging", "result merging normalizes scores from each collection"),
    ("f10", "Digital library", "the digital library integrates journals databases and web search"),
    ("f11", "Grid grid", "grid grid grid a document that repeats grid many times grid"),
    ("f12", "Video archive", "video and picture archives expose metadata for search"),
    ("f13", "PDF reports", "pdf reports are indexed by title and abstract"),
    ("f14", "FTP mirror", "an ftp mirror lists files and directories"),
    ("f15", "Search engine coverage", "no search engine covers the whole web and updates take a month"),
    ("f16", "Traffic load", "repeated crawling increases the traffic load of the internet"),
    ("f17", "University network", "a university network hosts web servers and library resources"),
    ("f18", "Country layer", "the country layer directs queries to sub internet nodes"),
    ("f19", "Short", "search"),
]

QUERIES = ["grid search", "metadata harvest", "web", "collection merging scores", "library web search"]

K1, B = 1.2, 0.75


def tokens(text):
    return [t for t in re.split(r"[^0-9a-z]+", text.lower()) if t]


def bm25_all():
    docs = {i: tokens(t + " " + b) for i, t, b in DOCS}
    n = len(docs)
    avg = sum(len(v) for v in docs.values()) / n
    out = {}
    for q in QUERIES:
        terms = sorted(set(tokens(q)))
        scores = {}
        for doc_id, toks in docs.items():
            s = 0.0
            matched = False
            for t in terms:
                tf = toks.count(t)
                if tf == 0:
                    continue
                matched = True
                df = sum(1 for v in docs.values() if t in v)
                idf = math.log(1 + (n - df + 0.5) / (df + 0.5))
                s += idf * tf * (K1 + 1) / (tf + K1 * (1 - B + B * len(toks) / avg))
            if matched:
                scores[doc_id] = s
        ranked = sorted(scores.items(), key=lambda kv: (-kv[1], kv[0]))
        out[q] = ranked
    return out


def df_all():
    docs = {i: set(tokens(t + " " + b)) for i, t, b in DOCS}
    df = {}
    for v in docs.values():
        for t in v:
            df[t] = df.get(t, 0) + 1
    return df


# Merge fixture: child lists of (source, id, score).
MERGE_CHILDREN = [
    ("edu.cn", [("u1.edu.cn", "a", 7.5), ("u2.edu.cn", "b", 5.0), ("u1.edu.cn", "c", 2.5), ("u2.edu.cn", "d", 0.5)]),
    ("com.cn", [("c1.com.cn", "x", 3.0), ("c1.com.cn", "y", 3.0), ("c2.com.cn", "z", 1.0), ("u2.edu.cn", "b", 2.0)]),
    ("org.cn", [("o1.org.cn", "p", 9.0)]),
]
MERGE_K = 6


def merge():
    best = {}
    for _, hits in MERGE_CHILDREN:
        lo = min(h[2] for h in hits)
        hi = max(h[2] for h in hits)
        for src, ident, s in hits:
            norm = 1.0 if hi == lo else (s - lo) / (hi - lo)
            key = (src, ident)
            if key not in best or norm > best[key][0]:
                best[key] = (norm, s)
    ranked = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[0][0], kv[0][1]))
    return ranked[:MERGE_K]


def cpp_str(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def main():
    print("#pragma once")
    print("// Generated by scripts/oracles.py; do not edit by hand.")
    print()
    print("#include <cstdint>")
    print("#include <string_view>")
    print("#include <vector>")
    print()
    print("namespace fixtures {")
    print()
    print("inline constexpr std::int64_t march_2004_epoch = %d;" % calendar.timegm((2004, 3, 1, 0, 0, 0)))
    print()
    print("struct FixtureDoc { std::string_view id, title, body; };")
    print("inline const std::vector<FixtureDoc> bm25_docs = {")
    for i, t, b in DOCS:
        print("    {%s, %s, %s}," % (cpp_str(i), cpp_str(t), cpp_str(b)))
    print("};")
    print()
    print("struct ExpectedHit { std::string_view id; double score; };")
    print("struct ExpectedQuery { std::string_view query; std::vector<ExpectedHit> hits; };")
    print("inline const std::vector<ExpectedQuery> bm25_expected = {")
    for q, ranked in bm25_all().items():
        hits = ", ".join("{%s, %.17g}" % (cpp_str(i), s) for i, s in ranked)
        print("    {%s, {%s}}," % (cpp_str(q), hits))
    print("};")
    print()
    df = df_all()
    print("struct ExpectedDf { std::string_view term; std::uint64_t df; };")
    print("inline const std::vector<ExpectedDf> fixture_df = {")
    for t in sorted(df):
        print("    {%s, %d}," % (cpp_str(t), df[t]))
    print("};")
    print()
    print("struct MergeInput { std::string_view source, id; double score; };")
    print("struct MergeChild { std::string_view domain; std::vector<MergeInput> hits; };")
    print("inline const std::vector<MergeChild> merge_children = {")
    for dom, hits in MERGE_CHILDREN:
        body = ", ".join("{%s, %s, %.17g}" % (cpp_str(s), cpp_str(i), v) for s, i, v in hits)
        print("    {%s, {%s}}," % (cpp_str(dom), body))
    print("};")
    print("inline constexpr std::size_t merge_k = %d;" % MERGE_K)
    print("struct MergedExpected { std::string_view source, id; double normalized, raw; };")
    print("inline const std::vector<MergedExpected> merge_expected = {")
    for (src, ident), (norm, raw) in merge():
        print("    {%s, %s, %.17g, %.17g}," % (cpp_str(src), cpp_str(ident), norm, raw))
    print("};")
    print()
    print("}  // namespace fixtures")


if __name__ == "__main__":
    main()
