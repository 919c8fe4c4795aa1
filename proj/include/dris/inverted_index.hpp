#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace dris {

/// Okapi BM25 with a non-negative idf and fixed k1 = 1.2, b = 0.75.
struct Bm25 {
    static constexpr double k1 = 1.2;
    static constexpr double b = 0.75;

    /// ln(1 + (N - df + 0.5) / (df + 0.5))
    static double idf(std::uint64_t doc_count, std::uint64_t df);
    static double term_weight(std::uint32_t tf, std::uint32_t doc_length, double avg_length);
};

/// Term -> (document, tf) postings over string-keyed documents, with the
/// statistics BM25 needs. Replacing a document removes all of its old postings.
class InvertedIndex {
public:
    struct Scored {
        std::string_view key;  // valid until the next mutation
        double score;
    };

    void upsert(std::string_view key, const std::vector<std::string>& tokens);
    bool erase(std::string_view key);
    void clear();

    std::size_t doc_count() const noexcept { return by_key_.size(); }
    std::uint64_t total_length() const noexcept { return total_length_; }
    double average_length() const noexcept;
    std::size_t df(std::string_view term) const;
    std::size_t vocabulary_size() const noexcept { return postings_.size(); }

    /// Every document containing at least one query term, scored over the
    /// distinct query terms. Order is unspecified.
    std::vector<Scored> score(const std::vector<std::string>& query_tokens) const;

    /// Up to `limit` terms by (df desc, term asc).
    std::vector<std::pair<std::string, std::uint64_t>> top_terms(std::size_t limit) const;

private:
    struct Posting {
        std::uint32_t slot;
        std::uint32_t tf;
    };
    struct Slot {
        std::string key;
        std::uint32_t length = 0;
        std::vector<std::string> terms;  // distinct
    };

    std::vector<Slot> slots_;
    std::vector<std::uint32_t> free_slots_;
    std::unordered_map<std::string, std::uint32_t> by_key_;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::uint64_t total_length_ = 0;
};

}  // namespace dris
