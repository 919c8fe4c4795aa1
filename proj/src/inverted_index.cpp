#include "dris/inverted_index.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dris {

double Bm25::idf(std::uint64_t doc_count, std::uint64_t df) {
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

double Bm25::term_weight(std::uint32_t tf, std::uint32_t doc_length, double avg_length) {
    const double f = tf;
    const double norm = avg_length > 0.0 ? static_cast<double>(doc_length) / avg_length : 0.0;
    return f * (k1 + 1.0) / (f + k1 * (1.0 - b + b * norm));
}

void InvertedIndex::upsert(std::string_view key, const std::vector<std::string>& tokens) {
    erase(key);

    std::map<std::string_view, std::uint32_t> counts;
    for (const auto& t : tokens) ++counts[t];

    std::uint32_t slot;
    if (!free_slots_.empty()) {
        slot = free_slots_.back();
        free_slots_.pop_back();
    } else {
        slot = static_cast<std::uint32_t>(slots_.size());
        slots_.emplace_back();
    }
    Slot& s = slots_[slot];
    s.key = std::string(key);
    s.length = static_cast<std::uint32_t>(tokens.size());
    s.terms.clear();
    s.terms.reserve(counts.size());
    for (const auto& [term, tf] : counts) {
        s.terms.emplace_back(term);
        postings_[std::string(term)].push_back({slot, tf});
    }
    total_length_ += s.length;
    by_key_.emplace(s.key, slot);
}

bool InvertedIndex::erase(std::string_view key) {
    const auto it = by_key_.find(std::string(key));
    if (it == by_key_.end()) return false;
    const std::uint32_t slot = it->second;
    Slot& s = slots_[slot];
    for (const auto& term : s.terms) {
        auto p = postings_.find(term);
        auto& list = p->second;
        auto pos = std::find_if(list.begin(), list.end(), [slot](const Posting& x) { return x.slot == slot; });
        *pos = list.back();
        list.pop_back();
        if (list.empty()) postings_.erase(p);
    }
    total_length_ -= s.length;
    s = Slot{};
    by_key_.erase(it);
    free_slots_.push_back(slot);
    return true;
}

void InvertedIndex::clear() {
    *this = InvertedIndex{};
}

double InvertedIndex::average_length() const noexcept {
    return by_key_.empty() ? 0.0 : static_cast<double>(total_length_) / static_cast<double>(by_key_.size());
}

std::size_t InvertedIndex::df(std::string_view term) const {
    const auto it = postings_.find(std::string(term));
    return it == postings_.end() ? 0 : it->second.size();
}

std::vector<InvertedIndex::Scored> InvertedIndex::score(const std::vector<std::string>& query_tokens) const {
    std::vector<std::string_view> terms(query_tokens.begin(), query_tokens.end());
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

    const double avg = average_length();
    std::unordered_map<std::uint32_t, double> acc;
    for (const auto term : terms) {
        const auto it = postings_.find(std::string(term));
        if (it == postings_.end()) continue;
        const double idf = Bm25::idf(doc_count(), it->second.size());
        for (const auto& p : it->second) {
            acc[p.slot] += idf * Bm25::term_weight(p.tf, slots_[p.slot].length, avg);
        }
    }

    std::vector<Scored> out;
    out.reserve(acc.size());
    for (const auto& [slot, score] : acc) out.push_back({slots_[slot].key, score});
    return out;
}

std::vector<std::pair<std::string, std::uint64_t>> InvertedIndex::top_terms(std::size_t limit) const {
    std::vector<std::pair<std::string, std::uint64_t>> all;
    all.reserve(postings_.size());
    for (const auto& [term, list] : postings_) all.emplace_back(term, list.size());
    const auto by_df = [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    };
    if (all.size() > limit) {
        std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(limit), all.end(), by_df);
        all.resize(limit);
    } else {
        std::sort(all.begin(), all.end(), by_df);
    }
    return all;
}

}  // namespace dris
