#pragma once

#include "dris/datestamp.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace dris {

/// Keyed records ordered by (datestamp, sort key), with every upsert stamped by
/// a store revision. Superseded versions are retained for a while so that a
/// harvest pass can page through the store exactly as it was at one revision,
/// however many upserts land between its pages.
template <class T>
class VersionLog {
public:
    enum class Change { inserted, updated, unchanged };

    struct Page {
        std::vector<const T*> items;
        bool complete = true;
    };

    /// Identical (datestamp, value) re-submissions are `unchanged` and consume no revision.
    Change upsert(const std::string& key, std::string sort_key, Datestamp datestamp, T value, Datestamp now) {
        const auto cur = current_.find(key);
        if (cur != current_.end()) {
            Entry& old = versions_.at(cur->second);
            if (old.datestamp == datestamp && old.value == value) return Change::unchanged;
        }
        const std::uint64_t rev = ++revision_;
        Change change = Change::inserted;
        if (cur != current_.end()) {
            Entry& old = versions_.at(cur->second);
            old.superseded_by = rev;
            old.superseded_at = now;
            cur->second = rev;
            change = Change::updated;
        } else {
            current_.emplace(key, rev);
        }
        order_.emplace(datestamp.seconds, sort_key, rev);
        versions_.emplace(rev, Entry{std::move(value), datestamp, std::move(sort_key), 0, {}});
        return change;
    }

    const T* find(const std::string& key) const {
        const auto it = current_.find(key);
        return it == current_.end() ? nullptr : &versions_.at(it->second).value;
    }

    std::uint64_t revision() const noexcept { return revision_; }
    std::size_t size() const noexcept { return current_.size(); }
    std::size_t retained_versions() const noexcept { return versions_.size(); }

    /// Current values in (datestamp, sort key) order.
    template <class F>
    void for_each(F&& f) const {
        for (const auto& [ds, sk, rev] : order_) {
            const Entry& e = versions_.at(rev);
            if (e.superseded_by == 0) f(e.value);
        }
    }

    /// Items with from <= datestamp < until as they stood at `watermark`,
    /// skipping the first `offset` of them.
    Page page(Datestamp from, Datestamp until, std::uint64_t watermark, std::uint64_t offset,
              std::size_t batch) const {
        Page out;
        std::uint64_t skipped = 0;
        for (auto it = order_.lower_bound({from.seconds, std::string{}, 0}); it != order_.end(); ++it) {
            if (std::get<0>(*it) >= until.seconds) break;
            const Entry& e = versions_.at(std::get<2>(*it));
            const bool visible = std::get<2>(*it) <= watermark && (e.superseded_by == 0 || e.superseded_by > watermark);
            if (!visible) continue;
            if (skipped < offset) {
                ++skipped;
                continue;
            }
            if (out.items.size() == batch) {
                out.complete = false;
                break;
            }
            out.items.push_back(&e.value);
        }
        return out;
    }

    /// Drops superseded versions replaced before `cutoff`.
    void prune(Datestamp cutoff) {
        for (auto it = versions_.begin(); it != versions_.end();) {
            const Entry& e = it->second;
            if (e.superseded_by != 0 && e.superseded_at < cutoff) {
                order_.erase({e.datestamp.seconds, e.sort_key, it->first});
                it = versions_.erase(it);
            } else {
                ++it;
            }
        }
    }

    void clear() {
        versions_.clear();
        order_.clear();
        current_.clear();
        revision_ = 0;
    }

private:
    struct Entry {
        T value;
        Datestamp datestamp;
        std::string sort_key;
        std::uint64_t superseded_by = 0;
        Datestamp superseded_at;
    };

    std::map<std::uint64_t, Entry> versions_;
    std::set<std::tuple<std::int64_t, std::string, std::uint64_t>> order_;
    std::unordered_map<std::string, std::uint64_t> current_;
    std::uint64_t revision_ = 0;
};

}  // namespace dris
