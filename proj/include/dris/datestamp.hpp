#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace dris {

/// UTC instant at one-second granularity. Wire text "YYYY-MM-DDThh:mm:ssZ".
struct Datestamp {
    std::int64_t seconds = 0;  // since the Unix epoch

    static Datestamp epoch() { return {}; }

    friend auto operator<=>(const Datestamp&, const Datestamp&) = default;

    Datestamp operator+(std::int64_t delta) const { return {seconds + delta}; }
    std::int64_t operator-(const Datestamp& other) const { return seconds - other.seconds; }
};

/// Strict: exact layout, real calendar date, mandatory 'Z'. Throws Error(BAD_DATESTAMP).
Datestamp parse_datestamp(std::string_view text);
std::string format_datestamp(Datestamp ts);

/// Source of "now" for a node. Simulation injects ManualClock; serving uses SystemClock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual Datestamp now() const = 0;
};

class SystemClock final : public Clock {
public:
    Datestamp now() const override;
};

class ManualClock final : public Clock {
public:
    explicit ManualClock(Datestamp start = {}) : seconds_(start.seconds) {}

    Datestamp now() const override { return {seconds_.load()}; }
    void set(Datestamp ts) { seconds_.store(ts.seconds); }
    void advance(std::int64_t delta) { seconds_.fetch_add(delta); }

private:
    std::atomic<std::int64_t> seconds_;
};

}  // namespace dris
