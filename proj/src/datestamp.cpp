#include "dris/datestamp.hpp"

#include "dris/error.hpp"

#include <chrono>
#include <cstdio>

namespace dris {

namespace {

[[noreturn]] void bad(std::string_view text) {
    throw Error(ErrorCode::bad_datestamp, "invalid datestamp '" + std::string(text) + "'");
}

int digits(std::string_view text, std::size_t pos, std::size_t count) {
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') bad(text);
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

Datestamp parse_datestamp(std::string_view text) {
    // 0123456789012345678 9
    // YYYY-MM-DDThh:mm:ss Z
    if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
        bad(text);
    }
    const int year = digits(text, 0, 4);
    const int month = digits(text, 5, 2);
    const int day = digits(text, 8, 2);
    const int hour = digits(text, 11, 2);
    const int minute = digits(text, 14, 2);
    const int second = digits(text, 17, 2);

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                             std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) bad(text);

    const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
    return {static_cast<std::int64_t>(days_since_epoch) * 86400 + hour * 3600 + minute * 60 + second};
}

std::string format_datestamp(Datestamp ts) {
    using namespace std::chrono;
    const sys_seconds tp{seconds{ts.seconds}};
    const auto day_point = floor<days>(tp);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{tp - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

Datestamp SystemClock::now() const {
    using namespace std::chrono;
    return {duration_cast<seconds>(system_clock::now().time_since_epoch()).count()};
}

}  // namespace dris
