#include "ctmine/time_util.hpp"

#include <cstdio>
#include <stdexcept>

namespace ctmine {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);              // [0, 399]
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;   // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;             // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

CivilTime civil_from_epoch(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    CivilTime t;
    t.date = civil_from_days(days);
    t.hour = static_cast<int>(rem / 3600);
    t.minute = static_cast<int>((rem % 3600) / 60);
    t.second = static_cast<int>(rem % 60);
    return t;
}

std::int64_t epoch_from_civil(const CivilTime& t) {
    return days_from_civil(t.date.year, t.date.month, t.date.day) * 86400 +
           t.hour * 3600 + t.minute * 60 + t.second;
}

int weekday_from_days(std::int64_t days) {
    // 1970-01-01 was a Thursday; shift so Monday = 0.
    std::int64_t w = (days + 3) % 7;
    if (w < 0) w += 7;
    return static_cast<int>(w);
}

std::string format_date(const CivilDate& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

YearMonth year_month_of(std::int64_t epoch_seconds) {
    const CivilTime t = civil_from_epoch(epoch_seconds);
    return YearMonth{t.date.year, t.date.month};
}

std::string format_year_month(const YearMonth& ym) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", ym.year, ym.month);
    return buf;
}

YearMonth parse_year_month(const std::string& s) {
    int y = 0, m = 0;
    if (std::sscanf(s.c_str(), "%d-%d", &y, &m) != 2 || m < 1 || m > 12)
        throw std::invalid_argument("bad year-month: " + s);
    return YearMonth{y, m};
}

}  // namespace ctmine
