#pragma once

#include <cstdint>
#include <string>

namespace ctmine {

// Civil (proleptic Gregorian) date in UTC.
struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31
};

struct CivilTime {
    CivilDate date;
    int hour = 0;    // 0..23
    int minute = 0;  // 0..59
    int second = 0;  // 0..59
};

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d);

CivilDate civil_from_days(std::int64_t z);

CivilTime civil_from_epoch(std::int64_t epoch_seconds);

std::int64_t epoch_from_civil(const CivilTime& t);

// 0 = Monday .. 6 = Sunday.
int weekday_from_days(std::int64_t days);

// "YYYY-MM-DD"
std::string format_date(const CivilDate& d);

// UTC calendar month key, totally ordered.
struct YearMonth {
    int year = 0;
    int month = 0;  // 1..12

    auto operator<=>(const YearMonth&) const = default;
};

YearMonth year_month_of(std::int64_t epoch_seconds);

// "YYYY-MM"
std::string format_year_month(const YearMonth& ym);

// Parses "YYYY-MM"; throws std::invalid_argument on bad input.
YearMonth parse_year_month(const std::string& s);

}  // namespace ctmine
