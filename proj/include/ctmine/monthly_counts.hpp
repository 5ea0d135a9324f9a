#pragma once

#include <cstdint>

#include "ctmine/time_util.hpp"

namespace ctmine {

// Per-calendar-month sampling tallies: K draws, N distinct ids among those
// draws, N1 ids drawn exactly once. Always K >= N >= N1 >= 0.
struct MonthlyCounts {
    YearMonth month;
    std::int64_t draws = 0;       // K
    std::int64_t uniques = 0;     // N
    std::int64_t singletons = 0;  // N1
};

}  // namespace ctmine
