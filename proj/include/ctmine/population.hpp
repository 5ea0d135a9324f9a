#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ctmine/monthly_counts.hpp"

namespace ctmine::popest {

struct EstimateError : std::runtime_error {
    enum class Kind { Undefined, EmptyMonth, Diverges };
    Kind kind;
    EstimateError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

// Coverage-based population size: M = N / (1 - N1/K).
// Throws EstimateError{EmptyMonth} when K == 0 and {Undefined} when N1 == K
// (no duplicate evidence).
double good_turing(const MonthlyCounts& c);

struct FixedPointResult {
    double estimate = 0.0;
    bool converged = false;
    int iterations = 0;
};

// Iterates M <- N / (1 - exp(-K/M)) from m0. Converged when the relative
// step drops below rel_tol before the iteration cap; otherwise the last
// iterate is returned with converged = false.
// Throws EstimateError{Diverges} when N == K (the fixed point escapes to
// infinity) and {EmptyMonth} when K == 0.
FixedPointResult mle_fixed_point(const MonthlyCounts& c, int iterations = 1000,
                                 double m0 = 10.0, double rel_tol = 1e-9);

enum class PrevalenceDenominator { Draws, Uniques };

struct MonthlyPositives {
    std::int64_t positive_draws = 0;
    std::int64_t positive_uniques = 0;
};

struct EstimateResult {
    YearMonth month;
    MonthlyCounts counts;
    std::optional<double> population_gt;       // Good-Turing estimate
    std::optional<double> population_mle;      // fixed-point estimate
    std::optional<double> relative_gap;        // |gt - mle| / gt
    bool mle_converged = false;
    double prevalence = 0.0;                   // positives / denominator
    std::optional<double> estimated_positive_volume;  // gt * prevalence
    std::string error;                         // nonempty when estimators failed
};

// Runs both estimators per month and scales prevalence to volume. Months
// that fail an estimator precondition carry `error` and have empty optionals
// instead of aborting the series.
std::vector<EstimateResult> monthly_series(
    const std::map<YearMonth, MonthlyCounts>& months,
    const std::map<YearMonth, MonthlyPositives>& positives,
    PrevalenceDenominator denom = PrevalenceDenominator::Draws,
    int mle_iterations = 1000, double mle_m0 = 10.0);

// CSV with one row per month (the data behind the estimate plots).
void write_series_csv(const std::vector<EstimateResult>& series, const std::string& path);

}  // namespace ctmine::popest
