#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctmine::stats {

// --- word error rate ------------------------------------------------------

// Word-level Levenshtein distance (unit substitution/insertion/deletion).
std::size_t word_edit_distance(std::span<const std::string> reference,
                               std::span<const std::string> hypothesis);

// Edit distance divided by |reference|. Throws std::domain_error on an
// empty reference.
double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis);

// Lowercases, strips punctuation, splits on whitespace.
std::vector<std::string> wer_tokenize(std::string_view text);

double wer_text(std::string_view reference, std::string_view hypothesis);

// --- Cohen's kappa --------------------------------------------------------

// 2x2 agreement table, counts[a][b] = items rater A called a and rater B
// called b.
struct ConfusionTable {
    std::array<std::array<std::int64_t, 2>, 2> counts{};

    std::int64_t total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }
};

// Chance-corrected agreement. Throws std::domain_error when total == 0 or
// the margins are degenerate (expected agreement = 1).
double cohen_kappa(const ConfusionTable& t);

// --- Mann-Whitney U -------------------------------------------------------

struct MannWhitneyResult {
    double u = 0.0;  // U statistic of the first sample
    double p = 0.0;  // two-sided
    bool exact = false;
};

// Two-sided test. Midrank tie handling. The exact null distribution
// (conditional on the observed values) is enumerated when
// min(|a|,|b|) < 8 and |a|+|b| <= 200; otherwise the normal approximation
// with tie-corrected variance and continuity correction is used.
// Both samples identical in value everywhere -> p = 1 by convention.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// --- chi-square -----------------------------------------------------------

struct ChiSquareResult {
    double statistic = 0.0;
    double p = 0.0;
    double df = 0.0;
};

// Pearson independence test on a 2x2 table, df = 1, no Yates correction by
// default. Throws std::domain_error when a margin is zero.
ChiSquareResult chi_square(const std::array<std::array<std::int64_t, 2>, 2>& table,
                           bool yates = false);

// Goodness-of-fit against given expected counts (all > 0), df = bins - 1.
ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> expected);

// Survival function of the chi-square distribution (regularized upper
// incomplete gamma).
double chi_square_sf(double x, double df);

// Standard normal CDF.
double normal_cdf(double z);

// --- quantiles ------------------------------------------------------------

// Nearest-rank quantile: value at rank ceil(q * n) of the sorted sample,
// q in (0, 1]. Throws std::domain_error on an empty sample.
double quantile_nearest_rank(std::vector<double> values, double q);

double median(std::vector<double> values);

}  // namespace ctmine::stats
