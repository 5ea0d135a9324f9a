#include "ctmine/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ctmine::stats {

// --- WER --------------------------------------------------------------------

std::size_t word_edit_distance(std::span<const std::string> reference,
                               std::span<const std::string> hypothesis) {
    const std::size_t n = reference.size();
    const std::size_t m = hypothesis.size();
    std::vector<std::size_t> prev(m + 1), cur(m + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
    if (reference.empty()) throw std::domain_error("wer: empty reference");
    return static_cast<double>(word_edit_distance(reference, hypothesis)) /
           static_cast<double>(reference.size());
}

std::vector<std::string> wer_tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!cur.empty()) {
                tokens.push_back(std::move(cur));
                cur.clear();
            }
        } else if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        }
        // punctuation dropped
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

double wer_text(std::string_view reference, std::string_view hypothesis) {
    const auto ref = wer_tokenize(reference);
    const auto hyp = wer_tokenize(hypothesis);
    return wer(ref, hyp);
}

// --- Cohen's kappa -----------------------------------------------------------

double cohen_kappa(const ConfusionTable& t) {
    const double total = static_cast<double>(t.total());
    if (total <= 0) throw std::domain_error("cohen_kappa: empty table");

    const double a = static_cast<double>(t.counts[0][0]);
    const double b = static_cast<double>(t.counts[0][1]);
    const double c = static_cast<double>(t.counts[1][0]);
    const double d = static_cast<double>(t.counts[1][1]);

    const double po = (a + d) / total;
    const double pe = ((a + b) / total) * ((a + c) / total) +
                      ((c + d) / total) * ((b + d) / total);
    if (pe >= 1.0) throw std::domain_error("cohen_kappa: degenerate margins");
    return (po - pe) / (1.0 - pe);
}

// --- Mann-Whitney U ----------------------------------------------------------

namespace {

// Midranks of the pooled sample, doubled so they stay integral under ties.
// Returns doubled ranks aligned with the sorted pooled values, plus the tie
// group sizes.
void doubled_midranks(const std::vector<double>& sorted_pool,
                      std::vector<std::int64_t>& ranks2,
                      std::vector<std::int64_t>& tie_sizes) {
    const std::size_t n = sorted_pool.size();
    ranks2.assign(n, 0);
    tie_sizes.clear();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && sorted_pool[j] == sorted_pool[i]) ++j;
        // midrank of positions i..j-1 (1-based) = (i+1 + j) / 2; doubled = i+1+j
        const std::int64_t r2 = static_cast<std::int64_t>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k) ranks2[k] = r2;
        tie_sizes.push_back(static_cast<std::int64_t>(j - i));
        i = j;
    }
}

// Exact two-sided p conditional on the observed ranks: the fraction of
// n1-subsets of the pooled ranks whose U deviates from n1*n2/2 at least as
// much as observed. Subset counts fit in doubles (< 2^53 for N <= 200).
double exact_two_sided_p(const std::vector<std::int64_t>& ranks2, std::size_t n1,
                         double u_obs) {
    const std::size_t n = ranks2.size();
    const std::int64_t s_max = std::accumulate(ranks2.begin(), ranks2.end(), std::int64_t{0});

    // ways[k][s] = number of k-subsets with doubled-rank sum s
    std::vector<std::vector<double>> ways(n1 + 1,
                                          std::vector<double>(static_cast<std::size_t>(s_max) + 1, 0.0));
    ways[0][0] = 1.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::int64_t r = ranks2[idx];
        const std::size_t kmax = std::min(n1, idx + 1);
        for (std::size_t k = kmax; k >= 1; --k) {
            auto& dst = ways[k];
            const auto& src = ways[k - 1];
            for (std::int64_t s = s_max; s >= r; --s) {
                const double add = src[static_cast<std::size_t>(s - r)];
                if (add != 0.0) dst[static_cast<std::size_t>(s)] += add;
            }
        }
    }

    const std::size_t n2 = n - n1;
    const double nm = static_cast<double>(n1) * static_cast<double>(n2);
    // dev doubled: |2U - n1*n2| where U = s/2 - n1(n1+1)/2
    const double offset = static_cast<double>(n1) * static_cast<double>(n1 + 1);
    const double dev_obs = std::abs(2.0 * u_obs - nm);

    double total = 0.0, extreme = 0.0;
    for (std::int64_t s = 0; s <= s_max; ++s) {
        const double w = ways[n1][static_cast<std::size_t>(s)];
        if (w == 0.0) continue;
        total += w;
        const double dev = std::abs(static_cast<double>(s) - offset - nm);
        if (dev >= dev_obs - 1e-9) extreme += w;
    }
    return extreme / total;
}

}  // namespace

MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::domain_error("mann_whitney_u: empty sample");

    const std::size_t n1 = a.size();
    const std::size_t n2 = b.size();
    const std::size_t n = n1 + n2;

    struct Tagged {
        double value;
        bool from_a;
    };
    std::vector<Tagged> pool;
    pool.reserve(n);
    for (double v : a) pool.push_back({v, true});
    for (double v : b) pool.push_back({v, false});
    std::sort(pool.begin(), pool.end(),
              [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

    std::vector<double> sorted_values(n);
    for (std::size_t i = 0; i < n; ++i) sorted_values[i] = pool[i].value;

    std::vector<std::int64_t> ranks2, tie_sizes;
    doubled_midranks(sorted_values, ranks2, tie_sizes);

    std::int64_t rank2_sum_a = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (pool[i].from_a) rank2_sum_a += ranks2[i];

    const double r1 = static_cast<double>(rank2_sum_a) / 2.0;
    const double u = r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;
    const double nm = static_cast<double>(n1) * static_cast<double>(n2);

    MannWhitneyResult res;
    res.u = u;

    if (tie_sizes.size() == 1) {
        // every pooled value identical
        res.p = 1.0;
        res.exact = false;
        return res;
    }

    if (std::min(n1, n2) < 8 && n <= 200) {
        res.exact = true;
        res.p = exact_two_sided_p(ranks2, n1, u);
        return res;
    }

    double tie_term = 0.0;
    for (std::int64_t t : tie_sizes) {
        const double td = static_cast<double>(t);
        tie_term += td * td * td - td;
    }
    const double nd = static_cast<double>(n);
    const double var = nm / 12.0 * ((nd + 1.0) - tie_term / (nd * (nd - 1.0)));
    if (var <= 0.0) {
        res.p = 1.0;
        return res;
    }
    const double dev = std::max(0.0, std::abs(u - nm / 2.0) - 0.5);  // continuity correction
    const double z = dev / std::sqrt(var);
    res.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return res;
}

// --- chi-square ---------------------------------------------------------------

namespace {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) via the usual
// series / continued-fraction split.
double gamma_p_series(double a, double x) {
    double sum = 1.0 / a;
    double term = sum;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double chi_square_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    const double a = df / 2.0;
    const double half_x = x / 2.0;
    if (half_x < a + 1.0) return 1.0 - gamma_p_series(a, half_x);
    return gamma_q_contfrac(a, half_x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

ChiSquareResult chi_square(const std::array<std::array<std::int64_t, 2>, 2>& table, bool yates) {
    const double o00 = static_cast<double>(table[0][0]);
    const double o01 = static_cast<double>(table[0][1]);
    const double o10 = static_cast<double>(table[1][0]);
    const double o11 = static_cast<double>(table[1][1]);
    const double r0 = o00 + o01, r1 = o10 + o11;
    const double c0 = o00 + o10, c1 = o01 + o11;
    const double total = r0 + r1;
    if (r0 <= 0 || r1 <= 0 || c0 <= 0 || c1 <= 0)
        throw std::domain_error("chi_square: zero margin");

    double stat = 0.0;
    const double obs[2][2] = {{o00, o01}, {o10, o11}};
    const double rows[2] = {r0, r1};
    const double cols[2] = {c0, c1};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double e = rows[i] * cols[j] / total;
            double d = std::abs(obs[i][j] - e);
            if (yates) d = std::max(0.0, d - 0.5);
            stat += d * d / e;
        }
    }
    return ChiSquareResult{stat, chi_square_sf(stat, 1.0), 1.0};
}

ChiSquareResult chi_square_gof(std::span<const std::int64_t> observed,
                               std::span<const double> expected) {
    if (observed.size() != expected.size() || observed.size() < 2)
        throw std::domain_error("chi_square_gof: bad shapes");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) throw std::domain_error("chi_square_gof: nonpositive expected");
        const double d = static_cast<double>(observed[i]) - expected[i];
        stat += d * d / expected[i];
    }
    const double df = static_cast<double>(observed.size() - 1);
    return ChiSquareResult{stat, chi_square_sf(stat, df), df};
}

// --- quantiles ----------------------------------------------------------------

double quantile_nearest_rank(std::vector<double> values, double q) {
    if (values.empty()) throw std::domain_error("quantile: empty sample");
    if (q <= 0.0 || q > 1.0) throw std::domain_error("quantile: q out of range");
    std::sort(values.begin(), values.end());
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::domain_error("median: empty sample");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace ctmine::stats
