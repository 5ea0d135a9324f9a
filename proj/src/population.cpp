#include "ctmine/population.hpp"

#include <cmath>
#include <cstdio>

#include "ctmine/csv.hpp"

namespace ctmine::popest {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

double good_turing(const MonthlyCounts& c) {
    if (c.draws <= 0) throw EstimateError(EstimateError::Kind::EmptyMonth, "good_turing: K = 0");
    if (c.singletons >= c.draws)
        throw EstimateError(EstimateError::Kind::Undefined,
                            "good_turing: N1 = K, no duplicate evidence");
    const double k = static_cast<double>(c.draws);
    const double n = static_cast<double>(c.uniques);
    const double n1 = static_cast<double>(c.singletons);
    return n / (1.0 - n1 / k);
}

FixedPointResult mle_fixed_point(const MonthlyCounts& c, int iterations, double m0,
                                 double rel_tol) {
    if (c.draws <= 0)
        throw EstimateError(EstimateError::Kind::EmptyMonth, "mle_fixed_point: K = 0");
    if (c.uniques >= c.draws)
        throw EstimateError(EstimateError::Kind::Diverges,
                            "mle_fixed_point: N = K has no finite fixed point");
    if (c.uniques <= 0)
        throw EstimateError(EstimateError::Kind::Undefined, "mle_fixed_point: N = 0");

    const double k = static_cast<double>(c.draws);
    const double n = static_cast<double>(c.uniques);

    FixedPointResult res;
    double m = m0;
    for (int i = 0; i < iterations; ++i) {
        // exp(-K/M) underflows for K/M > ~700; the bracket is exactly N then.
        const double ratio = k / m;
        const double next = ratio > 700.0 ? n : n / (1.0 - std::exp(-ratio));
        const double step = std::abs(next - m);
        res.iterations = i + 1;
        if (step / next < rel_tol) {
            res.estimate = next;
            res.converged = true;
            return res;
        }
        m = next;
    }
    res.estimate = m;
    res.converged = false;
    return res;
}

std::vector<EstimateResult> monthly_series(const std::map<YearMonth, MonthlyCounts>& months,
                                           const std::map<YearMonth, MonthlyPositives>& positives,
                                           PrevalenceDenominator denom, int mle_iterations,
                                           double mle_m0) {
    std::vector<EstimateResult> out;
    out.reserve(months.size());
    for (const auto& [ym, counts] : months) {
        EstimateResult r;
        r.month = ym;
        r.counts = counts;

        MonthlyPositives pos;
        if (auto it = positives.find(ym); it != positives.end()) pos = it->second;

        const std::int64_t denominator =
            denom == PrevalenceDenominator::Draws ? counts.draws : counts.uniques;
        const std::int64_t numerator =
            denom == PrevalenceDenominator::Draws ? pos.positive_draws : pos.positive_uniques;
        r.prevalence = denominator > 0
                           ? static_cast<double>(numerator) / static_cast<double>(denominator)
                           : 0.0;

        try {
            r.population_gt = good_turing(counts);
        } catch (const EstimateError& e) {
            r.error = e.what();
        }
        try {
            const auto fp = mle_fixed_point(counts, mle_iterations, mle_m0);
            r.population_mle = fp.estimate;
            r.mle_converged = fp.converged;
        } catch (const EstimateError& e) {
            if (!r.error.empty()) r.error += "; ";
            r.error += e.what();
        }
        if (r.population_gt && r.population_mle && *r.population_gt > 0.0)
            r.relative_gap = std::abs(*r.population_gt - *r.population_mle) / *r.population_gt;
        if (r.population_gt)
            r.estimated_positive_volume = *r.population_gt * r.prevalence;
        out.push_back(std::move(r));
    }
    return out;
}

void write_series_csv(const std::vector<EstimateResult>& series, const std::string& path) {
    csv::Writer w(path);
    w.row({"month", "draws", "uniques", "singletons", "population_gt", "population_mle",
           "relative_gap", "mle_converged", "prevalence", "estimated_positive_volume", "error"});
    for (const auto& r : series) {
        w.row({format_year_month(r.month), std::to_string(r.counts.draws),
               std::to_string(r.counts.uniques), std::to_string(r.counts.singletons),
               r.population_gt ? fmt(*r.population_gt) : "",
               r.population_mle ? fmt(*r.population_mle) : "",
               r.relative_gap ? fmt(*r.relative_gap) : "", r.mle_converged ? "true" : "false",
               fmt(r.prevalence),
               r.estimated_positive_volume ? fmt(*r.estimated_positive_volume) : "", r.error});
    }
}

}  // namespace ctmine::popest
