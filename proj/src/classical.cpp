#include "eggkit/classical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eggkit/distributions.hpp"
#include "eggkit/errors.hpp"

namespace eggkit {

namespace {

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Unbiased sample variance.
double sample_variance(const std::vector<double>& v) {
    const double m = mean_of(v);
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - m) * (x - m);
    }
    return ss / static_cast<double>(v.size() - 1);
}

// Percentile of a sorted vector at the (n+1)q order-statistic position.
double percentile_sorted(const std::vector<double>& sorted, double q) {
    const double n = static_cast<double>(sorted.size());
    const double pos = q * (n + 1.0);
    if (pos <= 1.0) return sorted.front();
    if (pos >= n) return sorted.back();
    const std::size_t k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    return sorted[k - 1] + frac * (sorted[k] - sorted[k - 1]);
}

} // namespace

void PairedEpgSample::validate() const {
    if (pre.size() != post.size()) {
        throw parameter_error("paired sample: pre and post lengths differ");
    }
    if (pre.size() < 2) {
        throw parameter_error("paired sample: at least two animals required");
    }
    for (std::size_t i = 0; i < pre.size(); ++i) {
        if (!(pre[i] >= 0.0) || !(post[i] >= 0.0)) {
            throw parameter_error("paired sample: negative epg value");
        }
    }
}

double fecr_point(const PairedEpgSample& sample) {
    sample.validate();
    const double pre_mean = mean_of(sample.pre);
    if (!(pre_mean > 0.0)) {
        throw undefined_estimate_error("fecr_point: zero pre-treatment mean");
    }
    return 100.0 * (1.0 - mean_of(sample.post) / pre_mean);
}

FecrResult fecr_approx_ci(const PairedEpgSample& sample, double level) {
    sample.validate();
    if (!(level > 0.0) || !(level < 1.0)) {
        throw parameter_error("fecr_approx_ci: level must lie in (0,1)");
    }

    const std::size_t n = sample.size();
    const double pre_mean = mean_of(sample.pre);
    if (!(pre_mean > 0.0)) {
        throw undefined_estimate_error("fecr_approx_ci: zero pre-treatment mean");
    }
    const double post_mean = mean_of(sample.post);

    FecrResult result;
    result.method = CiMethod::approximate;
    result.df = static_cast<int>(2 * n - 2);
    result.estimate = 100.0 * (1.0 - post_mean / pre_mean);

    const double post_var = sample_variance(sample.post);
    if (post_mean == 0.0 || post_var == 0.0) {
        return result; // interval uncomputable
    }

    // Var(log(post_mean/pre_mean)) ~ Var(mean)/mean^2 summed over groups.
    const double pre_var = sample_variance(sample.pre);
    const double nd = static_cast<double>(n);
    const double log_ratio_var = post_var / nd / (post_mean * post_mean) +
                                 pre_var / nd / (pre_mean * pre_mean);

    const double tq = t_quantile(1.0 - 0.5 * (1.0 - level), result.df);
    const double log_ratio = std::log(post_mean / pre_mean);
    const double half_width = tq * std::sqrt(log_ratio_var);

    result.ci_lower = 100.0 * (1.0 - std::exp(log_ratio + half_width));
    result.ci_upper = std::min(100.0, 100.0 * (1.0 - std::exp(log_ratio - half_width)));
    return result;
}

FecrResult fecr_bootstrap_ci(const PairedEpgSample& sample, RngStream& rng,
                             int resamples, double level) {
    sample.validate();
    if (resamples < 1) {
        throw parameter_error("fecr_bootstrap_ci: resamples must be positive");
    }
    if (!(level > 0.0) || !(level < 1.0)) {
        throw parameter_error("fecr_bootstrap_ci: level must lie in (0,1)");
    }

    const std::size_t n = sample.size();
    const double pre_mean = mean_of(sample.pre);
    if (!(pre_mean > 0.0)) {
        throw undefined_estimate_error("fecr_bootstrap_ci: zero pre-treatment mean");
    }

    FecrResult result;
    result.method = CiMethod::bootstrap;
    result.resamples = resamples;
    result.estimate = 100.0 * (1.0 - mean_of(sample.post) / pre_mean);

    if (std::all_of(sample.post.begin(), sample.post.end(),
                    [](double x) { return x == 0.0; })) {
        return result; // every resample would give 100; interval degenerate
    }

    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(resamples));
    for (int b = 0; b < resamples; ++b) {
        double pre_sum = 0.0;
        double post_sum = 0.0;
        do {
            pre_sum = 0.0;
            post_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const std::size_t idx =
                    static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
                pre_sum += sample.pre[idx];
                post_sum += sample.post[idx];
            }
        } while (pre_sum == 0.0); // redraw resamples with undefined estimate
        estimates.push_back(100.0 * (1.0 - post_sum / pre_sum));
    }

    std::sort(estimates.begin(), estimates.end());
    const double alpha = 1.0 - level;
    result.ci_lower = percentile_sorted(estimates, 0.5 * alpha);
    result.ci_upper = percentile_sorted(estimates, 1.0 - 0.5 * alpha);
    return result;
}

ResistanceVerdict classify_waavp(double estimate,
                                 std::optional<double> lower_limit,
                                 VerdictSource source,
                                 double reduction_threshold,
                                 double lower_threshold) {
    ResistanceVerdict verdict;
    verdict.source = source;
    verdict.criterion_a_met = estimate < reduction_threshold;
    verdict.criterion_b_met =
        lower_limit.has_value() && *lower_limit < lower_threshold;
    if (verdict.criterion_a_met && verdict.criterion_b_met) {
        verdict.level = VerdictLevel::present;
    } else if (verdict.criterion_a_met || verdict.criterion_b_met) {
        verdict.level = VerdictLevel::suspected;
    } else {
        verdict.level = VerdictLevel::absent;
    }
    return verdict;
}

} // namespace eggkit
