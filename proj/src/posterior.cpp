#include "eggkit/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eggkit/errors.hpp"

namespace eggkit {

namespace {

double median_sorted(const std::vector<double>& sorted) {
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

ParameterSummary summarize_samples(std::vector<double> samples, double level) {
    const HpdInterval hpd = hpd_interval(samples, level);
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) /
        static_cast<double>(samples.size());
    std::sort(samples.begin(), samples.end());
    return ParameterSummary{median_sorted(samples), mean, hpd.lower, hpd.upper,
                            hpd.multimodal};
}

} // namespace

HpdInterval hpd_interval(const std::vector<double>& samples, double level) {
    if (samples.size() < 100) {
        throw insufficient_samples_error(
            "hpd_interval: at least 100 samples required");
    }
    if (!(level > 0.0) || !(level < 1.0)) {
        throw parameter_error("hpd_interval: level must lie in (0,1)");
    }

    std::vector<double> sorted(samples);
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(level * static_cast<double>(n)));
    const std::size_t span = std::min(k, n);

    std::size_t best = 0;
    double best_width = sorted[span - 1] - sorted[0];
    std::size_t second = 0;
    double second_width = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + span <= n; ++i) {
        const double width = sorted[i + span - 1] - sorted[i];
        if (width < best_width) {
            second = best;
            second_width = best_width;
            best = i;
            best_width = width;
        } else if (width < second_width) {
            second = i;
            second_width = width;
        }
    }

    HpdInterval interval;
    interval.lower = sorted[best];
    interval.upper = sorted[best + span - 1];
    if (std::isfinite(second_width)) {
        interval.multimodal =
            std::fabs(sorted[second] - sorted[best]) > best_width;
    }
    return interval;
}

double prob_reduction_below(const PosteriorDraws& draws,
                            double threshold_percent) {
    if (draws.delta.empty()) {
        throw insufficient_samples_error("prob_reduction_below: no draws");
    }
    std::size_t count = 0;
    for (const double d : draws.delta) {
        count += 100.0 * (1.0 - d) < threshold_percent;
    }
    return static_cast<double>(count) / static_cast<double>(draws.delta.size());
}

PosteriorSummary summarize_draws(const PosteriorDraws& draws, double level) {
    PosteriorSummary summary;
    summary.mu = summarize_samples(draws.mu, level);
    summary.phi = summarize_samples(draws.phi, level);

    // Summarize delta, then map through the decreasing affine transform
    // 100 * (1 - delta) so the median stays exactly equivariant.
    const ParameterSummary ds = summarize_samples(draws.delta, level);
    summary.reduction.median = 100.0 * (1.0 - ds.median);
    summary.reduction.mean = 100.0 * (1.0 - ds.mean);
    summary.reduction.hpd_lower = 100.0 * (1.0 - ds.hpd_upper);
    summary.reduction.hpd_upper = 100.0 * (1.0 - ds.hpd_lower);
    summary.reduction.multimodal = ds.multimodal;
    return summary;
}

ResistanceVerdict classify_hierarchical(const PosteriorSummary& summary,
                                        double reduction_threshold,
                                        double lower_threshold) {
    return classify_waavp(summary.reduction.median,
                          summary.reduction.hpd_lower,
                          VerdictSource::hierarchical, reduction_threshold,
                          lower_threshold);
}

DenwoodVerdict classify_denwood(const PosteriorDraws& draws,
                                double prob_upper, double prob_lower,
                                double threshold_percent) {
    const double p = prob_reduction_below(draws, threshold_percent);
    if (p > prob_upper) return DenwoodVerdict::confirmed_resistance;
    if (p < prob_lower) return DenwoodVerdict::confirmed_susceptibility;
    return DenwoodVerdict::inconclusive;
}

EssEstimate effective_sample_size(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 100) {
        throw insufficient_samples_error(
            "effective_sample_size: at least 100 samples required");
    }

    const double nd = static_cast<double>(n);
    const double mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / nd;
    double c0 = 0.0;
    for (const double x : samples) {
        c0 += (x - mean) * (x - mean);
    }
    c0 /= nd;
    if (!(c0 > 0.0)) {
        return EssEstimate{nd, true};
    }

    auto autocorr = [&](std::size_t lag) {
        double c = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) {
            c += (samples[i] - mean) * (samples[i + lag] - mean);
        }
        return c / nd / c0;
    };

    // Sum of paired autocorrelations while the pairs stay positive.
    double tau = 0.0;
    for (std::size_t m = 0; 2 * m + 1 < n; ++m) {
        const double pair_sum = autocorr(2 * m) + autocorr(2 * m + 1);
        if (pair_sum <= 0.0) break;
        tau += pair_sum;
    }
    tau = 2.0 * tau - 1.0;
    if (tau < 1.0) tau = 1.0;
    return EssEstimate{nd / tau, false};
}

} // namespace eggkit
