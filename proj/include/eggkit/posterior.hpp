#pragma once

#include <vector>

#include "eggkit/classical.hpp"
#include "eggkit/model.hpp"

namespace eggkit {

// Summaries of posterior draws: HPD intervals, tail probabilities,
// effective sample sizes and the two classification rules.

struct HpdInterval {
    double lower = 0.0;
    double upper = 0.0;
    // Set when the second-shortest window sits away from the shortest by
    // more than the shortest window's width.
    bool multimodal = false;
};

// Shortest window over consecutive order statistics containing
// ceil(level * N) samples; ties resolved towards the lowest lower endpoint.
HpdInterval hpd_interval(const std::vector<double>& samples,
                         double level = 0.95);

// Fraction of draws with 100 * (1 - delta) below the threshold.
double prob_reduction_below(const PosteriorDraws& draws,
                            double threshold_percent = 95.0);

struct ParameterSummary {
    double median = 0.0;
    double mean = 0.0;
    double hpd_lower = 0.0;
    double hpd_upper = 0.0;
    bool multimodal = false;
};

struct PosteriorSummary {
    ParameterSummary reduction; // on the 100 * (1 - delta) percent scale
    ParameterSummary mu;
    ParameterSummary phi;
};

PosteriorSummary summarize_draws(const PosteriorDraws& draws,
                                 double level = 0.95);

// WAAVP rule applied to the posterior median of the reduction and the
// lower HPD limit.
ResistanceVerdict classify_hierarchical(const PosteriorSummary& summary,
                                        double reduction_threshold = 95.0,
                                        double lower_threshold = 90.0);

enum class DenwoodVerdict {
    confirmed_resistance,
    confirmed_susceptibility,
    inconclusive,
};

// P(reduction < threshold) above prob_upper confirms resistance, below
// prob_lower confirms susceptibility.
DenwoodVerdict classify_denwood(const PosteriorDraws& draws,
                                double prob_upper = 0.975,
                                double prob_lower = 0.025,
                                double threshold_percent = 95.0);

struct EssEstimate {
    double ess = 0.0;
    bool zero_variance = false;
};

// Initial-positive-sequence autocorrelation estimator of the effective
// sample size.
EssEstimate effective_sample_size(const std::vector<double>& samples);

} // namespace eggkit
