#pragma once

#include <optional>
#include <vector>

#include "eggkit/rng.hpp"

namespace eggkit {

// Standard faecal egg count reduction test: point estimate, approximate
// t-based confidence interval on the log ratio, paired bootstrap percentile
// interval, and the WAAVP three-level classification.

// Per-animal epg values before and after treatment, same animal order.
struct PairedEpgSample {
    std::vector<double> pre;
    std::vector<double> post;

    std::size_t size() const { return pre.size(); }
    void validate() const; // throws parameter_error on malformed input
};

enum class CiMethod { approximate, bootstrap };

struct FecrResult {
    double estimate = 0.0; // percent reduction
    std::optional<double> ci_lower;
    std::optional<double> ci_upper;
    CiMethod method = CiMethod::approximate;
    int df = 0;        // approximate interval only
    int resamples = 0; // bootstrap interval only

    bool has_interval() const { return ci_lower.has_value(); }
};

enum class VerdictLevel { present, suspected, absent };
enum class VerdictSource { classical, hierarchical };

struct ResistanceVerdict {
    VerdictLevel level = VerdictLevel::absent;
    bool criterion_a_met = false; // estimated reduction below 95
    bool criterion_b_met = false; // lower confidence limit below 90
    VerdictSource source = VerdictSource::classical;
};

// 100 * (1 - mean(post) / mean(pre)); throws undefined_estimate_error when
// the pre-treatment mean is zero.
double fecr_point(const PairedEpgSample& sample);

// Approximate CI from the variance of the log ratio, backtransformed and
// capped at 100. The interval is absent when the post-treatment mean or
// variance is zero.
FecrResult fecr_approx_ci(const PairedEpgSample& sample, double level = 0.95);

// Paired bootstrap percentile interval; resamples with zero pre-treatment
// mean are redrawn. All-zero post counts give estimate 100 with no interval.
FecrResult fecr_bootstrap_ci(const PairedEpgSample& sample, RngStream& rng,
                             int resamples = 1999, double level = 0.95);

// WAAVP rule: resistance present if the reduction is below
// reduction_threshold AND the lower confidence limit is below
// lower_threshold; suspected if exactly one criterion holds. A missing
// lower limit never satisfies the second criterion.
ResistanceVerdict classify_waavp(double estimate,
                                 std::optional<double> lower_limit,
                                 VerdictSource source = VerdictSource::classical,
                                 double reduction_threshold = 95.0,
                                 double lower_threshold = 90.0);

} // namespace eggkit
