#pragma once

#include <cmath>
#include <vector>

#include "eggkit/model.hpp"
#include "eggkit/rng.hpp"

namespace eggkit {

// Construction of the independence proposals used for the population mean
// and the reduction parameter: each candidate family is fitted by matching
// the mode of the full conditional and the second derivative of its minus
// log density at the mode; for the population mean the best family is then
// picked by Kullback-Leibler divergence.

enum class ProposalFamily {
    inverse_gamma, // par1 = shape, par2 = scale
    log_normal,    // par1 = location, par2 = scale
    gamma,         // par1 = shape, par2 = rate
    beta,          // par1, par2 = shape parameters
    exact,         // exponential with rate par1, truncated to (0,1)
};

struct ProposalSpec {
    ProposalFamily family = ProposalFamily::gamma;
    double par1 = 0.0;
    double par2 = 0.0;
    double mode = 0.0;      // matched mode m
    double curvature = 0.0; // G''(m)

    double sample(RngStream& rng) const;
    double log_density(double x) const;
};

// Coefficients of G(mu) = a log(mu) + b mu + c / mu; the conditional
// density of the population mean is proportional to exp(-G).
struct MuConditional {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double neg_log_density(double mu) const {
        return a * std::log(mu) + b * mu + c / mu;
    }
};

MuConditional mu_conditional_coeffs(const ChainState& state,
                                    const PriorConfig& priors);

// Coefficients of G(delta) = -a log(delta) - b log(1-delta) + c delta for
// the reduction conditional.
struct DeltaConditional {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    double neg_log_density(double d) const {
        return -a * std::log(d) - b * std::log1p(-d) + c * d;
    }
};

DeltaConditional delta_conditional_coeffs(const ChainState& state,
                                          const PriorConfig& priors);

// Interior mode and curvature of the population-mean conditional; throws
// degenerate_conditional_error when no usable interior mode exists.
struct ModeInfo {
    double mode = 0.0;
    double curvature = 0.0;
};

ModeInfo mu_conditional_mode(double a, double b, double c);

// All valid mode-matched candidates (the inverse gamma is dropped when its
// matched shape would be non-positive).
std::vector<ProposalSpec> mu_proposal_candidates(double a, double b, double c);

// Builds one candidate of a specific family from matched mode data.
ProposalSpec make_mu_candidate(ProposalFamily family, const ModeInfo& info);

// KL(target || candidate) by trapezoid quadrature on a grid spanning
// twelve proposal standard deviations around the mode, at least 2048 nodes.
double kl_divergence(const MuConditional& target, const ModeInfo& info,
                     const ProposalSpec& candidate);

// Returns the candidate minimizing KL(target || candidate).
ProposalSpec kl_select(const MuConditional& target,
                       const std::vector<ProposalSpec>& candidates);

// Candidate construction + KL selection in one step.
ProposalSpec build_mu_proposal(double a, double b, double c);

// Beta proposal for the reduction conditional, or the exact
// truncated-exponential spec when a = b = 0. Throws boundary_mode_error
// when the mode is not interior (e.g. a < 0).
ProposalSpec build_delta_proposal(double a, double b, double c);

} // namespace eggkit
