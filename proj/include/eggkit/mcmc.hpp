#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

#include "eggkit/errors.hpp"
#include "eggkit/model.hpp"
#include "eggkit/proposals.hpp"
#include "eggkit/rng.hpp"

namespace eggkit {

// Tailored Gibbs / Metropolis-Hastings sampler for the paired hierarchical
// count model. One sweep updates, in order: latent pre-treatment counts,
// latent post-treatment counts, individual epg rates, overdispersion,
// population epg rate, reduction parameter.

// Non-finite state or log density inside a run; carries the failing sweep
// index and a snapshot of the state that produced it.
struct chain_failure_error : error {
    chain_failure_error(const std::string& what, std::int64_t iteration,
                        ChainState snapshot)
        : error(what), iteration(iteration), snapshot(std::move(snapshot)) {}

    std::int64_t iteration;
    ChainState snapshot;
};

// Gibbs draws from the displaced Poisson conditionals of the latent counts.
void update_latent_pre(ChainState& state, const FlockData& data,
                       RngStream& rng);
void update_latent_post(ChainState& state, const FlockData& data,
                        RngStream& rng);

// Gibbs draw of each individual epg rate from its gamma conditional with
// shape y_pre + y_post + phi and rate 1 + delta + phi/mu.
void update_individual_means(ChainState& state, const FlockData& data,
                             const PriorConfig& priors, RngStream& rng);

// Log of the overdispersion full conditional (unnormalized).
double phi_log_conditional(double phi, const ChainState& state,
                           const PriorConfig& priors);

// Random-walk MH step for phi with a uniform window of half-width
// tuning_s truncated at zero; returns whether the move was accepted.
bool update_phi(ChainState& state, const PriorConfig& priors, double tuning_s,
                RngStream& rng);

// Caches the KL-selected proposal family per rounded coefficient triple so
// repeated mu updates skip the quadrature; identical coefficients always
// map to the same family.
class KlFamilyCache {
public:
    ProposalFamily* find(double a, double b, double c);
    void insert(double a, double b, double c, ProposalFamily family);

private:
    static std::uint64_t key_of(double a, double b, double c);
    std::unordered_map<std::uint64_t, ProposalFamily> map_;
};

struct MuUpdateStats {
    std::int64_t window_fallbacks = 0;
};

struct DeltaUpdateStats {
    std::int64_t exact_updates = 0;
    std::int64_t grid_fallbacks = 0;
};

// Independence MH step for the population epg rate using the KL-selected
// mode-matched proposal; degenerate conditionals fall back to a uniform
// window on log(mu).
bool update_mu(ChainState& state, const PriorConfig& priors, RngStream& rng,
               KlFamilyCache* cache = nullptr, MuUpdateStats* stats = nullptr);

// Independence MH step for the reduction parameter with the mode-matched
// beta proposal; the all-zero-count conditional is drawn exactly, and
// boundary modes fall back to inverse-CDF sampling on a discretized grid.
bool update_delta(ChainState& state, const PriorConfig& priors, RngStream& rng,
                  DeltaUpdateStats* stats = nullptr);

// Burn-in step-width adaptation for phi: every window the width grows by
// 1.5 when the windowed acceptance rate exceeds the target band and
// shrinks by 1/1.5 below it.
double tune_phi_step(std::int64_t accepted, std::int64_t window,
                     double current_s, double target_lo = 0.30,
                     double target_hi = 0.40);

// Moment-based starting state.
ChainState initial_state(const FlockData& data);

// Full run: burn-in with phi-step adaptation (frozen afterwards), then
// n_samples * thin sweeps recording every thin-th draw. Deterministic
// given (data, priors, config).
PosteriorDraws run_chain(const FlockData& data, const PriorConfig& priors,
                         const ChainConfig& config);

} // namespace eggkit
