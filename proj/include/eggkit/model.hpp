#pragma once

#include <cstdint>
#include <vector>

namespace eggkit {

// Observed raw McMaster slide counts for one flock. correction[i] is the
// analytic sensitivity f_i of animal i's count, so the sub-sampling
// probability is 1/f_i and epg = raw count * f_i.
struct FlockData {
    std::vector<std::int64_t> raw_pre;
    std::vector<std::int64_t> raw_post;
    std::vector<double> correction;

    std::size_t size() const { return raw_pre.size(); }
    double subsample_prob(std::size_t i) const { return 1.0 / correction[i]; }
    void validate() const; // throws parameter_error
};

// Hyperparameters: gamma priors on the overdispersion parameter and the
// population epg rate, beta prior on the reduction parameter.
struct PriorConfig {
    double a_phi = 1.0;
    double b_phi = 0.7;
    double a_mu = 1.0;
    double b_mu = 0.001;
    double a_delta = 1.0;
    double b_delta = 1.0;

    void validate() const; // throws parameter_error
};

// Current values of all latent variables and parameters of one chain.
// Latent counts never drop below the observed raw counts.
struct ChainState {
    std::vector<std::int64_t> y_pre;  // latent true pre-treatment counts
    std::vector<std::int64_t> y_post; // latent true post-treatment counts
    std::vector<double> mu_i;         // individual epg rates
    double phi = 1.0;                 // overdispersion
    double mu = 1.0;                  // population epg rate
    double delta = 0.5;               // reduction parameter, in (0,1)
};

struct ChainConfig {
    int n_samples = 10000;
    int burn_in = 10000;
    int thin = 10;
    std::uint64_t seed = 1;
    double phi_step = 1.0; // initial width of the phi random-walk window
    double target_accept_lo = 0.30;
    double target_accept_hi = 0.40;

    void validate() const; // throws parameter_error
};

// Thinned post-burn-in draws plus acceptance and fallback diagnostics.
struct PosteriorDraws {
    std::vector<double> phi;
    std::vector<double> mu;
    std::vector<double> delta;

    double accept_phi = 0.0;
    double accept_mu = 0.0;
    double accept_delta = 0.0;
    double tuned_phi_step = 0.0;

    std::int64_t mu_window_fallbacks = 0;   // uniform-window updates of mu
    std::int64_t delta_exact_updates = 0;   // truncated-exponential draws
    std::int64_t delta_grid_fallbacks = 0;  // boundary-mode grid draws

    ChainConfig config;
};

} // namespace eggkit
