#include "eggkit/mcmc.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "eggkit/distributions.hpp"

namespace eggkit {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double round_significant(double x, int digits) {
    if (x == 0.0) return 0.0;
    const double mag = std::pow(
        10.0, digits - 1 - static_cast<int>(std::floor(std::log10(std::fabs(x)))));
    return std::round(x * mag) / mag;
}

std::uint64_t hash_mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Inverse-CDF draw from exp(-G(delta)) on a discretized grid, used when
// the reduction conditional has its mode on the boundary. Cells are
// log-spaced towards both endpoints so integrable poles stay resolved.
double sample_delta_grid(const DeltaConditional& g, RngStream& rng) {
    constexpr int half = 2048;
    constexpr double edge = 1e-14;

    static thread_local std::vector<double> edges;
    edges.clear();
    edges.reserve(2 * half + 1);
    const double log_lo = std::log(edge);
    const double log_hi = std::log(0.5);
    for (int i = 0; i <= half; ++i) {
        edges.push_back(std::exp(log_lo + (log_hi - log_lo) * i / half));
    }
    for (int i = half - 1; i >= 0; --i) {
        edges.push_back(1.0 - std::exp(log_lo + (log_hi - log_lo) * i / half));
    }

    const int n_cells = static_cast<int>(edges.size()) - 1;
    static thread_local std::vector<double> mass;
    mass.assign(n_cells, 0.0);

    double g_min = std::numeric_limits<double>::infinity();
    static thread_local std::vector<double> mids;
    mids.assign(n_cells, 0.0);
    for (int i = 0; i < n_cells; ++i) {
        mids[i] = 0.5 * (edges[i] + edges[i + 1]);
        g_min = std::min(g_min, g.neg_log_density(mids[i]));
    }
    double total = 0.0;
    for (int i = 0; i < n_cells; ++i) {
        mass[i] = std::exp(-(g.neg_log_density(mids[i]) - g_min)) *
                  (edges[i + 1] - edges[i]);
        total += mass[i];
    }
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw degenerate_conditional_error(
            "delta grid fallback: degenerate cell masses");
    }

    double u = rng.uniform() * total;
    int cell = n_cells - 1;
    for (int i = 0; i < n_cells; ++i) {
        if (u <= mass[i]) {
            cell = i;
            break;
        }
        u -= mass[i];
    }
    const double within = mass[cell] > 0.0 ? u / mass[cell] : rng.uniform();
    double d = edges[cell] + within * (edges[cell + 1] - edges[cell]);
    d = std::clamp(d, std::numeric_limits<double>::min(),
                   std::nextafter(1.0, 0.0));
    return d;
}

void check_finite_state(const ChainState& state, std::int64_t iteration) {
    const bool ok = std::isfinite(state.phi) && state.phi > 0.0 &&
                    std::isfinite(state.mu) && state.mu > 0.0 &&
                    std::isfinite(state.delta) && state.delta > 0.0 &&
                    state.delta < 1.0 &&
                    std::all_of(state.mu_i.begin(), state.mu_i.end(),
                                [](double m) {
                                    return std::isfinite(m) && m > 0.0;
                                });
    if (!ok) {
        throw chain_failure_error("chain state left its support", iteration,
                                  state);
    }
}

} // namespace

void FlockData::validate() const {
    if (raw_pre.empty() || raw_pre.size() != raw_post.size() ||
        raw_pre.size() != correction.size()) {
        throw parameter_error("flock data: inconsistent or empty columns");
    }
    for (std::size_t i = 0; i < raw_pre.size(); ++i) {
        if (raw_pre[i] < 0 || raw_post[i] < 0) {
            throw parameter_error("flock data: negative raw count");
        }
        if (!(correction[i] >= 1.0)) {
            throw parameter_error("flock data: correction factor below 1");
        }
    }
}

void PriorConfig::validate() const {
    if (!(a_phi > 0.0) || !(b_phi > 0.0) || !(a_mu > 0.0) || !(b_mu > 0.0) ||
        !(a_delta > 0.0) || !(b_delta > 0.0)) {
        throw parameter_error("prior config: all hyperparameters must be positive");
    }
}

void ChainConfig::validate() const {
    if (n_samples < 1 || burn_in < 0 || thin < 1) {
        throw parameter_error("chain config: invalid lengths");
    }
    if (!(phi_step > 0.0)) {
        throw parameter_error("chain config: phi_step must be positive");
    }
    if (!(target_accept_lo > 0.0) || !(target_accept_hi < 1.0) ||
        !(target_accept_lo < target_accept_hi)) {
        throw parameter_error("chain config: invalid acceptance band");
    }
}

void update_latent_pre(ChainState& state, const FlockData& data,
                       RngStream& rng) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double mean = (1.0 - data.subsample_prob(i)) * state.mu_i[i];
        state.y_pre[i] = sample_displaced_poisson(data.raw_pre[i], mean, rng);
        assert(state.y_pre[i] >= data.raw_pre[i]);
    }
}

void update_latent_post(ChainState& state, const FlockData& data,
                        RngStream& rng) {
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double mean =
            (1.0 - data.subsample_prob(i)) * state.delta * state.mu_i[i];
        state.y_post[i] = sample_displaced_poisson(data.raw_post[i], mean, rng);
        assert(state.y_post[i] >= data.raw_post[i]);
    }
}

void update_individual_means(ChainState& state, const FlockData& data,
                             const PriorConfig& priors, RngStream& rng) {
    (void)priors; // conditional depends on the priors only through the state
    const double rate = 1.0 + state.delta + state.phi / state.mu;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double shape =
            static_cast<double>(state.y_pre[i] + state.y_post[i]) + state.phi;
        state.mu_i[i] = sample_gamma(shape, rate, rng);
    }
}

double phi_log_conditional(double phi, const ChainState& state,
                           const PriorConfig& priors) {
    if (!(phi > 0.0)) return neg_inf;
    const double n = static_cast<double>(state.mu_i.size());
    double sum_mu = 0.0;
    double sum_log_mu = 0.0;
    for (const double m : state.mu_i) {
        sum_mu += m;
        sum_log_mu += std::log(m);
    }
    return (n * phi + priors.a_phi - 1.0) * std::log(phi) -
           n * std::lgamma(phi) - n * phi * std::log(state.mu) +
           (phi - 1.0) * sum_log_mu -
           phi * (sum_mu / state.mu + priors.b_phi);
}

bool update_phi(ChainState& state, const PriorConfig& priors, double tuning_s,
                RngStream& rng) {
    if (!(tuning_s > 0.0)) {
        throw parameter_error("update_phi: tuning width must be positive");
    }
    const double s = tuning_s;
    const double lo = std::max(0.0, state.phi - s);
    const double candidate = rng.uniform(lo, state.phi + s);
    if (!(candidate > 0.0)) return false;

    // Hastings correction for the truncation at zero: the window length is
    // min(x, s) + s at location x.
    const double log_ratio =
        phi_log_conditional(candidate, state, priors) -
        phi_log_conditional(state.phi, state, priors) +
        std::log(std::min(state.phi, s) + s) -
        std::log(std::min(candidate, s) + s);
    if (std::isnan(log_ratio)) {
        throw chain_failure_error("update_phi: non-finite log density", -1,
                                  state);
    }
    if (std::log(rng.uniform_pos()) < log_ratio) {
        state.phi = candidate;
        return true;
    }
    return false;
}

ProposalFamily* KlFamilyCache::find(double a, double b, double c) {
    const auto it = map_.find(key_of(a, b, c));
    return it == map_.end() ? nullptr : &it->second;
}

void KlFamilyCache::insert(double a, double b, double c,
                           ProposalFamily family) {
    map_.emplace(key_of(a, b, c), family);
}

std::uint64_t KlFamilyCache::key_of(double a, double b, double c) {
    const std::uint64_t ha =
        hash_mix(std::bit_cast<std::uint64_t>(round_significant(a, 2)));
    const std::uint64_t hb =
        hash_mix(std::bit_cast<std::uint64_t>(round_significant(b, 2)));
    const std::uint64_t hc =
        hash_mix(std::bit_cast<std::uint64_t>(round_significant(c, 2)));
    return ha ^ (hb * 0x9E3779B97F4A7C15ull) ^ (hc * 0xC2B2AE3D27D4EB4Full);
}

bool update_mu(ChainState& state, const PriorConfig& priors, RngStream& rng,
               KlFamilyCache* cache, MuUpdateStats* stats) {
    const MuConditional g = mu_conditional_coeffs(state, priors);

    ProposalSpec proposal;
    bool have_proposal = false;
    try {
        if (cache != nullptr) {
            if (const ProposalFamily* family = cache->find(g.a, g.b, g.c)) {
                const ModeInfo info = mu_conditional_mode(g.a, g.b, g.c);
                try {
                    proposal = make_mu_candidate(*family, info);
                    have_proposal = true;
                } catch (const degenerate_conditional_error&) {
                    // Cached family invalid for these coefficients; reselect.
                }
            }
            if (!have_proposal) {
                proposal = build_mu_proposal(g.a, g.b, g.c);
                cache->insert(g.a, g.b, g.c, proposal.family);
                have_proposal = true;
            }
        } else {
            proposal = build_mu_proposal(g.a, g.b, g.c);
            have_proposal = true;
        }
    } catch (const degenerate_conditional_error&) {
        have_proposal = false;
    }

    if (!have_proposal) {
        // Uniform window on log(mu); the Hastings ratio picks up the
        // Jacobian of the log transform.
        if (stats != nullptr) ++stats->window_fallbacks;
        const double candidate = state.mu * std::exp(rng.uniform(-0.5, 0.5));
        const double log_ratio = -g.neg_log_density(candidate) +
                                 g.neg_log_density(state.mu) +
                                 std::log(candidate) - std::log(state.mu);
        if (std::isnan(log_ratio)) {
            throw chain_failure_error("update_mu: non-finite log density", -1,
                                      state);
        }
        if (std::log(rng.uniform_pos()) < log_ratio) {
            state.mu = candidate;
            return true;
        }
        return false;
    }

    const double candidate = proposal.sample(rng);
    if (!(candidate > 0.0) || !std::isfinite(candidate)) return false;
    const double log_ratio =
        -g.neg_log_density(candidate) + g.neg_log_density(state.mu) +
        proposal.log_density(state.mu) - proposal.log_density(candidate);
    if (std::isnan(log_ratio)) {
        throw chain_failure_error("update_mu: non-finite log density", -1,
                                  state);
    }
    if (std::log(rng.uniform_pos()) < log_ratio) {
        state.mu = candidate;
        return true;
    }
    return false;
}

bool update_delta(ChainState& state, const PriorConfig& priors, RngStream& rng,
                  DeltaUpdateStats* stats) {
    const DeltaConditional g = delta_conditional_coeffs(state, priors);

    ProposalSpec proposal;
    try {
        proposal = build_delta_proposal(g.a, g.b, g.c);
    } catch (const boundary_mode_error&) {
        if (stats != nullptr) ++stats->grid_fallbacks;
        state.delta = sample_delta_grid(g, rng);
        return true;
    }

    if (proposal.family == ProposalFamily::exact) {
        if (stats != nullptr) ++stats->exact_updates;
        state.delta = proposal.sample(rng);
        return true;
    }

    const double candidate = proposal.sample(rng);
    if (!(candidate > 0.0) || !(candidate < 1.0)) return false;
    const double log_ratio =
        -g.neg_log_density(candidate) + g.neg_log_density(state.delta) +
        proposal.log_density(state.delta) - proposal.log_density(candidate);
    if (std::isnan(log_ratio)) {
        throw chain_failure_error("update_delta: non-finite log density", -1,
                                  state);
    }
    if (std::log(rng.uniform_pos()) < log_ratio) {
        state.delta = candidate;
        return true;
    }
    return false;
}

double tune_phi_step(std::int64_t accepted, std::int64_t window,
                     double current_s, double target_lo, double target_hi) {
    if (window <= 0) return current_s;
    const double rate =
        static_cast<double>(accepted) / static_cast<double>(window);
    if (rate > target_hi) return current_s * 1.5;
    if (rate < target_lo) return current_s / 1.5;
    return current_s;
}

ChainState initial_state(const FlockData& data) {
    const std::size_t n = data.size();
    ChainState state;
    state.y_pre.resize(n);
    state.y_post.resize(n);
    state.mu_i.resize(n);

    std::int64_t sum_pre = 0;
    std::int64_t sum_post = 0;
    for (std::size_t i = 0; i < n; ++i) {
        // Method-of-moments epg starting values.
        state.y_pre[i] = std::max(
            data.raw_pre[i],
            static_cast<std::int64_t>(std::llround(
                static_cast<double>(data.raw_pre[i]) * data.correction[i])));
        state.y_post[i] = std::max(
            data.raw_post[i],
            static_cast<std::int64_t>(std::llround(
                static_cast<double>(data.raw_post[i]) * data.correction[i])));
        state.mu_i[i] = std::max(static_cast<double>(state.y_pre[i]), 1.0);
        sum_pre += state.y_pre[i];
        sum_post += state.y_post[i];
    }
    state.mu = std::accumulate(state.mu_i.begin(), state.mu_i.end(), 0.0) /
               static_cast<double>(n);
    state.phi = 1.0;
    state.delta = std::clamp((static_cast<double>(sum_post) + 0.5) /
                                 (static_cast<double>(sum_pre) + 1.0),
                             0.001, 0.999);
    return state;
}

PosteriorDraws run_chain(const FlockData& data, const PriorConfig& priors,
                         const ChainConfig& config) {
    data.validate();
    priors.validate();
    config.validate();

    RngStream rng(config.seed);
    ChainState state = initial_state(data);
    KlFamilyCache cache;
    MuUpdateStats mu_stats;
    DeltaUpdateStats delta_stats;

    PosteriorDraws draws;
    draws.config = config;
    draws.phi.reserve(config.n_samples);
    draws.mu.reserve(config.n_samples);
    draws.delta.reserve(config.n_samples);

    double step = config.phi_step;
    constexpr std::int64_t tuning_window = 200;
    std::int64_t window_count = 0;
    std::int64_t window_accepts = 0;

    std::int64_t accept_phi = 0;
    std::int64_t accept_mu = 0;
    std::int64_t accept_delta = 0;

    const std::int64_t total =
        config.burn_in +
        static_cast<std::int64_t>(config.n_samples) * config.thin;
    for (std::int64_t it = 0; it < total; ++it) {
        bool phi_accepted = false;
        bool mu_accepted = false;
        bool delta_accepted = false;
        try {
            update_latent_pre(state, data, rng);
            update_latent_post(state, data, rng);
            update_individual_means(state, data, priors, rng);
            phi_accepted = update_phi(state, priors, step, rng);
            mu_accepted = update_mu(state, priors, rng, &cache, &mu_stats);
            delta_accepted = update_delta(state, priors, rng, &delta_stats);
            check_finite_state(state, it);
        } catch (chain_failure_error& failure) {
            throw chain_failure_error(failure.what(), it,
                                      std::move(failure.snapshot));
        } catch (const error& e) {
            throw chain_failure_error(e.what(), it, state);
        }

        if (it < config.burn_in) {
            ++window_count;
            window_accepts += phi_accepted;
            if (window_count == tuning_window) {
                step = tune_phi_step(window_accepts, window_count, step,
                                     config.target_accept_lo,
                                     config.target_accept_hi);
                window_count = 0;
                window_accepts = 0;
            }
        } else {
            accept_phi += phi_accepted;
            accept_mu += mu_accepted;
            accept_delta += delta_accepted;
            if ((it - config.burn_in) % config.thin == config.thin - 1) {
                draws.phi.push_back(state.phi);
                draws.mu.push_back(state.mu);
                draws.delta.push_back(state.delta);
            }
        }
    }

    const double sampling_iters =
        static_cast<double>(config.n_samples) * config.thin;
    draws.accept_phi = static_cast<double>(accept_phi) / sampling_iters;
    draws.accept_mu = static_cast<double>(accept_mu) / sampling_iters;
    draws.accept_delta = static_cast<double>(accept_delta) / sampling_iters;
    draws.tuned_phi_step = step;
    draws.mu_window_fallbacks = mu_stats.window_fallbacks;
    draws.delta_exact_updates = delta_stats.exact_updates;
    draws.delta_grid_fallbacks = delta_stats.grid_fallbacks;
    return draws;
}

} // namespace eggkit
