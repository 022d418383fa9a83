#include "eggkit/proposals.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "eggkit/distributions.hpp"
#include "eggkit/errors.hpp"

namespace eggkit {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// One Newton polish of the stationary point of G, kept only if it tightens
// the gradient and stays inside (lo, hi).
template <typename Grad, typename Curv>
double polish_mode(double m, double lo, double hi, Grad grad, Curv curv) {
    const double g = grad(m);
    const double h = curv(m);
    if (!(h > 0.0)) return m;
    const double candidate = m - g / h;
    if (!(candidate > lo) || !(candidate < hi)) return m;
    if (std::fabs(grad(candidate)) < std::fabs(g)) return candidate;
    return m;
}

} // namespace

double ProposalSpec::sample(RngStream& rng) const {
    switch (family) {
    case ProposalFamily::inverse_gamma:
        return 1.0 / sample_gamma(par1, par2, rng);
    case ProposalFamily::log_normal:
        return std::exp(par1 + par2 * rng.normal());
    case ProposalFamily::gamma:
        return sample_gamma(par1, par2, rng);
    case ProposalFamily::beta:
        return sample_beta(par1, par2, rng);
    case ProposalFamily::exact: {
        // Inverse CDF of Exponential(par1) truncated to (0,1).
        const double c = par1;
        const double u = rng.uniform_pos();
        if (c < 1e-12) return u;
        double d = -std::log1p(u * std::expm1(-c)) / c;
        if (d <= 0.0) d = std::numeric_limits<double>::min();
        if (d >= 1.0) d = std::nextafter(1.0, 0.0);
        return d;
    }
    }
    throw parameter_error("ProposalSpec::sample: unknown family");
}

double ProposalSpec::log_density(double x) const {
    switch (family) {
    case ProposalFamily::inverse_gamma:
        return log_pdf_inverse_gamma(par1, par2, x);
    case ProposalFamily::log_normal:
        return log_pdf_log_normal(par1, par2, x);
    case ProposalFamily::gamma:
        return log_pdf_gamma(par1, par2, x);
    case ProposalFamily::beta:
        return log_pdf_beta(par1, par2, x);
    case ProposalFamily::exact: {
        if (!(x > 0.0) || !(x < 1.0)) return -inf;
        const double c = par1;
        if (c < 1e-12) return 0.0;
        return std::log(c) - c * x - std::log(-std::expm1(-c));
    }
    }
    throw parameter_error("ProposalSpec::log_density: unknown family");
}

MuConditional mu_conditional_coeffs(const ChainState& state,
                                    const PriorConfig& priors) {
    const double n = static_cast<double>(state.mu_i.size());
    const double sum_mu_i =
        std::accumulate(state.mu_i.begin(), state.mu_i.end(), 0.0);
    return MuConditional{n * state.phi - priors.a_mu + 1.0, priors.b_mu,
                         state.phi * sum_mu_i};
}

DeltaConditional delta_conditional_coeffs(const ChainState& state,
                                          const PriorConfig& priors) {
    const double sum_y_post = static_cast<double>(
        std::accumulate(state.y_post.begin(), state.y_post.end(),
                        static_cast<std::int64_t>(0)));
    const double sum_mu_i =
        std::accumulate(state.mu_i.begin(), state.mu_i.end(), 0.0);
    return DeltaConditional{sum_y_post + priors.a_delta - 1.0,
                            priors.b_delta - 1.0, sum_mu_i};
}

ModeInfo mu_conditional_mode(double a, double b, double c) {
    if (!(b > 0.0) || !(c > 0.0)) {
        throw degenerate_conditional_error(
            "mu conditional: b and c must be positive");
    }

    // Stationary point of a*log(m) + b*m + c/m: b m^2 + a m - c = 0.
    const double disc = std::sqrt(a * a + 4.0 * b * c);
    double m = (a >= 0.0) ? 2.0 * c / (a + disc) : (disc - a) / (2.0 * b);
    m = polish_mode(
        m, 0.0, inf, [&](double x) { return a / x + b - c / (x * x); },
        [&](double x) { return -a / (x * x) + 2.0 * c / (x * x * x); });

    const double curvature = -a / (m * m) + 2.0 * c / (m * m * m);
    if (!(m > 0.0) || !(curvature > 0.0) || !std::isfinite(curvature)) {
        throw degenerate_conditional_error(
            "mu conditional: no interior mode with positive curvature");
    }
    return ModeInfo{m, curvature};
}

ProposalSpec make_mu_candidate(ProposalFamily family, const ModeInfo& info) {
    const double m = info.mode;
    const double g2 = info.curvature;

    ProposalSpec spec;
    spec.family = family;
    spec.mode = m;
    spec.curvature = g2;
    switch (family) {
    case ProposalFamily::inverse_gamma: {
        const double scale = g2 * m * m * m;
        const double shape = scale / m - 1.0;
        if (!(shape > 0.0)) {
            throw degenerate_conditional_error(
                "inverse gamma candidate: matched shape not positive");
        }
        spec.par1 = shape;
        spec.par2 = scale;
        return spec;
    }
    case ProposalFamily::log_normal: {
        const double sigma2 = 1.0 / (g2 * m * m);
        spec.par1 = std::log(m) + sigma2;
        spec.par2 = std::sqrt(sigma2);
        return spec;
    }
    case ProposalFamily::gamma: {
        spec.par1 = g2 * m * m + 1.0;
        spec.par2 = g2 * m;
        return spec;
    }
    default:
        throw parameter_error("make_mu_candidate: unsupported family");
    }
}

std::vector<ProposalSpec> mu_proposal_candidates(double a, double b, double c) {
    const ModeInfo info = mu_conditional_mode(a, b, c);
    std::vector<ProposalSpec> candidates;
    candidates.reserve(3);
    try {
        candidates.push_back(
            make_mu_candidate(ProposalFamily::inverse_gamma, info));
    } catch (const degenerate_conditional_error&) {
        // Shape would be non-positive; skip this family.
    }
    candidates.push_back(make_mu_candidate(ProposalFamily::log_normal, info));
    candidates.push_back(make_mu_candidate(ProposalFamily::gamma, info));
    return candidates;
}

double kl_divergence(const MuConditional& target, const ModeInfo& info,
                     const ProposalSpec& candidate) {
    constexpr int n_intervals = 2048;

    const double m = info.mode;
    const double sigma = 1.0 / std::sqrt(info.curvature);
    const double lo = std::max(m - 12.0 * sigma, m * 1e-9);
    const double hi = m + 12.0 * sigma;
    const double h = (hi - lo) / n_intervals;
    const double g_ref = target.neg_log_density(m);

    // Trapezoid pass: normalizing constant, entropy term and cross term.
    double z = 0.0;
    double t_log_t = 0.0;
    double t_log_q = 0.0;
    for (int i = 0; i <= n_intervals; ++i) {
        const double x = lo + h * i;
        const double log_t = -(target.neg_log_density(x) - g_ref);
        const double t = std::exp(log_t);
        const double w = (i == 0 || i == n_intervals) ? 0.5 : 1.0;
        const double log_q = candidate.log_density(x);
        z += w * t;
        t_log_t += w * t * log_t;
        // Outside the candidate support t is already negligible here.
        if (t > 0.0 && std::isfinite(log_q)) {
            t_log_q += w * t * log_q;
        } else if (t > 1e-290) {
            return inf;
        }
    }
    z *= h;
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw degenerate_conditional_error(
            "kl_divergence: non-finite quadrature");
    }
    const double kl = t_log_t * h / z - std::log(z) - t_log_q * h / z;
    if (!std::isfinite(kl)) {
        throw degenerate_conditional_error(
            "kl_divergence: non-finite quadrature");
    }
    return kl;
}

ProposalSpec kl_select(const MuConditional& target,
                       const std::vector<ProposalSpec>& candidates) {
    if (candidates.empty()) {
        throw degenerate_conditional_error("kl_select: no candidates");
    }
    const ModeInfo info{candidates.front().mode, candidates.front().curvature};
    double best_kl = inf;
    const ProposalSpec* best = nullptr;
    for (const ProposalSpec& candidate : candidates) {
        const double kl = kl_divergence(target, info, candidate);
        if (kl < best_kl) {
            best_kl = kl;
            best = &candidate;
        }
    }
    if (best == nullptr) {
        throw degenerate_conditional_error(
            "kl_select: no candidate with finite divergence");
    }
    return *best;
}

ProposalSpec build_mu_proposal(double a, double b, double c) {
    return kl_select(MuConditional{a, b, c}, mu_proposal_candidates(a, b, c));
}

ProposalSpec build_delta_proposal(double a, double b, double c) {
    if (!(c > 0.0)) {
        throw parameter_error("build_delta_proposal: c must be positive");
    }

    if (a == 0.0 && b == 0.0) {
        // Conditional is Exponential(c) truncated to (0,1); sampled exactly.
        ProposalSpec spec;
        spec.family = ProposalFamily::exact;
        spec.par1 = c;
        return spec;
    }
    if (a <= 0.0) {
        throw boundary_mode_error(
            "delta conditional: mode on the boundary of (0,1)");
    }

    // Stationary points of -a log(d) - b log(1-d) + c d solve
    // c d^2 - (a+b+c) d + a = 0.
    const double s = a + b + c;
    const double disc = s * s - 4.0 * a * c;
    if (!(disc >= 0.0)) {
        throw boundary_mode_error("delta conditional: no interior mode");
    }
    const double root = std::sqrt(disc);
    const double r1 = (s > 0.0) ? 2.0 * a / (s + root) : (s - root) / (2.0 * c);
    const double r2 = (s + root) / (2.0 * c);

    double m = 0.0;
    double g2 = 0.0;
    bool found = false;
    for (double candidate : {r1, r2}) {
        if (!(candidate > 0.0) || !(candidate < 1.0)) continue;
        const double curv = a / (candidate * candidate) +
                            b / ((1.0 - candidate) * (1.0 - candidate));
        if (curv > 0.0) {
            m = candidate;
            g2 = curv;
            found = true;
            break;
        }
    }
    if (!found) {
        throw boundary_mode_error("delta conditional: no interior mode");
    }

    m = polish_mode(
        m, 0.0, 1.0,
        [&](double d) { return -a / d + b / (1.0 - d) + c; },
        [&](double d) { return a / (d * d) + b / ((1.0 - d) * (1.0 - d)); });
    g2 = a / (m * m) + b / ((1.0 - m) * (1.0 - m));

    ProposalSpec spec;
    spec.family = ProposalFamily::beta;
    spec.par1 = (1.0 - m) * m * m * g2 + 1.0;
    spec.par2 = m * (1.0 - m) * (1.0 - m) * g2 + 1.0;
    spec.mode = m;
    spec.curvature = g2;
    return spec;
}

} // namespace eggkit
