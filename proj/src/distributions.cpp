#include "eggkit/distributions.hpp"

#include <cmath>
#include <limits>

#include "eggkit/errors.hpp"
#include "eggkit/special.hpp"

namespace eggkit {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Poisson sampler for mean >= 10: Hoermann's transformed rejection (PTRS).
std::int64_t poisson_ptrs(double mean, RngStream& rng) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = rng.uniform() - 0.5;
        const double v = rng.uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::int64_t>(kf);
        }
        if (kf < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * loglam - mean - std::lgamma(kf + 1.0)) {
            return static_cast<std::int64_t>(kf);
        }
    }
}

} // namespace

double sample_gamma(double shape, double rate, RngStream& rng) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw parameter_error("sample_gamma: shape and rate must be positive");
    }

    // Marsaglia-Tsang squeeze; shapes below one are boosted via the
    // power-of-uniform identity Gamma(k) = Gamma(k+1) * U^(1/k).
    double boost = 1.0;
    double k = shape;
    if (k < 1.0) {
        boost = std::pow(rng.uniform_pos(), 1.0 / k);
        k += 1.0;
    }

    const double d = k - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    double sample = 0.0;
    for (;;) {
        double x, v;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform_pos();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            sample = d * v;
            break;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            sample = d * v;
            break;
        }
    }

    sample = boost * sample / rate;
    if (!(sample > 0.0)) {
        // Underflow for very small shapes; keep the draw inside the support.
        sample = std::numeric_limits<double>::min();
    }
    return sample;
}

double sample_beta(double a, double b, RngStream& rng) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw parameter_error("sample_beta: both shape parameters must be positive");
    }
    const double x = sample_gamma(a, 1.0, rng);
    const double y = sample_gamma(b, 1.0, rng);
    double r = x / (x + y);
    if (r <= 0.0) r = std::numeric_limits<double>::min();
    if (r >= 1.0) r = std::nextafter(1.0, 0.0);
    return r;
}

std::int64_t sample_poisson(double mean, RngStream& rng) {
    if (!(mean >= 0.0)) {
        throw parameter_error("sample_poisson: mean must be non-negative");
    }
    if (mean == 0.0) return 0;

    if (mean < 10.0) {
        // CDF inversion.
        double p = std::exp(-mean);
        double cum = p;
        const double u = rng.uniform();
        std::int64_t k = 0;
        while (u > cum && k < 500) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }
    return poisson_ptrs(mean, rng);
}

std::int64_t sample_displaced_poisson(std::int64_t lower, double mean,
                                      RngStream& rng) {
    if (lower < 0) {
        throw parameter_error("sample_displaced_poisson: lower must be non-negative");
    }
    return lower + sample_poisson(mean, rng);
}

std::int64_t sample_binomial(std::int64_t size, double p, RngStream& rng) {
    if (size < 0) {
        throw parameter_error("sample_binomial: size must be non-negative");
    }
    if (!(p >= 0.0) || !(p <= 1.0)) {
        throw parameter_error("sample_binomial: p must lie in [0,1]");
    }
    if (size == 0 || p == 0.0) return 0;
    if (p == 1.0) return size;
    if (p > 0.5) return size - sample_binomial(size, 1.0 - p, rng);

    const double np = static_cast<double>(size) * p;
    if (np <= 30.0) {
        // CDF inversion with the pmf recurrence.
        const double r = p / (1.0 - p);
        double f = std::exp(static_cast<double>(size) * std::log1p(-p));
        double cum = f;
        const double u = rng.uniform();
        std::int64_t k = 0;
        while (u > cum && k < size) {
            ++k;
            f *= r * static_cast<double>(size - k + 1) / static_cast<double>(k);
            cum += f;
        }
        return k;
    }

    // Large mean: direct Bernoulli count, exact and O(size).
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < size; ++i) {
        count += rng.uniform() < p;
    }
    return count;
}

double t_quantile(double prob, int df) {
    if (!(prob > 0.0) || !(prob < 1.0)) {
        throw parameter_error("t_quantile: prob must lie in (0,1)");
    }
    if (df < 1) {
        throw parameter_error("t_quantile: df must be at least 1");
    }
    if (prob == 0.5) return 0.0;
    if (prob < 0.5) return -t_quantile(1.0 - prob, df);

    // For t > 0: P(T <= t) = 1 - I_x(df/2, 1/2)/2 with x = df/(df + t^2),
    // so invert the regularized incomplete beta by bisection.
    const double target = 2.0 * (1.0 - prob);
    const double half_df = 0.5 * static_cast<double>(df);
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 240; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (reg_inc_beta(half_df, 0.5, mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= hi * 1e-17) break;
    }
    const double x = 0.5 * (lo + hi);
    return std::sqrt(static_cast<double>(df) * (1.0 - x) / x);
}

double log_pmf_poisson(double mean, std::int64_t x) {
    if (!(mean >= 0.0)) {
        throw parameter_error("log_pmf_poisson: mean must be non-negative");
    }
    if (x < 0) return neg_inf;
    if (mean == 0.0) return x == 0 ? 0.0 : neg_inf;
    const double xd = static_cast<double>(x);
    return xd * std::log(mean) - mean - std::lgamma(xd + 1.0);
}

double log_pmf_binomial(std::int64_t size, double p, std::int64_t x) {
    if (size < 0 || !(p >= 0.0) || !(p <= 1.0)) {
        throw parameter_error("log_pmf_binomial: invalid parameters");
    }
    if (x < 0 || x > size) return neg_inf;
    if (p == 0.0) return x == 0 ? 0.0 : neg_inf;
    if (p == 1.0) return x == size ? 0.0 : neg_inf;
    const double n = static_cast<double>(size);
    const double k = static_cast<double>(x);
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
           k * std::log(p) + (n - k) * std::log1p(-p);
}

double log_pdf_gamma(double shape, double rate, double x) {
    if (!(shape > 0.0) || !(rate > 0.0)) {
        throw parameter_error("log_pdf_gamma: shape and rate must be positive");
    }
    if (!(x > 0.0)) return neg_inf;
    return shape * std::log(rate) - std::lgamma(shape) +
           (shape - 1.0) * std::log(x) - rate * x;
}

double log_pdf_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw parameter_error("log_pdf_beta: both shape parameters must be positive");
    }
    if (!(x > 0.0) || !(x < 1.0)) return neg_inf;
    return -log_beta_fn(a, b) + (a - 1.0) * std::log(x) +
           (b - 1.0) * std::log1p(-x);
}

double log_pdf_inverse_gamma(double shape, double scale, double x) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw parameter_error("log_pdf_inverse_gamma: shape and scale must be positive");
    }
    if (!(x > 0.0)) return neg_inf;
    return shape * std::log(scale) - std::lgamma(shape) -
           (shape + 1.0) * std::log(x) - scale / x;
}

double log_pdf_log_normal(double location, double scale, double x) {
    if (!(scale > 0.0)) {
        throw parameter_error("log_pdf_log_normal: scale must be positive");
    }
    if (!(x > 0.0)) return neg_inf;
    const double z = (std::log(x) - location) / scale;
    return -std::log(x) - std::log(scale) - 0.5 * std::log(2.0 * M_PI) -
           0.5 * z * z;
}

double log_density(const DistSpec& dist, double x) {
    switch (dist.family) {
    case DistFamily::poisson:
        return log_pmf_poisson(dist.p1, static_cast<std::int64_t>(std::llround(x)));
    case DistFamily::binomial:
        return log_pmf_binomial(static_cast<std::int64_t>(std::llround(dist.p1)),
                                dist.p2,
                                static_cast<std::int64_t>(std::llround(x)));
    case DistFamily::gamma:
        return log_pdf_gamma(dist.p1, dist.p2, x);
    case DistFamily::beta:
        return log_pdf_beta(dist.p1, dist.p2, x);
    case DistFamily::inverse_gamma:
        return log_pdf_inverse_gamma(dist.p1, dist.p2, x);
    case DistFamily::log_normal:
        return log_pdf_log_normal(dist.p1, dist.p2, x);
    }
    throw parameter_error("log_density: unknown family");
}

} // namespace eggkit
