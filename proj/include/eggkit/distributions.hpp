#pragma once

#include <cstdint>

#include "eggkit/rng.hpp"

namespace eggkit {

// Random sampling and log-density kernels for the distribution families
// the model needs. Gamma is parameterized by (shape, rate) so the mean is
// shape/rate; all samplers are deterministic given the stream.

double sample_gamma(double shape, double rate, RngStream& rng);
double sample_beta(double a, double b, RngStream& rng);
std::int64_t sample_poisson(double mean, RngStream& rng);

// lower + Poisson(mean); support starts at `lower`.
std::int64_t sample_displaced_poisson(std::int64_t lower, double mean,
                                      RngStream& rng);
std::int64_t sample_binomial(std::int64_t size, double p, RngStream& rng);

// Quantile of Student's t with df degrees of freedom.
double t_quantile(double prob, int df);

// Normalized log densities / pmfs; -inf outside the support.
double log_pmf_poisson(double mean, std::int64_t x);
double log_pmf_binomial(std::int64_t size, double p, std::int64_t x);
double log_pdf_gamma(double shape, double rate, double x);
double log_pdf_beta(double a, double b, double x);
double log_pdf_inverse_gamma(double shape, double scale, double x);
double log_pdf_log_normal(double location, double scale, double x);

enum class DistFamily {
    poisson,       // p1 = mean
    binomial,      // p1 = size, p2 = success probability
    gamma,         // p1 = shape, p2 = rate
    beta,          // p1, p2 = shape parameters
    inverse_gamma, // p1 = shape, p2 = scale
    log_normal,    // p1 = location, p2 = scale
};

struct DistSpec {
    DistFamily family;
    double p1 = 0.0;
    double p2 = 0.0;
};

double log_density(const DistSpec& dist, double x);

} // namespace eggkit
