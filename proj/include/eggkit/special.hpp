#pragma once

#include <cmath>

namespace eggkit {

inline double log_gamma_fn(double x) { return std::lgamma(x); }

inline double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Regularized incomplete beta I_x(a, b), Lentz continued fraction.
double reg_inc_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x).
double reg_inc_gamma_lower(double a, double x);

} // namespace eggkit
