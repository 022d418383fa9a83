#pragma once

#include <stdexcept>
#include <string>

namespace eggkit {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Distribution or model parameter outside its domain.
struct parameter_error : error {
    using error::error;
};

// FECR point estimate undefined (zero pre-treatment mean).
struct undefined_estimate_error : error {
    using error::error;
};

// A full conditional has no interior mode to match a proposal against.
struct degenerate_conditional_error : error {
    using error::error;
};

// The reduction conditional has its mode on the boundary of (0,1).
struct boundary_mode_error : error {
    using error::error;
};

struct insufficient_samples_error : error {
    using error::error;
};

// Malformed or unreadable input data.
struct ingestion_error : error {
    using error::error;
};

} // namespace eggkit
