#pragma once

#include <stdexcept>
#include <string>

namespace ceit {

// invalid physical parameters, or an evaluation outside the model's domain
struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 1 + Theta (+ Theta_s) landed on the closed negative real axis of the
// principal log. Carries the offending detuning.
struct branch_cut_error : model_error {
    double delta;
    explicit branch_cut_error(double d)
        : model_error("principal log branch cut: 1 + Theta (+ Theta_s) on the closed "
                      "negative real axis at delta = " + std::to_string(d) + " Hz"),
          delta(d) {}
};

// adaptive quadrature failed to reach the requested tolerance
struct quadrature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// steady-state linear system condition estimate exceeded the trust threshold
struct singular_system_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// feature extraction could not locate the requested feature
struct feature_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ceit
