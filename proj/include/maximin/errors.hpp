#pragma once

#include <stdexcept>
#include <string>

namespace maximin {

// Error taxonomy shared by the library and the CLI. Every class carries a
// human-readable message; the CLI maps any of these to a nonzero exit code.

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A mean matrix that cannot form an instance (empty, ragged, non-finite).
struct invalid_instance_error : error {
    using error::error;
};

// Analysis requested on an instance without a unique optimal subtree.
struct degenerate_instance_error : error {
    using error::error;
};

// Bad scalar/vector argument (out-of-range parameter, malformed permutation).
struct invalid_argument_error : error {
    using error::error;
};

// Budget too small for the requested algorithm or schedule.
struct invalid_budget_error : error {
    using error::error;
};

// An algorithm attempted to pull past the environment budget.
struct budget_exceeded_error : error {
    using error::error;
};

// Empirical mean requested for a leaf with zero pulls.
struct unavailable_mean_error : error {
    using error::error;
};

// Transcript does not match the instance it is being checked against.
struct inconsistency_error : error {
    using error::error;
};

// Operation requires a specific reward family (e.g. Gaussian-only tooling).
struct noise_mismatch_error : error {
    using error::error;
};

// Too few usable data points for a fit.
struct insufficient_data_error : error {
    using error::error;
};

// Invalid experiment configuration; message names the offending field.
struct config_error : error {
    using error::error;
};

} // namespace maximin
