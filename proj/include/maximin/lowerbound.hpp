#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "maximin/env.hpp"
#include "maximin/instance.hpp"

namespace maximin {

// KL divergence between unit-variance Gaussians: (m - m')^2 / 2.
double kl_gaussian(double mean_a, double mean_b);

// Bretagnolle-Huber floor on the two-point error sum: (1/2) exp(-kl).
double bh_floor(double kl);

// Flipping family for the single-level best-arm warm-up: base instance has
// arm 0 at 1/2 and arm i at 1/2 - d_i; alternative i flips arm i to
// 1/2 + d_i. H(alt_i) <= H(base) for every i.
struct flip_family {
    std::vector<double> base_means;
    std::vector<std::vector<double>> alt_means; // alt_means[i-1] flips arm i
    double h_base = 0.0;
    std::vector<double> h_alts;
};

// Sum-of-inverse-squared-gaps complexity of a flat arm set with a unique best.
double bai_complexity(const std::vector<double>& means);

flip_family build_flip_family(const std::vector<double>& d);

// One shifted instance of the critical-leaf family: shifting a competitor's
// whole subtree up by twice its gap, or one non-minimizing leaf of the
// optimal subtree down by twice its gap. Either way subtree 0 stops being
// optimal while the complexity grows by at most 4x.
struct alternative_instance {
    leaf_id critical;          // in the base instance's (canonical) labels
    max_min_instance shifted;  // same labeling as the base
    int optimal_subtree = -1;
    double h = 0.0;            // H(shifted) = sum of 1/gap^2 over its leaves
    matrix gaps_in_base_labels; // shifted-instance gaps mapped to base labels
    // verification of the complexity-class bounds: the smallest ratio of a
    // shifted gap to its base gap, and H(shifted) / H(base)
    double min_gap_ratio = 0.0;
    double h_ratio = 0.0;
};

struct alternative_family {
    max_min_instance base;
    double h_base = 0.0;
    double h_lb_base = 0.0;
    std::vector<alternative_instance> alternatives;
};

// Builds the (K-1) + (L-1) alternatives around a canonical Gaussian base
// with a unique optimum, verifying per-alternative optimality flip, the
// leafwise half-gap bound and membership in the 4x complexity class.
alternative_family build_alt_family(const max_min_instance& base);

// Guaranteed error floor somewhere in the 4x complexity class:
// (1/4) exp(-2 T / H_lb(base)).
double lb_exponent(const max_min_instance& base, std::int64_t budget);

// Realized log-likelihood-ratio of a transcript between two Gaussian
// instances (lhs) next to the pull-count KL budget (rhs). Their expectations
// agree under the base instance.
std::pair<double, double> kl_budget_identity(const max_min_instance& base,
                                             const max_min_instance& alt, const transcript& tr);

// The known-grouping (2,2) comparison: flattened four-arm complexity against
// the grouped tree complexity 1 + 3 rho^-2; their ratio vanishes as rho -> 0.
struct counterexample_22_result {
    double h1_flatten = 0.0;
    double h1_tree = 0.0;
    double ratio = 0.0;
};

counterexample_22_result counterexample_22(double rho);

// Relabels subtrees by sigma0 and the leaves of each (new) subtree i by
// sigmas[i]: output leaf (i, j) takes the distribution of input leaf
// (sigma0[i], sigmas[i][j]). The maximin value is invariant.
max_min_instance subtree_preserving_permute(const max_min_instance& inst,
                                            const std::vector<int>& sigma0,
                                            const std::vector<std::vector<int>>& sigmas);

} // namespace maximin
