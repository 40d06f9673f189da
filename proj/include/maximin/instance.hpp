#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "maximin/matrix.hpp"

namespace maximin {

enum class noise_family {
    gaussian,  // unit-variance Gaussian
    bernoulli, // mean +/- 1 coin flip (range 2, hence 1-sub-Gaussian)
    none,      // reward == mean; debug sampler for exact trajectory tests
};

std::string to_string(noise_family f);
noise_family noise_from_string(const std::string& s);

struct leaf_id {
    int subtree = 0;
    int leaf = 0;
    bool operator==(const leaf_id&) const = default;
};

// A depth-2 max-min tree: K subtrees with L leaves each. The value of
// subtree i is the minimum of its leaf means; the target is the subtree
// maximizing that value. Immutable after construction.
class max_min_instance {
  public:
    max_min_instance() = default;
    max_min_instance(matrix means, noise_family noise = noise_family::gaussian);

    int num_subtrees() const { return means_.rows(); }
    int num_leaves() const { return means_.cols(); }
    int num_arms() const { return means_.rows() * means_.cols(); }

    double mean(int i, int j) const { return means_(i, j); }
    const matrix& means() const { return means_; }
    noise_family noise() const { return noise_; }

    // min_j mu_{i,j}
    double min_value(int i) const;
    // leaf index attaining min_value(i), lowest index on ties
    int min_leaf(int i) const;
    // max_i min_j mu_{i,j}
    double maximin_value() const;
    // subtree attaining the maximin value, lowest index on ties
    int optimal_subtree() const;

    // true when both ordering chains hold: rows nondecreasing left to right,
    // first column nonincreasing top to bottom
    bool is_canonical() const;
    // canonical and (for K >= 2) strictly better first subtree
    bool has_unique_optimum() const;

  private:
    matrix means_;
    noise_family noise_ = noise_family::gaussian;
};

// Records the reindexing that turned a raw instance into canonical form:
// canonical leaf (c, j) corresponds to raw leaf
// (subtree_perm[c], leaf_perms[c][j]).
struct canonical_map {
    std::vector<int> subtree_perm;
    std::vector<std::vector<int>> leaf_perms;

    static canonical_map identity(int num_subtrees, int num_leaves);

    int subtree_to_raw(int canonical_subtree) const;
    int subtree_to_canonical(int raw_subtree) const;
    leaf_id leaf_to_raw(leaf_id canonical) const;
    leaf_id leaf_to_canonical(leaf_id raw) const;

    bool is_identity() const;
};

struct gap_entry {
    double gap = 0.0;
    leaf_id source;
};

// Leafwise gaps of a canonical instance plus their sorted order. sorted is
// nondecreasing; ties keep row-major source order.
struct gap_table {
    matrix gaps;
    std::vector<gap_entry> sorted;
};

// Definition-level epsilon summary: the epsilon-good subtree set and the
// derived complexity quantities. delta_star/m/h2 are absent in the trivial
// regime where every subtree is epsilon-good.
struct eps_summary {
    double eps = 0.0;
    std::vector<int> good_set; // 0-based subtree indices, ascending
    int num_good = 0;
    bool trivial = false; // good_set == all subtrees
    std::optional<double> delta_star;
    std::optional<int> m;
    std::optional<double> h2;
    double h1 = 0.0;
};

// Reorders a raw mean matrix into canonical form and returns the map back to
// raw labels. Throws invalid_instance_error on empty/ragged/non-finite input.
std::pair<max_min_instance, canonical_map> canonicalize(const matrix& raw,
                                                        noise_family noise = noise_family::gaussian);

// Applies the inverse of `map` to a canonical instance, recovering the raw
// labeling the map was derived from.
max_min_instance apply_inverse(const max_min_instance& canonical, const canonical_map& map);

// Leafwise gaps of a canonical instance. For the optimal subtree the gap of
// leaf j is mu_{0,j} - mu_{1,0}; elsewhere it is
// max(mu_{0,0} - mu_{i,0}, mu_{i,j} - mu_{i,0}). Requires a unique optimal
// subtree (degenerate_instance_error otherwise). A single-subtree instance
// has no competitor; its gaps are +infinity by convention.
gap_table compute_gap_table(const max_min_instance& inst);

// Evaluates the epsilon-indexed quantities on a precomputed gap table.
eps_summary compute_eps_summary(const max_min_instance& inst, const gap_table& table, double eps);

// Lower-bound complexity: sum over competitor minima plus the optimal
// subtree's non-minimizing leaves of 1/gap^2.
double h_lb(const max_min_instance& inst, const gap_table& table);

enum class gen_variant { structured, random };

struct generated_instance {
    max_min_instance canonical;
    canonical_map map;
    max_min_instance raw; // the labeling algorithms actually run on
};

// Builds the experiment instances: subtree minima evenly spaced from 0 down
// to -0.18, remaining leaves drawn from [min, min + 0.04] (structured) or
// [min, 1] (random). `evenly_spaced` replaces the structured draw with a
// deterministic evenly spaced assignment. Deterministic given seed.
generated_instance gen_experiment_instance(int num_subtrees, int num_leaves, gen_variant variant,
                                           std::uint64_t seed, bool evenly_spaced = false,
                                           noise_family noise = noise_family::gaussian);

// Instance file round trip (JSON document with fields k, l, means, noise).
std::string instance_to_json(const max_min_instance& inst);
max_min_instance instance_from_json(const std::string& text);
void write_instance_file(const max_min_instance& inst, const std::string& path);
max_min_instance read_instance_file(const std::string& path);

} // namespace maximin
