#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maximin/env.hpp"
#include "maximin/instance.hpp"

namespace maximin {

// Surviving-leaf structure: the active leaves, the per-subtree views and the
// set of subtrees that still own at least one active leaf.
class active_set {
  public:
    active_set(int num_subtrees, int num_leaves);

    int num_subtrees() const { return flags_.rows(); }
    int num_leaves() const { return flags_.cols(); }

    bool active(int i, int j) const { return flags_(i, j) != 0; }
    int subtree_count(int i) const { return per_subtree_[i]; }
    int total_active() const { return total_; }
    int num_active_subtrees() const { return active_subtree_count_; }

    std::vector<int> active_leaves(int i) const;  // leaf indices of subtree i
    std::vector<int> active_subtrees() const;     // subtrees with a live leaf

    void remove(leaf_id leaf);

  private:
    grid<char> flags_;
    std::vector<int> per_subtree_;
    int total_ = 0;
    int active_subtree_count_ = 0;
};

// Harmonic phase schedule shared by successive-rejects style procedures:
// n_k = ceil(((budget - N) / log_bar(N)) / (N + 1 - k)) for k = 1..N-1,
// with log_bar(N) = 1/2 + sum_{r=2}^{N} 1/r.
struct phase_schedule {
    std::int64_t num_arms = 0;
    std::int64_t budget = 0;
    double log_bar = 0.0;
    std::vector<std::int64_t> counts; // counts[k-1] is n_k

    std::int64_t n(std::int64_t k) const { return counts.at(static_cast<std::size_t>(k - 1)); }
    // sum_{k=1}^{N-2} n_k + 2 n_{N-1}, the single-elimination worst case
    std::int64_t worst_case_total() const;
};

double log_bar(std::int64_t num_arms);
phase_schedule harmonic_schedule(std::int64_t num_arms, std::int64_t budget);
phase_schedule compute_phase_schedule(int num_subtrees, int num_leaves, std::int64_t budget);

// Snapshot of the per-phase empirical quantities: minimizing leaf per
// subtree, best subtree, maximin value and the empirical gaps.
struct empirical_state {
    matrix hat_mu;             // meaningful at active leaves only
    std::vector<int> min_leaf; // empirical minimizer per subtree, -1 if empty
    int best_subtree = -1;
    double best_value = 0.0;     // empirical maximin value
    double runner_up_value = 0.0; // max over competitors of their min value
    matrix gaps;                 // meaningful at active leaves only
    double gap_max = 0.0;
};

empirical_state compute_empirical_state(const active_set& active, const matrix& hat_mu);

struct elimination_choice {
    elimination_kind kind = elimination_kind::single_leaf;
    std::vector<leaf_id> leaves;
};

// The elimination rule: remove a whole competitor subtree when all of its
// active leaves attain the maximal empirical gap, otherwise remove one
// largest-gap leaf. All ties break to the lowest index.
elimination_choice choose_elimination(const active_set& active, const empirical_state& state);

// Successive Rejects for (K,L) max-min trees: phase-based elimination over
// the harmonic schedule with the subtree-vs-leaf rule above. Requires
// KL >= 2 and budget > KL.
transcript sr_mcts(environment& env);

// Spreads the budget as evenly as possible over all leaves and recommends
// the empirical maximin subtree. Requires budget >= KL.
transcript uniform_baseline(environment& env);

// One candidate minimizing leaf per subtree plus its empirical mean on the
// original (un-negated) rewards.
struct sar_candidates {
    std::vector<int> leaf;
    std::vector<double> mean;
};

// Successive Accepts and Rejects over all KL leaves, treating each subtree
// as one bandit on negated rewards. Each phase tops active arms up to n_k,
// rejects the globally largest-gap arm, and accepts (freezes) the last
// active arm of any bandit. Requires budget > KL.
sar_candidates multibandit_sar(environment& env, std::int64_t budget);

// Runs multibandit_sar with the full budget and recommends the subtree with
// the largest candidate mean.
transcript bottom_up_sar(environment& env);

// Stage 1: multibandit_sar with floor(alpha * T); stage 2: classic
// Successive Rejects over the K candidate leaves with the remaining budget,
// on original rewards. Requires floor(alpha*T) > KL and T - floor(alpha*T) > K.
transcript sar_compare(environment& env, double alpha = 0.8);

// Classic Successive Rejects over an explicit arm list: tops survivors up to
// n_k each phase and removes the empirically worst arm (never the current
// empirical best). Pulls and elimination events go through env; empirical
// means use only the pulls made here. Returns the surviving arm.
leaf_id sr_classic(const std::vector<leaf_id>& arms, environment& env, std::int64_t budget);

// Classic Successive Rejects with one arm per subtree: an arm's value is
// the empirical min over its leaves and its phase top-ups are spread
// round-robin across the leaves. Coincides with classic SR when L = 1.
transcript sr_classic_tree(environment& env);

enum class algorithm_id { sr_mcts, uniform, bottom_up_sar, sar_compare, sr_classic };

algorithm_id algorithm_from_string(const std::string& name);
std::string to_string(algorithm_id id);
std::vector<std::string> algorithm_names();
transcript run_algorithm(algorithm_id id, environment& env, double alpha = 0.8);

// Per-phase epsilon-soundness (test-only oracle access to the true means):
// early phases must keep the optimal subtree alive and every eps/2-good
// subtree anchored by its true minimizer; late phases relax to the
// eps-bad/eps/2-good endgame conditions.
struct phase_soundness {
    std::int64_t phase = 0;
    bool early = true; // phase <= KL - m
    std::optional<bool> cond1, cond2, cond3, cond4, cond5;
    bool sound = true;
};

struct soundness_report {
    std::vector<phase_soundness> phases;
    bool all_sound = true;
};

soundness_report check_soundness(const max_min_instance& true_inst, const eps_summary& summary,
                                 const transcript& tr, double eps);

} // namespace maximin
