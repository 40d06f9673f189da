#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maximin/instance.hpp"
#include "maximin/matrix.hpp"

namespace maximin {

enum class elimination_kind { single_leaf, subtree };

std::string to_string(elimination_kind k);

struct phase_event {
    std::int64_t phase = 0; // phase index k at which the elimination happened
    elimination_kind kind = elimination_kind::single_leaf;
    std::vector<leaf_id> eliminated;
};

// Everything observable about one algorithm run: per-leaf pull counts and
// reward sums, the elimination log, and the final recommendation. Immutable
// once the run finishes.
struct transcript {
    grid<std::int64_t> pulls;
    matrix sums;
    std::vector<phase_event> phase_log;
    int recommendation = -1;
    std::int64_t budget = 0;
    std::int64_t spent = 0;
    // set when the phase loop hit its index bound with several subtrees
    // still active and the run fell back to the current empirical best
    bool loop_bound_hit = false;

    std::int64_t pull_count(int i, int j) const { return pulls(i, j); }
    double empirical_mean(int i, int j) const; // throws unavailable_mean_error on zero pulls

    std::string to_json() const;
};

// Fixed-budget sampling protocol around one instance: draws one reward per
// pull from the leaf's distribution, enforces the budget, and accumulates
// the transcript. Single-threaded for the duration of one run; distinct
// environments may run concurrently.
class environment {
  public:
    environment(max_min_instance inst, std::int64_t budget, std::uint64_t seed,
                std::uint64_t stream = 0);

    const max_min_instance& instance() const { return inst_; }
    std::int64_t budget() const { return budget_; }
    std::int64_t spent() const { return spent_; }
    std::int64_t remaining() const { return budget_ - spent_; }

    // one sample from nu_{i,j}; throws budget_exceeded_error past the budget
    double pull(int i, int j);

    void log_phase(std::int64_t phase, elimination_kind kind, std::vector<leaf_id> eliminated);
    void set_recommendation(int subtree);
    void flag_loop_bound_hit();

    const transcript& result() const;
    transcript take_result();

  private:
    max_min_instance inst_;
    std::int64_t budget_;
    std::int64_t spent_ = 0;
    std::uint64_t seed_;
    std::uint64_t stream_;
    transcript transcript_;
};

// The reward draw itself, exposed for tests: pull_index-th sample of a leaf
// with the given mean under the given family, as a pure function of the key.
double sample_reward(noise_family family, double mean, std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t leaf_index, std::uint64_t pull_index);

} // namespace maximin
