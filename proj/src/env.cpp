#include "maximin/env.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <json.hpp>

#include "maximin/errors.hpp"
#include "maximin/rng.hpp"

namespace maximin {

std::string to_string(elimination_kind k) {
    return k == elimination_kind::subtree ? "subtree" : "single-leaf";
}

double transcript::empirical_mean(int i, int j) const {
    if (pulls(i, j) <= 0) throw unavailable_mean_error("empirical mean of an unpulled leaf");
    return sums(i, j) / static_cast<double>(pulls(i, j));
}

std::string transcript::to_json() const {
    nlohmann::json doc;
    doc["k"] = pulls.rows();
    doc["l"] = pulls.cols();
    doc["budget"] = budget;
    doc["spent"] = spent;
    doc["pulls"] = pulls.nested();
    doc["sums"] = sums.nested();
    doc["recommendation"] = recommendation;
    doc["loop_bound_hit"] = loop_bound_hit;
    doc["phase_log"] = nlohmann::json::array();
    for (const auto& ev : phase_log) {
        nlohmann::json entry;
        entry["phase"] = ev.phase;
        entry["kind"] = to_string(ev.kind);
        entry["leaves"] = nlohmann::json::array();
        for (const auto& leaf : ev.eliminated)
            entry["leaves"].push_back({leaf.subtree, leaf.leaf});
        doc["phase_log"].push_back(std::move(entry));
    }
    return doc.dump(2);
}

double sample_reward(noise_family family, double mean, std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t leaf_index, std::uint64_t pull_index) {
    switch (family) {
        case noise_family::none:
            return mean;
        case noise_family::bernoulli: {
            // +/- 1 coin: range 2, variance proxy 1 by Hoeffding
            std::uint64_t h = counter_hash(seed, stream, leaf_index, pull_index);
            return mean + ((h & 1) ? 1.0 : -1.0);
        }
        case noise_family::gaussian: {
            double u1 = counter_uniform(seed, stream, leaf_index, 2 * pull_index);
            double u2 = counter_uniform(seed, stream, leaf_index, 2 * pull_index + 1);
            double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            return mean + z;
        }
    }
    return mean;
}

environment::environment(max_min_instance inst, std::int64_t budget, std::uint64_t seed,
                         std::uint64_t stream)
    : inst_(std::move(inst)), budget_(budget), seed_(seed), stream_(stream) {
    if (budget < 0) throw invalid_budget_error("negative budget");
    transcript_.pulls = grid<std::int64_t>(inst_.num_subtrees(), inst_.num_leaves(), 0);
    transcript_.sums = matrix(inst_.num_subtrees(), inst_.num_leaves(), 0.0);
    transcript_.budget = budget;
}

double environment::pull(int i, int j) {
    if (i < 0 || i >= inst_.num_subtrees() || j < 0 || j >= inst_.num_leaves())
        throw invalid_argument_error("pull: leaf index out of range");
    if (spent_ >= budget_) throw budget_exceeded_error("pull past the budget");
    std::uint64_t leaf_index =
        static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(inst_.num_leaves()) +
        static_cast<std::uint64_t>(j);
    std::uint64_t pull_index = static_cast<std::uint64_t>(transcript_.pulls(i, j));
    double reward =
        sample_reward(inst_.noise(), inst_.mean(i, j), seed_, stream_, leaf_index, pull_index);
    transcript_.pulls(i, j) += 1;
    transcript_.sums(i, j) += reward;
    spent_ += 1;
    transcript_.spent = spent_;
    return reward;
}

void environment::log_phase(std::int64_t phase, elimination_kind kind,
                            std::vector<leaf_id> eliminated) {
    transcript_.phase_log.push_back({phase, kind, std::move(eliminated)});
}

void environment::set_recommendation(int subtree) {
    if (transcript_.recommendation != -1)
        throw inconsistency_error("recommendation set twice");
    if (subtree < 0 || subtree >= inst_.num_subtrees())
        throw invalid_argument_error("recommendation out of range");
    transcript_.recommendation = subtree;
}

void environment::flag_loop_bound_hit() { transcript_.loop_bound_hit = true; }

const transcript& environment::result() const { return transcript_; }

transcript environment::take_result() { return std::move(transcript_); }

} // namespace maximin
