#include "maximin/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maximin/errors.hpp"

namespace maximin {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

active_set::active_set(int num_subtrees, int num_leaves)
    : flags_(num_subtrees, num_leaves, 1),
      per_subtree_(num_subtrees, num_leaves),
      total_(num_subtrees * num_leaves),
      active_subtree_count_(num_subtrees) {}

std::vector<int> active_set::active_leaves(int i) const {
    std::vector<int> out;
    out.reserve(per_subtree_[i]);
    for (int j = 0; j < num_leaves(); ++j)
        if (flags_(i, j)) out.push_back(j);
    return out;
}

std::vector<int> active_set::active_subtrees() const {
    std::vector<int> out;
    out.reserve(active_subtree_count_);
    for (int i = 0; i < num_subtrees(); ++i)
        if (per_subtree_[i] > 0) out.push_back(i);
    return out;
}

void active_set::remove(leaf_id leaf) {
    if (!flags_(leaf.subtree, leaf.leaf))
        throw inconsistency_error("removing an inactive leaf");
    flags_(leaf.subtree, leaf.leaf) = 0;
    total_ -= 1;
    per_subtree_[leaf.subtree] -= 1;
    if (per_subtree_[leaf.subtree] == 0) active_subtree_count_ -= 1;
}

double log_bar(std::int64_t num_arms) {
    double s = 0.5;
    for (std::int64_t r = 2; r <= num_arms; ++r) s += 1.0 / static_cast<double>(r);
    return s;
}

phase_schedule harmonic_schedule(std::int64_t num_arms, std::int64_t budget) {
    if (num_arms < 2) throw invalid_argument_error("schedule requires at least 2 arms");
    if (budget <= num_arms)
        throw invalid_budget_error("budget must exceed the number of arms");
    phase_schedule sched;
    sched.num_arms = num_arms;
    sched.budget = budget;
    sched.log_bar = log_bar(num_arms);
    const double a = static_cast<double>(budget - num_arms) / sched.log_bar;
    sched.counts.resize(static_cast<std::size_t>(num_arms - 1));
    for (std::int64_t k = 1; k <= num_arms - 1; ++k)
        sched.counts[static_cast<std::size_t>(k - 1)] =
            static_cast<std::int64_t>(std::ceil(a / static_cast<double>(num_arms + 1 - k)));
    return sched;
}

phase_schedule compute_phase_schedule(int num_subtrees, int num_leaves, std::int64_t budget) {
    return harmonic_schedule(static_cast<std::int64_t>(num_subtrees) * num_leaves, budget);
}

std::int64_t phase_schedule::worst_case_total() const {
    std::int64_t total = 0;
    for (std::size_t idx = 0; idx + 1 < counts.size(); ++idx) total += counts[idx];
    total += 2 * counts.back();
    return total;
}

empirical_state compute_empirical_state(const active_set& active, const matrix& hat_mu) {
    const int k = active.num_subtrees();
    const int l = active.num_leaves();
    empirical_state st;
    st.hat_mu = hat_mu;
    st.min_leaf.assign(k, -1);

    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < l; ++j) {
            if (!active.active(i, j)) continue;
            if (st.min_leaf[i] == -1 || hat_mu(i, j) < hat_mu(i, st.min_leaf[i]))
                st.min_leaf[i] = j;
        }
    }

    st.best_subtree = -1;
    for (int i = 0; i < k; ++i) {
        if (st.min_leaf[i] == -1) continue;
        double v = hat_mu(i, st.min_leaf[i]);
        if (st.best_subtree == -1 || v > st.best_value) {
            st.best_subtree = i;
            st.best_value = v;
        }
    }

    st.runner_up_value = kNegInf;
    for (int i = 0; i < k; ++i) {
        if (i == st.best_subtree || st.min_leaf[i] == -1) continue;
        st.runner_up_value = std::max(st.runner_up_value, hat_mu(i, st.min_leaf[i]));
    }

    st.gaps = matrix(k, l, 0.0);
    st.gap_max = kNegInf;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < l; ++j) {
            if (!active.active(i, j)) continue;
            double g;
            if (i == st.best_subtree) {
                g = hat_mu(i, j) - st.runner_up_value;
            } else {
                double own_min = hat_mu(i, st.min_leaf[i]);
                g = std::max(st.best_value - own_min, hat_mu(i, j) - own_min);
            }
            st.gaps(i, j) = g;
            st.gap_max = std::max(st.gap_max, g);
        }
    }
    return st;
}

elimination_choice choose_elimination(const active_set& active, const empirical_state& state) {
    const int k = active.num_subtrees();
    const int l = active.num_leaves();

    for (int x = 0; x < k; ++x) {
        if (x == state.best_subtree || active.subtree_count(x) == 0) continue;
        bool all_at_max = true;
        for (int j = 0; j < l && all_at_max; ++j)
            if (active.active(x, j) && state.gaps(x, j) != state.gap_max) all_at_max = false;
        if (all_at_max) {
            elimination_choice choice;
            choice.kind = elimination_kind::subtree;
            for (int j = 0; j < l; ++j)
                if (active.active(x, j)) choice.leaves.push_back({x, j});
            return choice;
        }
    }

    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j)
            if (active.active(i, j) && state.gaps(i, j) == state.gap_max)
                return {elimination_kind::single_leaf, {{i, j}}};

    throw inconsistency_error("no eliminable leaf found");
}

namespace {

matrix empirical_means(const environment& env, const active_set& active) {
    const transcript& tr = env.result();
    matrix hat(active.num_subtrees(), active.num_leaves(), 0.0);
    for (int i = 0; i < active.num_subtrees(); ++i)
        for (int j = 0; j < active.num_leaves(); ++j)
            if (active.active(i, j)) hat(i, j) = tr.empirical_mean(i, j);
    return hat;
}

} // namespace

transcript sr_mcts(environment& env) {
    const int k = env.instance().num_subtrees();
    const int l = env.instance().num_leaves();
    const std::int64_t n = static_cast<std::int64_t>(k) * l;
    if (n < 2) throw invalid_argument_error("sr_mcts requires KL >= 2");
    if (env.budget() <= n) throw invalid_budget_error("sr_mcts requires budget > KL");
    // phase top-ups use the transcript's pull counts as their counters
    if (env.spent() != 0) throw inconsistency_error("sr_mcts requires a fresh environment");

    if (k == 1) {
        // single subtree: nothing to identify
        env.set_recommendation(0);
        return env.take_result();
    }

    phase_schedule sched = compute_phase_schedule(k, l, env.budget());
    active_set active(k, l);
    std::int64_t phase = 1;
    int last_best = -1;
    bool recommended = false;

    while (phase <= n - 1) {
        const std::int64_t target = sched.n(phase);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < l; ++j)
                if (active.active(i, j))
                    while (env.result().pull_count(i, j) < target) env.pull(i, j);

        empirical_state state = compute_empirical_state(active, empirical_means(env, active));
        last_best = state.best_subtree;

        elimination_choice choice = choose_elimination(active, state);
        for (const auto& leaf : choice.leaves) active.remove(leaf);
        env.log_phase(phase, choice.kind, choice.leaves);

        if (active.num_active_subtrees() == 1) {
            env.set_recommendation(active.active_subtrees().front());
            recommended = true;
            break;
        }
        phase += static_cast<std::int64_t>(choice.leaves.size());
    }

    if (!recommended) {
        // phase index ran out with several subtrees alive; fall back to the
        // final phase's empirical best and mark the transcript
        env.set_recommendation(last_best);
        env.flag_loop_bound_hit();
    }
    return env.take_result();
}

transcript uniform_baseline(environment& env) {
    const int k = env.instance().num_subtrees();
    const int l = env.instance().num_leaves();
    const std::int64_t n = static_cast<std::int64_t>(k) * l;
    const std::int64_t budget = env.budget();
    if (budget < n) throw invalid_budget_error("uniform baseline requires budget >= KL");

    const std::int64_t base = budget / n;
    const std::int64_t extra = budget % n;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j) {
            std::int64_t want = base + (static_cast<std::int64_t>(i) * l + j < extra ? 1 : 0);
            for (std::int64_t t = 0; t < want; ++t) env.pull(i, j);
        }

    const transcript& tr = env.result();
    int best = 0;
    double best_v = kNegInf;
    for (int i = 0; i < k; ++i) {
        double v = tr.empirical_mean(i, 0);
        for (int j = 1; j < l; ++j) v = std::min(v, tr.empirical_mean(i, j));
        if (v > best_v) {
            best = i;
            best_v = v;
        }
    }
    env.set_recommendation(best);
    return env.take_result();
}

namespace {

enum class arm_state : char { live, rejected, accepted };

} // namespace

sar_candidates multibandit_sar(environment& env, std::int64_t budget) {
    const int k = env.instance().num_subtrees();
    const int l = env.instance().num_leaves();
    const std::int64_t n = static_cast<std::int64_t>(k) * l;
    if (budget <= n) throw invalid_budget_error("multibandit SAR requires budget > KL");

    sar_candidates out;
    out.leaf.assign(k, -1);
    out.mean.assign(k, 0.0);

    if (n == 1) {
        out.leaf[0] = 0;
        out.mean[0] = env.pull(0, 0);
        return out;
    }

    phase_schedule sched = harmonic_schedule(n, budget);
    grid<char> state(k, l, static_cast<char>(arm_state::live));
    grid<std::int64_t> counts(k, l, 0);
    matrix sums(k, l, 0.0);
    std::vector<int> live_in(k, l);
    int unresolved = k;

    auto mean_of = [&](int i, int j) { return sums(i, j) / static_cast<double>(counts(i, j)); };
    auto accept = [&](int i, int j) {
        state(i, j) = static_cast<char>(arm_state::accepted);
        live_in[i] -= 1;
        out.leaf[i] = j;
        out.mean[i] = mean_of(i, j);
        unresolved -= 1;
    };

    for (std::int64_t phase = 1; phase <= n - 1 && unresolved > 0; ++phase) {
        const std::int64_t target = sched.n(phase);
        for (int i = 0; i < k; ++i) {
            if (out.leaf[i] != -1) continue;
            for (int j = 0; j < l; ++j)
                if (state(i, j) == static_cast<char>(arm_state::live))
                    while (counts(i, j) < target) {
                        sums(i, j) += env.pull(i, j);
                        counts(i, j) += 1;
                    }
        }

        // a bandit down to one live arm accepts it (covers L = 1 upfront)
        for (int i = 0; i < k; ++i)
            if (out.leaf[i] == -1 && live_in[i] == 1)
                for (int j = 0; j < l; ++j)
                    if (state(i, j) == static_cast<char>(arm_state::live)) {
                        accept(i, j);
                        break;
                    }
        if (unresolved == 0) break;

        // on negated rewards the best arm of a bandit is its smallest mean;
        // its gap is the runner-up minus it, every other arm's gap is the
        // arm minus the smallest
        double best_gap = kNegInf;
        leaf_id chosen{-1, -1};
        std::vector<int> bandit_best(k, -1);
        for (int i = 0; i < k; ++i) {
            if (out.leaf[i] != -1) continue;
            int min1 = -1;
            for (int j = 0; j < l; ++j) {
                if (state(i, j) != static_cast<char>(arm_state::live)) continue;
                if (min1 == -1 || mean_of(i, j) < mean_of(i, min1)) min1 = j;
            }
            bandit_best[i] = min1;
            double min1_v = mean_of(i, min1);
            bool have2 = false;
            double min2_v = 0.0;
            for (int j = 0; j < l; ++j) {
                if (state(i, j) != static_cast<char>(arm_state::live) || j == min1) continue;
                double v = mean_of(i, j);
                if (!have2 || v < min2_v) {
                    min2_v = v;
                    have2 = true;
                }
            }
            for (int j = 0; j < l; ++j) {
                if (state(i, j) != static_cast<char>(arm_state::live)) continue;
                double g = j == min1 ? min2_v - min1_v : mean_of(i, j) - min1_v;
                if (g > best_gap) {
                    best_gap = g;
                    chosen = {i, j};
                }
            }
        }

        if (chosen.leaf == bandit_best[chosen.subtree]) {
            // the widest gap belongs to a bandit's current best arm: accept
            // it and resolve the whole bandit
            accept(chosen.subtree, chosen.leaf);
        } else {
            state(chosen.subtree, chosen.leaf) = static_cast<char>(arm_state::rejected);
            live_in[chosen.subtree] -= 1;
            if (live_in[chosen.subtree] == 1)
                for (int j = 0; j < l; ++j)
                    if (state(chosen.subtree, j) == static_cast<char>(arm_state::live)) {
                        accept(chosen.subtree, j);
                        break;
                    }
        }
    }

    // phases exhausted: accept each remaining bandit's empirical best
    for (int i = 0; i < k; ++i) {
        if (out.leaf[i] != -1) continue;
        int best = -1;
        for (int j = 0; j < l; ++j) {
            if (state(i, j) != static_cast<char>(arm_state::live)) continue;
            if (best == -1 || mean_of(i, j) < mean_of(i, best)) best = j;
        }
        accept(i, best);
    }
    return out;
}

transcript bottom_up_sar(environment& env) {
    const int k = env.instance().num_subtrees();
    sar_candidates cands = multibandit_sar(env, env.budget());
    int best = 0;
    for (int i = 1; i < k; ++i)
        if (cands.mean[i] > cands.mean[best]) best = i;
    env.set_recommendation(best);
    return env.take_result();
}

leaf_id sr_classic(const std::vector<leaf_id>& arms, environment& env, std::int64_t budget) {
    const std::int64_t n = static_cast<std::int64_t>(arms.size());
    if (n < 2) throw invalid_argument_error("sr_classic requires at least 2 arms");
    if (budget <= n) throw invalid_budget_error("sr_classic requires budget > #arms");

    phase_schedule sched = harmonic_schedule(n, budget);
    std::vector<char> alive(arms.size(), 1);
    std::vector<std::int64_t> counts(arms.size(), 0);
    std::vector<double> sums(arms.size(), 0.0);

    for (std::int64_t phase = 1; phase <= n - 1; ++phase) {
        const std::int64_t target = sched.n(phase);
        for (std::size_t a = 0; a < arms.size(); ++a)
            if (alive[a])
                while (counts[a] < target) {
                    sums[a] += env.pull(arms[a].subtree, arms[a].leaf);
                    counts[a] += 1;
                }

        int best = -1, worst = -1;
        for (std::size_t a = 0; a < arms.size(); ++a) {
            if (!alive[a]) continue;
            double v = sums[a] / static_cast<double>(counts[a]);
            if (best == -1 || v > sums[static_cast<std::size_t>(best)] /
                                      static_cast<double>(counts[static_cast<std::size_t>(best)]))
                best = static_cast<int>(a);
        }
        for (std::size_t a = 0; a < arms.size(); ++a) {
            if (!alive[a] || static_cast<int>(a) == best) continue;
            double v = sums[a] / static_cast<double>(counts[a]);
            if (worst == -1 || v < sums[static_cast<std::size_t>(worst)] /
                                       static_cast<double>(counts[static_cast<std::size_t>(worst)]))
                worst = static_cast<int>(a);
        }
        alive[static_cast<std::size_t>(worst)] = 0;
        env.log_phase(phase, elimination_kind::single_leaf, {arms[static_cast<std::size_t>(worst)]});
    }

    for (std::size_t a = 0; a < arms.size(); ++a)
        if (alive[a]) return arms[a];
    throw inconsistency_error("sr_classic lost every arm");
}

transcript sr_classic_tree(environment& env) {
    const int k = env.instance().num_subtrees();
    const int l = env.instance().num_leaves();
    if (env.budget() <= static_cast<std::int64_t>(k) * l)
        throw invalid_budget_error("sr_classic_tree requires budget > KL");
    if (env.spent() != 0)
        throw inconsistency_error("sr_classic_tree requires a fresh environment");
    if (k == 1) {
        env.set_recommendation(0);
        return env.take_result();
    }

    // classic SR with one arm per subtree: an arm's value is the empirical
    // min over its leaves and its pulls go round-robin across the leaves
    phase_schedule sched = harmonic_schedule(k, env.budget());
    std::vector<char> alive(static_cast<std::size_t>(k), 1);
    std::vector<std::int64_t> total(static_cast<std::size_t>(k), 0);

    auto min_value = [&](int i) {
        const transcript& tr = env.result();
        double v = 0.0;
        bool any = false;
        for (int j = 0; j < l; ++j) {
            if (tr.pull_count(i, j) == 0) continue;
            double m = tr.empirical_mean(i, j);
            if (!any || m < v) {
                v = m;
                any = true;
            }
        }
        return v;
    };

    for (std::int64_t phase = 1; phase <= k - 1; ++phase) {
        const std::int64_t target = sched.n(phase);
        for (int i = 0; i < k; ++i) {
            if (!alive[static_cast<std::size_t>(i)]) continue;
            while (total[static_cast<std::size_t>(i)] < target) {
                env.pull(i, static_cast<int>(total[static_cast<std::size_t>(i)] %
                                             static_cast<std::int64_t>(l)));
                total[static_cast<std::size_t>(i)] += 1;
            }
        }

        int best = -1, worst = -1;
        for (int i = 0; i < k; ++i)
            if (alive[static_cast<std::size_t>(i)] && (best == -1 || min_value(i) > min_value(best)))
                best = i;
        for (int i = 0; i < k; ++i) {
            if (!alive[static_cast<std::size_t>(i)] || i == best) continue;
            if (worst == -1 || min_value(i) < min_value(worst)) worst = i;
        }
        alive[static_cast<std::size_t>(worst)] = 0;
        std::vector<leaf_id> gone;
        for (int j = 0; j < l; ++j) gone.push_back({worst, j});
        env.log_phase(phase, elimination_kind::subtree, std::move(gone));
    }

    for (int i = 0; i < k; ++i)
        if (alive[static_cast<std::size_t>(i)]) {
            env.set_recommendation(i);
            break;
        }
    return env.take_result();
}

transcript sar_compare(environment& env, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw invalid_argument_error("sar_compare requires alpha in (0, 1)");
    const int k = env.instance().num_subtrees();
    const int l = env.instance().num_leaves();
    const std::int64_t budget = env.budget();
    const std::int64_t stage1 =
        static_cast<std::int64_t>(std::floor(alpha * static_cast<double>(budget)));
    const std::int64_t stage2 = budget - stage1;
    if (stage1 <= static_cast<std::int64_t>(k) * l)
        throw invalid_budget_error("sar_compare stage 1 budget too small");
    if (stage2 <= k) throw invalid_budget_error("sar_compare stage 2 budget too small");

    sar_candidates cands = multibandit_sar(env, stage1);
    if (k == 1) {
        env.set_recommendation(0);
        return env.take_result();
    }
    std::vector<leaf_id> arms;
    arms.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) arms.push_back({i, cands.leaf[i]});
    leaf_id winner = sr_classic(arms, env, stage2);
    env.set_recommendation(winner.subtree);
    return env.take_result();
}

algorithm_id algorithm_from_string(const std::string& name) {
    if (name == "sr-mcts") return algorithm_id::sr_mcts;
    if (name == "uniform") return algorithm_id::uniform;
    if (name == "bottom-up-sar") return algorithm_id::bottom_up_sar;
    if (name == "sar-compare") return algorithm_id::sar_compare;
    if (name == "sr-classic") return algorithm_id::sr_classic;
    throw invalid_argument_error("unknown algorithm: " + name);
}

std::string to_string(algorithm_id id) {
    switch (id) {
        case algorithm_id::sr_mcts: return "sr-mcts";
        case algorithm_id::uniform: return "uniform";
        case algorithm_id::bottom_up_sar: return "bottom-up-sar";
        case algorithm_id::sar_compare: return "sar-compare";
        case algorithm_id::sr_classic: return "sr-classic";
    }
    return "sr-mcts";
}

std::vector<std::string> algorithm_names() {
    return {"sr-mcts", "uniform", "bottom-up-sar", "sar-compare", "sr-classic"};
}

transcript run_algorithm(algorithm_id id, environment& env, double alpha) {
    switch (id) {
        case algorithm_id::sr_mcts: return sr_mcts(env);
        case algorithm_id::uniform: return uniform_baseline(env);
        case algorithm_id::bottom_up_sar: return bottom_up_sar(env);
        case algorithm_id::sar_compare: return sar_compare(env, alpha);
        case algorithm_id::sr_classic: return sr_classic_tree(env);
    }
    throw invalid_argument_error("unknown algorithm id");
}

soundness_report check_soundness(const max_min_instance& true_inst, const eps_summary& summary,
                                 const transcript& tr, double eps) {
    const int k = true_inst.num_subtrees();
    const int l = true_inst.num_leaves();
    if (tr.pulls.rows() != k || tr.pulls.cols() != l)
        throw inconsistency_error("transcript shape does not match the instance");
    if (summary.trivial || !summary.m.has_value())
        throw invalid_argument_error("soundness check requires a nontrivial eps summary");
    if (summary.eps != eps)
        throw inconsistency_error("eps does not match the summary it was computed with");

    const std::int64_t n = static_cast<std::int64_t>(k) * l;
    const std::int64_t early_limit = n - static_cast<std::int64_t>(*summary.m);
    const double vstar = true_inst.maximin_value();
    const int opt = true_inst.optimal_subtree();
    std::vector<double> value(k);
    std::vector<int> true_min(k);
    for (int i = 0; i < k; ++i) {
        value[i] = true_inst.min_value(i);
        true_min[i] = true_inst.min_leaf(i);
    }

    active_set active(k, l);
    soundness_report report;

    auto eval_phase = [&](std::int64_t phase) {
        phase_soundness ps;
        ps.phase = phase;
        ps.early = phase <= early_limit;
        auto anchored = [&](int x) { return active.active(x, true_min[x]); };
        if (ps.early) {
            ps.cond1 = active.subtree_count(opt) > 0;
            bool c2 = true, c3 = true;
            for (int x = 0; x < k; ++x) {
                bool half_good = value[x] >= vstar - eps / 2.0;
                if (half_good && x != opt && !anchored(x)) c2 = false;
                if (!half_good && !anchored(x) && active.subtree_count(x) > 0) c3 = false;
            }
            ps.cond2 = c2;
            ps.cond3 = c3;
            ps.sound = *ps.cond1 && c2 && c3;
        } else {
            bool all_half_good_alive = true, all_bad_gone = true, c5 = true;
            for (int x = 0; x < k; ++x) {
                bool half_good = value[x] >= vstar - eps / 2.0;
                bool bad = value[x] < vstar - eps;
                if (half_good && active.subtree_count(x) == 0) all_half_good_alive = false;
                if (bad && active.subtree_count(x) > 0) all_bad_gone = false;
                if (bad && !anchored(x) && active.subtree_count(x) > 0) c5 = false;
            }
            ps.cond4 = all_half_good_alive || all_bad_gone;
            ps.cond5 = c5;
            ps.sound = *ps.cond4 && c5;
        }
        report.all_sound = report.all_sound && ps.sound;
        report.phases.push_back(ps);
    };

    std::int64_t next_phase = 1;     // first phase beginning not yet evaluated
    std::int64_t expected_phase = 1; // where the next executed phase must sit
    for (const auto& ev : tr.phase_log) {
        if (ev.phase != expected_phase)
            throw inconsistency_error("phase log does not advance by the elimination count");
        if (ev.eliminated.empty()) throw inconsistency_error("empty elimination event");
        // beginnings up to the executed phase share the current active set
        for (; next_phase <= ev.phase; ++next_phase) eval_phase(next_phase);
        for (const auto& leaf : ev.eliminated) {
            if (leaf.subtree < 0 || leaf.subtree >= k || leaf.leaf < 0 || leaf.leaf >= l)
                throw inconsistency_error("eliminated leaf out of range");
            active.remove(leaf); // throws if eliminated twice
        }
        expected_phase = ev.phase + static_cast<std::int64_t>(ev.eliminated.size());
    }
    // phases skipped by the final bulk elimination plus the post-termination
    // phase k' + 1 all see the final active set
    for (; next_phase <= expected_phase; ++next_phase) eval_phase(next_phase);
    return report;
}

} // namespace maximin
