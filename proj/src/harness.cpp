#include "maximin/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "maximin/errors.hpp"

namespace maximin {

scaling_norm norm_from_string(const std::string& s) {
    if (s == "ln") return scaling_norm::natural_log;
    if (s == "overline") return scaling_norm::overline_log;
    throw invalid_argument_error("unknown norm: " + s + " (expected ln or overline)");
}

std::string to_string(scaling_norm n) {
    return n == scaling_norm::natural_log ? "ln" : "overline";
}

max_min_instance resolve_instance(const experiment_config& cfg) {
    if (!cfg.instance_file.empty()) return read_instance_file(cfg.instance_file);
    if (!cfg.gen.has_value())
        throw config_error("instance: neither an instance file nor a generator spec given");
    const generator_spec& g = *cfg.gen;
    return gen_experiment_instance(g.num_subtrees, g.num_leaves, g.variant, g.seed,
                                   g.evenly_spaced)
        .raw;
}

namespace {

void validate(const experiment_config& cfg, const max_min_instance& inst) {
    if (cfg.trials < 1) throw config_error("trials: must be >= 1");
    if (cfg.workers < 1) throw config_error("workers: must be >= 1");
    if (cfg.budgets.empty()) throw config_error("budgets: empty grid");
    const std::int64_t kl = inst.num_arms();
    for (std::int64_t b : cfg.budgets)
        if (b <= kl) throw config_error("budgets: every budget must exceed KL");
    if (cfg.eps_grid.empty()) throw config_error("eps: empty grid");
    for (double e : cfg.eps_grid)
        if (e < 0.0) throw config_error("eps: values must be >= 0");
    if (cfg.algorithms.empty()) throw config_error("algo: empty algorithm list");
    for (const auto& name : cfg.algorithms) algorithm_from_string(name); // throws on unknown
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw config_error("alpha: must be in (0, 1)");
}

std::uint64_t trial_stream(std::size_t budget_cell, int trial) {
    return (static_cast<std::uint64_t>(budget_cell) << 32) |
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(trial));
}

struct cell_accumulator {
    std::vector<std::int64_t> errors_per_eps;
    grid<std::int64_t> pulls;
};

} // namespace

const sweep_cell& sweep_result::cell(const std::string& algo, std::int64_t budget,
                                     double eps) const {
    for (const auto& c : cells)
        if (c.algo == algo && c.budget == budget && c.eps == eps) return c;
    throw invalid_argument_error("no such sweep cell");
}

const matrix& sweep_result::mean_pulls(const std::string& algo, std::int64_t budget) const {
    for (const auto& h : heatmaps)
        if (h.algo == algo && h.budget == budget) return h.mean_pulls;
    throw invalid_argument_error("no such heatmap cell");
}

sweep_result run_trials(const experiment_config& cfg) {
    max_min_instance inst = resolve_instance(cfg);
    validate(cfg, inst);

    const int k = inst.num_subtrees();
    const int l = inst.num_leaves();
    const double vstar = inst.maximin_value();
    std::vector<double> values(k);
    for (int i = 0; i < k; ++i) values[i] = inst.min_value(i);

    const std::size_t num_algos = cfg.algorithms.size();
    const std::size_t num_eps = cfg.eps_grid.size();
    std::vector<algorithm_id> ids;
    ids.reserve(num_algos);
    for (const auto& name : cfg.algorithms) ids.push_back(algorithm_from_string(name));

    sweep_result result;
    for (std::size_t c = 0; c < cfg.budgets.size(); ++c) {
        const std::int64_t budget = cfg.budgets[c];

        // one accumulator per worker per algorithm; merged after the join
        std::vector<std::vector<cell_accumulator>> acc(
            static_cast<std::size_t>(cfg.workers),
            std::vector<cell_accumulator>(num_algos,
                                          {std::vector<std::int64_t>(num_eps, 0),
                                           grid<std::int64_t>(k, l, 0)}));

        auto work = [&](int w) {
            for (int t = w; t < cfg.trials; t += cfg.workers) {
                std::uint64_t stream = trial_stream(c, t);
                for (std::size_t a = 0; a < num_algos; ++a) {
                    environment env(inst, budget, cfg.master_seed, stream);
                    transcript tr = run_algorithm(ids[a], env, cfg.alpha);
                    double v = values[static_cast<std::size_t>(tr.recommendation)];
                    for (std::size_t e = 0; e < num_eps; ++e)
                        if (v < vstar - cfg.eps_grid[e])
                            acc[static_cast<std::size_t>(w)][a].errors_per_eps[e] += 1;
                    auto& pulls = acc[static_cast<std::size_t>(w)][a].pulls;
                    for (int i = 0; i < k; ++i)
                        for (int j = 0; j < l; ++j) pulls(i, j) += tr.pulls(i, j);
                }
            }
        };

        if (cfg.workers == 1) {
            work(0);
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(cfg.workers));
            for (int w = 0; w < cfg.workers; ++w) pool.emplace_back(work, w);
            for (auto& th : pool) th.join();
        }

        for (std::size_t a = 0; a < num_algos; ++a) {
            std::vector<std::int64_t> errors(num_eps, 0);
            grid<std::int64_t> pulls(k, l, 0);
            for (int w = 0; w < cfg.workers; ++w) {
                const auto& wa = acc[static_cast<std::size_t>(w)][a];
                for (std::size_t e = 0; e < num_eps; ++e) errors[e] += wa.errors_per_eps[e];
                for (int i = 0; i < k; ++i)
                    for (int j = 0; j < l; ++j) pulls(i, j) += wa.pulls(i, j);
            }
            for (std::size_t e = 0; e < num_eps; ++e) {
                sweep_cell cell;
                cell.algo = cfg.algorithms[a];
                cell.budget = budget;
                cell.eps = cfg.eps_grid[e];
                cell.errors = errors[e];
                cell.trials = cfg.trials;
                cell.rate = static_cast<double>(errors[e]) / static_cast<double>(cfg.trials);
                cell.se = std::sqrt(cell.rate * (1.0 - cell.rate) /
                                    static_cast<double>(cfg.trials));
                result.cells.push_back(std::move(cell));
            }
            heatmap_entry hm;
            hm.algo = cfg.algorithms[a];
            hm.budget = budget;
            hm.mean_pulls = matrix(k, l, 0.0);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < l; ++j)
                    hm.mean_pulls(i, j) =
                        static_cast<double>(pulls(i, j)) / static_cast<double>(cfg.trials);
            result.heatmaps.push_back(std::move(hm));
        }
    }

    // reorder cells algo-major for stable output
    std::stable_sort(result.cells.begin(), result.cells.end(),
                     [&](const sweep_cell& a, const sweep_cell& b) {
                         auto pos = [&](const std::string& name) {
                             return std::find(cfg.algorithms.begin(), cfg.algorithms.end(), name) -
                                    cfg.algorithms.begin();
                         };
                         return pos(a.algo) < pos(b.algo);
                     });
    return result;
}

matrix heatmap(const experiment_config& cfg) {
    if (cfg.algorithms.size() != 1)
        throw config_error("algo: heatmap requires exactly one algorithm");
    if (cfg.budgets.size() != 1) throw config_error("budgets: heatmap requires exactly one budget");
    sweep_result result = run_trials(cfg);
    return result.heatmaps.front().mean_pulls;
}

scaling_fit h2_scaling(const experiment_config& cfg) {
    if (cfg.algorithms.size() != 1)
        throw config_error("algo: the scaling diagnostic runs one algorithm");
    if (cfg.eps_grid.size() != 1)
        throw config_error("eps: the scaling diagnostic takes a single epsilon");
    const double eps = cfg.eps_grid.front();

    max_min_instance inst = resolve_instance(cfg);
    auto [canon, map] = canonicalize(inst.means(), inst.noise());
    gap_table table = compute_gap_table(canon);
    eps_summary summary = compute_eps_summary(canon, table, eps);
    if (summary.trivial)
        throw config_error("eps: every subtree is eps-good, the scaling term is undefined");

    const double kl = static_cast<double>(inst.num_arms());
    const double norm_log = cfg.norm == scaling_norm::natural_log
                                ? std::log(kl)
                                : log_bar(static_cast<std::int64_t>(kl));
    const double denom = norm_log * *summary.h2;

    sweep_result sweep = run_trials(cfg);
    scaling_fit fit;
    fit.h2 = *summary.h2;
    fit.eps = eps;
    for (const auto& cell : sweep.cells) {
        if (cell.errors == 0) {
            fit.dropped_budgets.push_back(cell.budget);
            continue;
        }
        scaling_point p;
        p.budget = cell.budget;
        p.x = (kl - static_cast<double>(cell.budget)) / denom;
        p.log_rate = std::log(cell.rate);
        fit.points.push_back(p);
    }
    if (fit.points.size() < 3)
        throw insufficient_data_error("scaling fit needs at least 3 cells with errors");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(fit.points.size());
    for (const auto& p : fit.points) {
        sx += p.x;
        sy += p.log_rate;
        sxx += p.x * p.x;
        sxy += p.x * p.log_rate;
    }
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (const auto& p : fit.points) {
        double pred = fit.slope * p.x + fit.intercept;
        ss_res += (p.log_rate - pred) * (p.log_rate - pred);
        ss_tot += (p.log_rate - mean_y) * (p.log_rate - mean_y);
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

double theorem1_bound(const max_min_instance& inst, std::int64_t budget, double eps) {
    const std::int64_t kl = inst.num_arms();
    if (budget <= kl) throw invalid_budget_error("theorem1_bound requires budget > KL");
    auto [canon, map] = canonicalize(inst.means(), inst.noise());
    gap_table table = compute_gap_table(canon);
    eps_summary summary = compute_eps_summary(canon, table, eps);
    if (summary.trivial) return 0.0;
    const double k = static_cast<double>(inst.num_subtrees());
    const double l = static_cast<double>(inst.num_leaves());
    const double exponent = static_cast<double>(budget - kl) /
                            (128.0 * log_bar(kl) * *summary.h2);
    return 2.0 * k * k * l * l * std::exp(-exponent);
}

namespace {

// shortest representation that round-trips the exact double
std::string fmt(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::string sweep_csv(const sweep_result& result) {
    std::ostringstream out;
    out << "algo,budget,eps,errors,trials,rate,se\n";
    for (const auto& c : result.cells)
        out << c.algo << ',' << c.budget << ',' << fmt(c.eps) << ',' << c.errors << ','
            << c.trials << ',' << fmt(c.rate) << ',' << fmt(c.se) << '\n';
    return out.str();
}

std::string heatmap_csv(const matrix& mean_pulls) {
    std::ostringstream out;
    out << "subtree,leaf,mean_pulls\n";
    for (int i = 0; i < mean_pulls.rows(); ++i)
        for (int j = 0; j < mean_pulls.cols(); ++j)
            out << i << ',' << j << ',' << fmt(mean_pulls(i, j)) << '\n';
    return out.str();
}

std::string h2check_csv(const scaling_fit& fit) {
    std::ostringstream out;
    out << "budget,x,log_rate\n";
    for (const auto& p : fit.points)
        out << p.budget << ',' << fmt(p.x) << ',' << fmt(p.log_rate) << '\n';
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw error("cannot open output file: " + path);
    out << content;
}

} // namespace maximin
