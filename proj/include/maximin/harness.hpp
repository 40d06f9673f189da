#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "maximin/algorithms.hpp"
#include "maximin/instance.hpp"

namespace maximin {

enum class scaling_norm { natural_log, overline_log };

scaling_norm norm_from_string(const std::string& s); // "ln" | "overline"
std::string to_string(scaling_norm n);

struct generator_spec {
    int num_subtrees = 10;
    int num_leaves = 10;
    gen_variant variant = gen_variant::structured;
    std::uint64_t seed = 0;
    bool evenly_spaced = false;
};

struct experiment_config {
    std::string instance_file;          // wins over gen when nonempty
    std::optional<generator_spec> gen;  // used when instance_file is empty
    std::vector<std::string> algorithms = {"sr-mcts"};
    std::vector<std::int64_t> budgets;
    std::vector<double> eps_grid = {0.0};
    int trials = 1000;
    std::uint64_t master_seed = 1;
    int workers = 1;
    double alpha = 0.8;
    scaling_norm norm = scaling_norm::natural_log;
    std::string out_dir;
};

// The instance a config resolves to: the raw labeling algorithms run on.
max_min_instance resolve_instance(const experiment_config& cfg);

struct sweep_cell {
    std::string algo;
    std::int64_t budget = 0;
    double eps = 0.0;
    std::int64_t errors = 0;
    std::int64_t trials = 0;
    double rate = 0.0;
    double se = 0.0;
};

struct heatmap_entry {
    std::string algo;
    std::int64_t budget = 0;
    matrix mean_pulls;
};

struct sweep_result {
    std::vector<sweep_cell> cells;       // algo-major, then budget, then eps
    std::vector<heatmap_entry> heatmaps; // one per (algo, budget)

    const sweep_cell& cell(const std::string& algo, std::int64_t budget, double eps) const;
    const matrix& mean_pulls(const std::string& algo, std::int64_t budget) const;
};

// Runs `trials` seeded environments per (algorithm, budget) cell and scores
// the recommendation against every epsilon in the grid. Reward streams are
// keyed by (master seed, budget cell, trial), so all algorithms face the
// same rewards and the result is independent of the worker count.
sweep_result run_trials(const experiment_config& cfg);

// Per-leaf average pull counts for a single-algorithm, single-budget config.
matrix heatmap(const experiment_config& cfg);

struct scaling_point {
    std::int64_t budget = 0;
    double x = 0.0;        // (KL - T) / (log(KL) * H2(eps))
    double log_rate = 0.0; // ln(error rate)
};

struct scaling_fit {
    std::vector<scaling_point> points;
    std::vector<std::int64_t> dropped_budgets; // zero-error cells, excluded
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double h2 = 0.0;
    double eps = 0.0;
};

// The error-exponent diagnostic: ln(error rate) against the theoretical
// scaling term over the budget grid, with a least-squares line.
scaling_fit h2_scaling(const experiment_config& cfg);

// Closed-form failure-probability bound of the elimination algorithm,
// 2 K^2 L^2 exp(-(T - KL) / (128 log_bar(KL) H2(eps))); zero in the trivial
// regime where every subtree is eps-good.
double theorem1_bound(const max_min_instance& inst, std::int64_t budget, double eps);

// CSV emission (schemas: sweep `algo,budget,eps,errors,trials,rate,se`;
// heatmap `subtree,leaf,mean_pulls`; h2check `budget,x,log_rate`).
std::string sweep_csv(const sweep_result& result);
std::string heatmap_csv(const matrix& mean_pulls);
std::string h2check_csv(const scaling_fit& fit);

void write_text_file(const std::string& path, const std::string& content);

// Minimal self-contained SVG plots.
struct plot_series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<plot_series>& series);
std::string heatmap_svg(const std::string& title, const matrix& values);

} // namespace maximin
