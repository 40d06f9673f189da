#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "maximin/algorithms.hpp"
#include "maximin/errors.hpp"
#include "maximin/harness.hpp"
#include "maximin/instance.hpp"
#include "maximin/lowerbound.hpp"

namespace {

using namespace maximin;

struct instance_options {
    std::string instance_file;
    std::string generator; // structured | random, empty = none
    int k = 10;
    int l = 10;
    std::uint64_t gen_seed = 0;
    bool evenly = false;
};

void add_instance_options(CLI::App* cmd, instance_options& opts) {
    cmd->add_option("--instance", opts.instance_file, "instance file (JSON)");
    cmd->add_option("--gen", opts.generator, "generate instead: structured or random");
    cmd->add_option("--k", opts.k, "subtrees for --gen");
    cmd->add_option("--l", opts.l, "leaves per subtree for --gen");
    cmd->add_option("--gen-seed", opts.gen_seed, "generator seed for --gen");
    cmd->add_flag("--evenly", opts.evenly, "evenly spaced structured leaves instead of sampled");
}

void fill_instance(const instance_options& opts, experiment_config& cfg) {
    cfg.instance_file = opts.instance_file;
    if (opts.instance_file.empty()) {
        if (opts.generator.empty())
            throw config_error("instance: pass --instance FILE or --gen {structured,random}");
        generator_spec gen;
        gen.num_subtrees = opts.k;
        gen.num_leaves = opts.l;
        if (opts.generator == "structured") gen.variant = gen_variant::structured;
        else if (opts.generator == "random") gen.variant = gen_variant::random;
        else throw config_error("gen: expected structured or random");
        gen.seed = opts.gen_seed;
        gen.evenly_spaced = opts.evenly;
        cfg.gen = gen;
    }
}

std::string eps_tag(double eps) {
    std::ostringstream out;
    out << eps;
    std::string s = out.str();
    for (char& c : s)
        if (c == '.') c = 'p';
    return s;
}

void ensure_out_dir(const std::string& dir) {
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return (std::filesystem::path(dir) / name).string();
}

void emit_sweep_svg(const experiment_config& cfg, const sweep_result& result, bool x_is_budget) {
    for (double eps : cfg.eps_grid) {
        std::vector<plot_series> series;
        for (const auto& algo : cfg.algorithms) {
            plot_series s;
            s.name = algo;
            for (const auto& cell : result.cells) {
                if (cell.algo != algo) continue;
                if (x_is_budget && cell.eps == eps)
                    s.points.push_back({static_cast<double>(cell.budget), cell.rate});
                if (!x_is_budget && cell.budget == cfg.budgets.front())
                    s.points.push_back({cell.eps, cell.rate});
            }
            series.push_back(std::move(s));
        }
        std::string name = x_is_budget ? "sweep_budget_eps" + eps_tag(eps) + ".svg"
                                       : "sweep_eps_T" + std::to_string(cfg.budgets.front()) +
                                             ".svg";
        write_text_file(join_path(cfg.out_dir, name),
                        line_chart_svg(x_is_budget ? "misidentification rate vs budget"
                                                   : "misidentification rate vs eps",
                                       x_is_budget ? "budget" : "eps", "error rate", series));
        if (!x_is_budget) break; // one chart covers the whole eps grid
    }
}

int cmd_gen(const instance_options& opts, const std::string& noise, const std::string& out) {
    gen_variant variant;
    if (opts.generator == "structured" || opts.generator.empty()) variant = gen_variant::structured;
    else if (opts.generator == "random") variant = gen_variant::random;
    else throw config_error("gen: expected structured or random");
    generated_instance gi = gen_experiment_instance(opts.k, opts.l, variant, opts.gen_seed,
                                                    opts.evenly, noise_from_string(noise));
    if (out.empty()) {
        std::cout << instance_to_json(gi.raw) << '\n';
    } else {
        write_instance_file(gi.raw, out);
        std::cout << "wrote " << out << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-budget max-min subtree identification toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "write an experiment instance file");
    instance_options gen_opts;
    gen_opts.generator = "structured";
    std::string gen_noise = "gaussian";
    std::string gen_out;
    gen_cmd->add_option("--gen", gen_opts.generator, "structured or random");
    gen_cmd->add_option("--k", gen_opts.k, "subtrees");
    gen_cmd->add_option("--l", gen_opts.l, "leaves per subtree");
    gen_cmd->add_option("--gen-seed", gen_opts.gen_seed, "generator seed");
    gen_cmd->add_flag("--evenly", gen_opts.evenly, "evenly spaced structured leaves");
    gen_cmd->add_option("--noise", gen_noise, "gaussian or bernoulli");
    gen_cmd->add_option("--out", gen_out, "output file (stdout when omitted)");

    // run
    auto* run_cmd = app.add_subcommand("run", "single trial, dump the transcript");
    instance_options run_inst;
    add_instance_options(run_cmd, run_inst);
    std::string run_algo = "sr-mcts";
    std::vector<std::int64_t> run_budgets;
    std::uint64_t run_seed = 1;
    double run_alpha = 0.8;
    std::string run_out;
    run_cmd->add_option("--algo", run_algo, "algorithm identifier");
    run_cmd->add_option("--budgets", run_budgets, "budget (one value)")->required();
    run_cmd->add_option("--seed", run_seed, "master seed");
    run_cmd->add_option("--alpha", run_alpha, "sar-compare split");
    run_cmd->add_option("--out", run_out, "transcript file (stdout when omitted)");

    // sweeps
    auto* sweep_budget_cmd = app.add_subcommand("sweep-budget", "error rate over a budget grid");
    auto* sweep_eps_cmd = app.add_subcommand("sweep-eps", "error rate over an eps grid");
    auto* heatmap_cmd = app.add_subcommand("heatmap", "mean pull counts per leaf");
    auto* h2check_cmd = app.add_subcommand("h2check", "ln(error) against the scaling term");
    instance_options sweep_inst, eps_inst, heat_inst, h2_inst;
    experiment_config sweep_cfg, eps_cfg, heat_cfg, h2_cfg;
    std::string h2_norm = "ln";
    sweep_cfg.algorithms = {"sr-mcts", "uniform", "bottom-up-sar", "sar-compare"};
    eps_cfg.algorithms = {"sr-mcts", "uniform", "bottom-up-sar", "sar-compare"};
    heat_cfg.algorithms = {"sr-mcts"};
    h2_cfg.algorithms = {"sr-mcts"};

    auto add_sweep_options = [](CLI::App* cmd, instance_options& inst, experiment_config& cfg) {
        add_instance_options(cmd, inst);
        cmd->add_option("--algo", cfg.algorithms, "algorithm identifiers")->delimiter(',');
        cmd->add_option("--budgets", cfg.budgets, "budget grid")->delimiter(',')->required();
        cmd->add_option("--eps", cfg.eps_grid, "eps grid")->delimiter(',');
        cmd->add_option("--trials", cfg.trials, "trials per cell");
        cmd->add_option("--seed", cfg.master_seed, "master seed");
        cmd->add_option("--alpha", cfg.alpha, "sar-compare split");
        cmd->add_option("--workers", cfg.workers, "worker threads");
        cmd->add_option("--out", cfg.out_dir, "output directory");
    };
    add_sweep_options(sweep_budget_cmd, sweep_inst, sweep_cfg);
    add_sweep_options(sweep_eps_cmd, eps_inst, eps_cfg);
    add_sweep_options(heatmap_cmd, heat_inst, heat_cfg);
    add_sweep_options(h2check_cmd, h2_inst, h2_cfg);
    h2check_cmd->add_option("--norm", h2_norm, "scaling log: ln or overline");

    // lb-verify
    auto* lb_cmd = app.add_subcommand("lb-verify", "lower-bound constructions report");
    std::string lb_instance;
    std::vector<std::int64_t> lb_budgets = {1000};
    std::string lb_out;
    lb_cmd->add_option("--instance", lb_instance, "instance file (JSON)")->required();
    lb_cmd->add_option("--budgets", lb_budgets, "budget for the floors")->delimiter(',');
    lb_cmd->add_option("--out", lb_out, "report file (stdout when omitted)");

    // bound
    auto* bound_cmd = app.add_subcommand("bound", "closed-form error-bound values");
    instance_options bound_inst;
    add_instance_options(bound_cmd, bound_inst);
    std::vector<std::int64_t> bound_budgets;
    std::vector<double> bound_eps = {0.0};
    std::string bound_out;
    bound_cmd->add_option("--budgets", bound_budgets, "budget grid")->delimiter(',')->required();
    bound_cmd->add_option("--eps", bound_eps, "eps grid")->delimiter(',');
    bound_cmd->add_option("--out", bound_out, "csv file (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen_opts, gen_noise, gen_out);

        if (run_cmd->parsed()) {
            if (run_budgets.size() != 1) throw config_error("budgets: run takes one budget");
            experiment_config cfg;
            fill_instance(run_inst, cfg);
            max_min_instance inst = resolve_instance(cfg);
            environment env(inst, run_budgets.front(), run_seed, 0);
            transcript tr = run_algorithm(algorithm_from_string(run_algo), env, run_alpha);
            if (run_out.empty()) std::cout << tr.to_json() << '\n';
            else {
                write_text_file(run_out, tr.to_json() + "\n");
                std::cout << "wrote " << run_out << '\n';
            }
            return 0;
        }

        if (sweep_budget_cmd->parsed() || sweep_eps_cmd->parsed()) {
            bool by_budget = sweep_budget_cmd->parsed();
            experiment_config& cfg = by_budget ? sweep_cfg : eps_cfg;
            fill_instance(by_budget ? sweep_inst : eps_inst, cfg);
            ensure_out_dir(cfg.out_dir);
            sweep_result result = run_trials(cfg);
            std::string csv = sweep_csv(result);
            write_text_file(join_path(cfg.out_dir, "sweep.csv"), csv);
            emit_sweep_svg(cfg, result, by_budget);
            std::cout << csv;
            return 0;
        }

        if (heatmap_cmd->parsed()) {
            fill_instance(heat_inst, heat_cfg);
            ensure_out_dir(heat_cfg.out_dir);
            matrix pulls = heatmap(heat_cfg);
            std::string csv = heatmap_csv(pulls);
            write_text_file(join_path(heat_cfg.out_dir, "heatmap.csv"), csv);
            write_text_file(join_path(heat_cfg.out_dir, "heatmap.svg"),
                            heatmap_svg("mean pulls per leaf (" + heat_cfg.algorithms.front() +
                                            ", T=" + std::to_string(heat_cfg.budgets.front()) +
                                            ")",
                                        pulls));
            std::cout << csv;
            return 0;
        }

        if (h2check_cmd->parsed()) {
            fill_instance(h2_inst, h2_cfg);
            h2_cfg.norm = norm_from_string(h2_norm);
            ensure_out_dir(h2_cfg.out_dir);
            scaling_fit fit = h2_scaling(h2_cfg);
            std::string csv = h2check_csv(fit);
            write_text_file(join_path(h2_cfg.out_dir, "h2check.csv"), csv);
            std::vector<plot_series> series(2);
            series[0].name = "cells";
            for (const auto& p : fit.points) series[0].points.push_back({p.x, p.log_rate});
            series[1].name = "fit";
            if (!fit.points.empty()) {
                double x0 = fit.points.front().x, x1 = fit.points.back().x;
                series[1].points = {{x0, fit.slope * x0 + fit.intercept},
                                    {x1, fit.slope * x1 + fit.intercept}};
            }
            write_text_file(join_path(h2_cfg.out_dir, "h2check.svg"),
                            line_chart_svg("ln(error rate) vs scaling term", "scaling term",
                                           "ln(error rate)", series));
            std::cout << csv;
            std::cout << "slope=" << fit.slope << " intercept=" << fit.intercept
                      << " r2=" << fit.r2 << " h2=" << fit.h2 << '\n';
            for (std::int64_t b : fit.dropped_budgets)
                std::cout << "notice: budget " << b << " had zero errors and was dropped\n";
            return 0;
        }

        if (lb_cmd->parsed()) {
            max_min_instance stored = read_instance_file(lb_instance);
            auto [canon, map] = canonicalize(stored.means(), stored.noise());
            alternative_family fam = build_alt_family(canon);
            const std::int64_t budget = lb_budgets.front();

            // uniform pull counts for the KL budget column
            const std::int64_t n = canon.num_arms();
            grid<std::int64_t> counts(canon.num_subtrees(), canon.num_leaves(), budget / n);
            for (std::int64_t idx = 0; idx < budget % n; ++idx)
                counts(static_cast<int>(idx / canon.num_leaves()),
                       static_cast<int>(idx % canon.num_leaves())) += 1;

            nlohmann::json doc;
            doc["h"] = fam.h_base;
            doc["h_lb"] = fam.h_lb_base;
            doc["budget"] = budget;
            doc["lb_exponent"] = lb_exponent(canon, budget);
            doc["bh_floor_at_2T_over_hlb"] =
                bh_floor(2.0 * static_cast<double>(budget) / fam.h_lb_base);
            doc["alternatives"] = nlohmann::json::array();
            for (const auto& alt : fam.alternatives) {
                double kl_budget = 0.0;
                for (int i = 0; i < canon.num_subtrees(); ++i)
                    for (int j = 0; j < canon.num_leaves(); ++j)
                        kl_budget += static_cast<double>(counts(i, j)) *
                                     kl_gaussian(canon.mean(i, j), alt.shifted.mean(i, j));
                nlohmann::json entry;
                entry["critical"] = {alt.critical.subtree, alt.critical.leaf};
                entry["optimal_subtree"] = alt.optimal_subtree;
                entry["h"] = alt.h;
                entry["h_ratio"] = alt.h / fam.h_base;
                entry["kl_budget_uniform"] = kl_budget;
                doc["alternatives"].push_back(std::move(entry));
            }
            std::string text = doc.dump(2) + "\n";
            if (lb_out.empty()) std::cout << text;
            else {
                write_text_file(lb_out, text);
                std::cout << "wrote " << lb_out << '\n';
            }
            return 0;
        }

        if (bound_cmd->parsed()) {
            experiment_config cfg;
            fill_instance(bound_inst, cfg);
            max_min_instance inst = resolve_instance(cfg);
            std::ostringstream out;
            out << "budget,eps,bound,clamped\n";
            for (std::int64_t b : bound_budgets)
                for (double e : bound_eps) {
                    double v = theorem1_bound(inst, b, e);
                    out << b << ',' << e << ',' << v << ',' << std::min(v, 1.0) << '\n';
                }
            if (bound_out.empty()) std::cout << out.str();
            else {
                write_text_file(bound_out, out.str());
                std::cout << "wrote " << bound_out << '\n';
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
