#include "maximin/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "maximin/errors.hpp"
#include "maximin/rng.hpp"

namespace maximin {

std::string to_string(noise_family f) {
    switch (f) {
        case noise_family::gaussian: return "gaussian";
        case noise_family::bernoulli: return "bernoulli";
        case noise_family::none: return "none";
    }
    return "gaussian";
}

noise_family noise_from_string(const std::string& s) {
    if (s == "gaussian") return noise_family::gaussian;
    if (s == "bernoulli") return noise_family::bernoulli;
    if (s == "none") return noise_family::none;
    throw invalid_argument_error("unknown noise family: " + s);
}

max_min_instance::max_min_instance(matrix means, noise_family noise)
    : means_(std::move(means)), noise_(noise) {
    if (means_.rows() < 1 || means_.cols() < 1)
        throw invalid_instance_error("instance requires K >= 1 and L >= 1");
    for (double v : means_.flat())
        if (!std::isfinite(v)) throw invalid_instance_error("non-finite leaf mean");
}

double max_min_instance::min_value(int i) const {
    double v = means_(i, 0);
    for (int j = 1; j < num_leaves(); ++j) v = std::min(v, means_(i, j));
    return v;
}

int max_min_instance::min_leaf(int i) const {
    int best = 0;
    for (int j = 1; j < num_leaves(); ++j)
        if (means_(i, j) < means_(i, best)) best = j;
    return best;
}

double max_min_instance::maximin_value() const {
    double v = min_value(0);
    for (int i = 1; i < num_subtrees(); ++i) v = std::max(v, min_value(i));
    return v;
}

int max_min_instance::optimal_subtree() const {
    int best = 0;
    double best_v = min_value(0);
    for (int i = 1; i < num_subtrees(); ++i) {
        double v = min_value(i);
        if (v > best_v) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

bool max_min_instance::is_canonical() const {
    for (int i = 0; i < num_subtrees(); ++i)
        for (int j = 0; j + 1 < num_leaves(); ++j)
            if (means_(i, j) > means_(i, j + 1)) return false;
    for (int i = 0; i + 1 < num_subtrees(); ++i)
        if (means_(i, 0) < means_(i + 1, 0)) return false;
    return true;
}

bool max_min_instance::has_unique_optimum() const {
    if (!is_canonical()) return false;
    if (num_subtrees() == 1) return true;
    return means_(0, 0) > means_(1, 0);
}

canonical_map canonical_map::identity(int num_subtrees, int num_leaves) {
    canonical_map map;
    map.subtree_perm.resize(num_subtrees);
    std::iota(map.subtree_perm.begin(), map.subtree_perm.end(), 0);
    map.leaf_perms.assign(num_subtrees, std::vector<int>(num_leaves));
    for (auto& p : map.leaf_perms) std::iota(p.begin(), p.end(), 0);
    return map;
}

int canonical_map::subtree_to_raw(int canonical_subtree) const {
    return subtree_perm.at(canonical_subtree);
}

int canonical_map::subtree_to_canonical(int raw_subtree) const {
    for (int c = 0; c < static_cast<int>(subtree_perm.size()); ++c)
        if (subtree_perm[c] == raw_subtree) return c;
    throw invalid_argument_error("raw subtree index out of range");
}

leaf_id canonical_map::leaf_to_raw(leaf_id canonical) const {
    return {subtree_perm.at(canonical.subtree),
            leaf_perms.at(canonical.subtree).at(canonical.leaf)};
}

leaf_id canonical_map::leaf_to_canonical(leaf_id raw) const {
    int c = subtree_to_canonical(raw.subtree);
    const auto& perm = leaf_perms.at(c);
    for (int j = 0; j < static_cast<int>(perm.size()); ++j)
        if (perm[j] == raw.leaf) return {c, j};
    throw invalid_argument_error("raw leaf index out of range");
}

bool canonical_map::is_identity() const {
    for (int c = 0; c < static_cast<int>(subtree_perm.size()); ++c)
        if (subtree_perm[c] != c) return false;
    for (const auto& p : leaf_perms)
        for (int j = 0; j < static_cast<int>(p.size()); ++j)
            if (p[j] != j) return false;
    return true;
}

std::pair<max_min_instance, canonical_map> canonicalize(const matrix& raw, noise_family noise) {
    if (raw.rows() < 1 || raw.cols() < 1)
        throw invalid_instance_error("canonicalize: empty mean matrix");
    for (double v : raw.flat())
        if (!std::isfinite(v)) throw invalid_instance_error("canonicalize: non-finite entry");

    const int k = raw.rows();
    const int l = raw.cols();

    // sort leaves ascending within each subtree, stable in the raw leaf index
    std::vector<std::vector<int>> leaf_order(k, std::vector<int>(l));
    for (int i = 0; i < k; ++i) {
        std::iota(leaf_order[i].begin(), leaf_order[i].end(), 0);
        std::stable_sort(leaf_order[i].begin(), leaf_order[i].end(),
                         [&](int a, int b) { return raw(i, a) < raw(i, b); });
    }

    // order subtrees by min value descending, stable in the raw subtree index
    std::vector<int> subtree_order(k);
    std::iota(subtree_order.begin(), subtree_order.end(), 0);
    std::stable_sort(subtree_order.begin(), subtree_order.end(), [&](int a, int b) {
        return raw(a, leaf_order[a][0]) > raw(b, leaf_order[b][0]);
    });

    matrix canon(k, l);
    canonical_map map;
    map.subtree_perm = subtree_order;
    map.leaf_perms.resize(k);
    for (int c = 0; c < k; ++c) {
        int i = subtree_order[c];
        map.leaf_perms[c] = leaf_order[i];
        for (int j = 0; j < l; ++j) canon(c, j) = raw(i, leaf_order[i][j]);
    }
    return {max_min_instance(std::move(canon), noise), std::move(map)};
}

max_min_instance apply_inverse(const max_min_instance& canonical, const canonical_map& map) {
    const int k = canonical.num_subtrees();
    const int l = canonical.num_leaves();
    matrix raw(k, l);
    for (int c = 0; c < k; ++c)
        for (int j = 0; j < l; ++j) {
            leaf_id r = map.leaf_to_raw({c, j});
            raw(r.subtree, r.leaf) = canonical.mean(c, j);
        }
    return max_min_instance(std::move(raw), canonical.noise());
}

gap_table compute_gap_table(const max_min_instance& inst) {
    if (!inst.is_canonical())
        throw invalid_argument_error("gap table requires a canonical instance");
    const int k = inst.num_subtrees();
    const int l = inst.num_leaves();
    if (k >= 2 && !(inst.mean(0, 0) > inst.mean(1, 0)))
        throw degenerate_instance_error("gap table requires a unique optimal subtree");

    // competitor reference: the runner-up min value; -inf when there is none
    const double runner_up =
        k >= 2 ? inst.mean(1, 0) : -std::numeric_limits<double>::infinity();

    gap_table table;
    table.gaps = matrix(k, l);
    for (int j = 0; j < l; ++j) table.gaps(0, j) = inst.mean(0, j) - runner_up;
    for (int i = 1; i < k; ++i)
        for (int j = 0; j < l; ++j)
            table.gaps(i, j) =
                std::max(inst.mean(0, 0) - inst.mean(i, 0), inst.mean(i, j) - inst.mean(i, 0));

    table.sorted.reserve(static_cast<std::size_t>(k) * l);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j) table.sorted.push_back({table.gaps(i, j), {i, j}});
    std::stable_sort(table.sorted.begin(), table.sorted.end(),
                     [](const gap_entry& a, const gap_entry& b) { return a.gap < b.gap; });
    return table;
}

eps_summary compute_eps_summary(const max_min_instance& inst, const gap_table& table, double eps) {
    if (eps < 0.0) throw invalid_argument_error("eps must be >= 0");
    const int k = inst.num_subtrees();
    const int n = static_cast<int>(table.sorted.size());

    eps_summary out;
    out.eps = eps;
    const double vstar = inst.mean(0, 0);
    for (int i = 0; i < k; ++i)
        if (inst.mean(i, 0) >= vstar - eps) out.good_set.push_back(i);
    out.num_good = static_cast<int>(out.good_set.size());

    out.h1 = 0.0;
    for (const auto& e : table.sorted) {
        double d = std::max(e.gap, eps);
        out.h1 += 1.0 / (d * d);
    }

    if (out.num_good == k) {
        out.trivial = true;
        return out;
    }

    // critical gap: leaf-1 gap of the best epsilon-bad subtree
    const double delta_star = table.gaps(out.num_good, 0);
    int m = -1;
    for (int r = 0; r < n; ++r)
        if (table.sorted[r].gap == delta_star) m = r; // Delta_{(m+1)} in 1-based terms
    out.delta_star = delta_star;
    out.m = m;

    double h2 = 0.0;
    for (int r = m; r < n; ++r) {
        double d = table.sorted[r].gap;
        h2 = std::max(h2, static_cast<double>(r + 1) / (d * d));
    }
    out.h2 = h2;
    return out;
}

double h_lb(const max_min_instance& inst, const gap_table& table) {
    double total = 0.0;
    for (int i = 1; i < inst.num_subtrees(); ++i) {
        double d = table.gaps(i, 0);
        total += 1.0 / (d * d);
    }
    for (int j = 1; j < inst.num_leaves(); ++j) {
        double d = table.gaps(0, j);
        total += 1.0 / (d * d);
    }
    return total;
}

generated_instance gen_experiment_instance(int num_subtrees, int num_leaves, gen_variant variant,
                                           std::uint64_t seed, bool evenly_spaced,
                                           noise_family noise) {
    if (num_subtrees < 2) throw invalid_argument_error("generator requires K >= 2");
    if (num_leaves < 1) throw invalid_argument_error("generator requires L >= 1");

    const double lowest = -0.18;
    matrix means(num_subtrees, num_leaves);
    for (int i = 0; i < num_subtrees; ++i) {
        double vi = lowest * static_cast<double>(i) / static_cast<double>(num_subtrees - 1);
        means(i, 0) = vi;
        double hi = variant == gen_variant::structured ? vi + 0.04 : 1.0;
        for (int j = 1; j < num_leaves; ++j) {
            if (evenly_spaced && variant == gen_variant::structured) {
                means(i, j) = num_leaves > 1
                                  ? vi + 0.04 * static_cast<double>(j) /
                                            static_cast<double>(num_leaves - 1)
                                  : vi;
            } else {
                double u = counter_uniform(seed, static_cast<std::uint64_t>(i),
                                           static_cast<std::uint64_t>(j), 0);
                means(i, j) = vi + u * (hi - vi);
            }
        }
    }

    generated_instance out;
    out.raw = max_min_instance(means, noise);
    auto [canon, map] = canonicalize(means, noise);
    out.canonical = std::move(canon);
    out.map = std::move(map);
    return out;
}

std::string instance_to_json(const max_min_instance& inst) {
    nlohmann::json doc;
    doc["k"] = inst.num_subtrees();
    doc["l"] = inst.num_leaves();
    doc["means"] = inst.means().nested();
    doc["noise"] = to_string(inst.noise());
    return doc.dump(2);
}

max_min_instance instance_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw invalid_instance_error(std::string("instance file parse error: ") + e.what());
    }
    if (!doc.contains("k") || !doc.contains("l") || !doc.contains("means"))
        throw invalid_instance_error("instance file requires fields k, l, means");
    const int k = doc["k"].get<int>();
    const int l = doc["l"].get<int>();
    auto nested = doc["means"].get<std::vector<std::vector<double>>>();
    if (static_cast<int>(nested.size()) != k)
        throw invalid_instance_error("instance file: means row count != k");
    for (const auto& row : nested)
        if (static_cast<int>(row.size()) != l)
            throw invalid_instance_error("instance file: means column count != l");
    noise_family noise = noise_family::gaussian;
    if (doc.contains("noise")) {
        std::string s = doc["noise"].get<std::string>();
        if (s != "gaussian" && s != "bernoulli")
            throw invalid_instance_error("instance file: noise must be gaussian or bernoulli");
        noise = noise_from_string(s);
    }
    return max_min_instance(matrix(nested), noise);
}

void write_instance_file(const max_min_instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw error("cannot open instance file for writing: " + path);
    out << instance_to_json(inst) << '\n';
}

max_min_instance read_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open instance file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return instance_from_json(buf.str());
}

} // namespace maximin
