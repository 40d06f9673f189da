#include "maximin/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "maximin/errors.hpp"

namespace maximin {

double kl_gaussian(double mean_a, double mean_b) {
    double d = mean_a - mean_b;
    return d * d / 2.0;
}

double bh_floor(double kl) {
    if (kl < 0.0) throw invalid_argument_error("bh_floor requires kl >= 0");
    return 0.5 * std::exp(-kl);
}

double bai_complexity(const std::vector<double>& means) {
    if (means.size() < 2) throw invalid_argument_error("bai_complexity requires >= 2 arms");
    std::size_t best = 0;
    for (std::size_t i = 1; i < means.size(); ++i)
        if (means[i] > means[best]) best = i;
    double h = 0.0;
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (i == best) continue;
        double d = means[best] - means[i];
        if (d <= 0.0) throw degenerate_instance_error("bai_complexity requires a unique best arm");
        h += 1.0 / (d * d);
    }
    return h;
}

flip_family build_flip_family(const std::vector<double>& d) {
    if (d.empty()) throw invalid_argument_error("flip family requires at least one gap");
    for (double v : d)
        if (!(v > 0.0)) throw invalid_argument_error("flip family gaps must be positive");

    const std::size_t k = d.size() + 1;
    flip_family fam;
    fam.base_means.resize(k);
    fam.base_means[0] = 0.5;
    for (std::size_t i = 1; i < k; ++i) fam.base_means[i] = 0.5 - d[i - 1];

    // complexities straight from the gap parameters, summed in one fixed
    // order: in the base the gap of arm i is d_i, in alternative i the gap
    // of arm 1 is d_i and of any other arm d_i + d_k, so the alternative's
    // sum is dominated term by term (with equality at K = 2)
    fam.h_base = 0.0;
    for (double v : d) fam.h_base += 1.0 / (v * v);

    for (std::size_t i = 1; i < k; ++i) {
        std::vector<double> alt = fam.base_means;
        alt[i] = 0.5 + d[i - 1];
        double h = 0.0;
        for (std::size_t t = 0; t < d.size(); ++t) {
            double gap = t == i - 1 ? d[t] : d[i - 1] + d[t];
            h += 1.0 / (gap * gap);
        }
        fam.alt_means.push_back(std::move(alt));
        fam.h_alts.push_back(h);
    }
    return fam;
}

namespace {

void require_gaussian_base(const max_min_instance& base) {
    if (base.noise() != noise_family::gaussian)
        throw noise_mismatch_error("lower-bound tooling requires Gaussian rewards");
    if (!base.is_canonical())
        throw invalid_argument_error("lower-bound tooling requires a canonical instance");
    if (base.num_subtrees() < 2)
        throw degenerate_instance_error("lower-bound constructions require K >= 2");
    if (!base.has_unique_optimum())
        throw degenerate_instance_error("lower-bound constructions require a unique optimum");
}

// H(nu) and the gap matrix of an arbitrary-labeling instance, expressed in
// that instance's own labels.
std::pair<double, matrix> complexity_and_gaps(const max_min_instance& inst) {
    auto [canon, map] = canonicalize(inst.means(), inst.noise());
    gap_table table = compute_gap_table(canon);
    matrix in_own_labels(inst.num_subtrees(), inst.num_leaves(), 0.0);
    double h = 0.0;
    for (int c = 0; c < canon.num_subtrees(); ++c)
        for (int j = 0; j < canon.num_leaves(); ++j) {
            leaf_id raw = map.leaf_to_raw({c, j});
            in_own_labels(raw.subtree, raw.leaf) = table.gaps(c, j);
            h += 1.0 / (table.gaps(c, j) * table.gaps(c, j));
        }
    return {h, in_own_labels};
}

} // namespace

alternative_family build_alt_family(const max_min_instance& base) {
    require_gaussian_base(base);
    const int k = base.num_subtrees();
    const int l = base.num_leaves();

    gap_table table = compute_gap_table(base);
    alternative_family fam;
    fam.base = base;
    fam.h_lb_base = h_lb(base, table);
    fam.h_base = 0.0;
    for (const auto& e : table.sorted) fam.h_base += 1.0 / (e.gap * e.gap);

    auto add_alternative = [&](leaf_id critical, matrix means) {
        alternative_instance alt;
        alt.critical = critical;
        alt.shifted = max_min_instance(std::move(means), noise_family::gaussian);
        alt.optimal_subtree = alt.shifted.optimal_subtree();
        if (alt.optimal_subtree == 0)
            throw inconsistency_error("alternative instance kept subtree 0 optimal");
        auto [h, gaps] = complexity_and_gaps(alt.shifted);
        alt.h = h;
        alt.gaps_in_base_labels = std::move(gaps);
        alt.h_ratio = alt.h / fam.h_base;
        alt.min_gap_ratio = std::numeric_limits<double>::infinity();
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < l; ++b)
                alt.min_gap_ratio = std::min(alt.min_gap_ratio,
                                             alt.gaps_in_base_labels(a, b) / table.gaps(a, b));
        fam.alternatives.push_back(std::move(alt));
    };

    // competitor subtrees raised above the optimum
    for (int i = 1; i < k; ++i) {
        matrix means = base.means();
        double shift = 2.0 * table.gaps(i, 0);
        for (int j = 0; j < l; ++j) means(i, j) += shift;
        add_alternative({i, 0}, std::move(means));
    }
    // non-minimizing leaves of the optimal subtree pushed below the runner-up
    for (int j = 1; j < l; ++j) {
        matrix means = base.means();
        means(0, j) -= 2.0 * table.gaps(0, j);
        add_alternative({0, j}, std::move(means));
    }
    return fam;
}

double lb_exponent(const max_min_instance& base, std::int64_t budget) {
    require_gaussian_base(base);
    if (budget < 0) throw invalid_argument_error("budget must be >= 0");
    gap_table table = compute_gap_table(base);
    double h = h_lb(base, table);
    return 0.25 * std::exp(-2.0 * static_cast<double>(budget) / h);
}

std::pair<double, double> kl_budget_identity(const max_min_instance& base,
                                             const max_min_instance& alt, const transcript& tr) {
    if (base.noise() != noise_family::gaussian || alt.noise() != noise_family::gaussian)
        throw noise_mismatch_error("kl budget identity requires Gaussian rewards");
    if (base.num_subtrees() != alt.num_subtrees() || base.num_leaves() != alt.num_leaves())
        throw inconsistency_error("base and alternative shapes differ");
    if (tr.pulls.rows() != base.num_subtrees() || tr.pulls.cols() != base.num_leaves())
        throw inconsistency_error("transcript shape does not match the instances");

    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < base.num_subtrees(); ++i)
        for (int j = 0; j < base.num_leaves(); ++j) {
            double mu = base.mean(i, j);
            double mu_alt = alt.mean(i, j);
            if (mu == mu_alt) continue;
            double n = static_cast<double>(tr.pulls(i, j));
            // log dN(mu,1)/dN(mu',1)(x) = (mu - mu') x - (mu^2 - mu'^2)/2
            lhs += (mu - mu_alt) * tr.sums(i, j) - n * (mu * mu - mu_alt * mu_alt) / 2.0;
            rhs += n * kl_gaussian(mu, mu_alt);
        }
    return {lhs, rhs};
}

counterexample_22_result counterexample_22(double rho) {
    if (!(rho > 0.0 && rho < 1.0))
        throw invalid_argument_error("counterexample_22 requires rho in (0, 1)");
    counterexample_22_result out;
    out.h1_flatten = 1.0 / ((1.0 - rho) * (1.0 - rho)) +
                     1.0 / ((1.0 - rho * rho) * (1.0 - rho * rho)) + 1.0;
    out.h1_tree = 1.0 + 3.0 / (rho * rho);
    out.ratio = out.h1_flatten / out.h1_tree;
    return out;
}

namespace {

void require_permutation(const std::vector<int>& perm, int size, const char* what) {
    if (static_cast<int>(perm.size()) != size)
        throw invalid_argument_error(std::string(what) + ": wrong size");
    std::vector<char> seen(perm.size(), 0);
    for (int v : perm) {
        if (v < 0 || v >= size || seen[static_cast<std::size_t>(v)])
            throw invalid_argument_error(std::string(what) + ": not a permutation");
        seen[static_cast<std::size_t>(v)] = 1;
    }
}

} // namespace

max_min_instance subtree_preserving_permute(const max_min_instance& inst,
                                            const std::vector<int>& sigma0,
                                            const std::vector<std::vector<int>>& sigmas) {
    const int k = inst.num_subtrees();
    const int l = inst.num_leaves();
    require_permutation(sigma0, k, "subtree permutation");
    if (static_cast<int>(sigmas.size()) != k)
        throw invalid_argument_error("need one leaf permutation per subtree");
    for (const auto& s : sigmas) require_permutation(s, l, "leaf permutation");

    matrix means(k, l);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < l; ++j) means(i, j) = inst.mean(sigma0[i], sigmas[i][j]);
    return max_min_instance(std::move(means), inst.noise());
}

} // namespace maximin
