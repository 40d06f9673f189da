#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "maximin/errors.hpp"
#include "maximin/instance.hpp"
#include "oracles.hpp"

using namespace maximin;

namespace {

matrix rho_instance(double rho) {
    return matrix({{rho, 1.0}, {0.0, rho * rho}});
}

} // namespace

TEST_CASE("canonicalize reorders rows and leaves") {
    auto [inst, map] = canonicalize(matrix({{0.25, 0.0}, {1.0, 0.5}}));
    CHECK(inst.means() == matrix({{0.5, 1.0}, {0.0, 0.25}}));
    CHECK(map.subtree_perm == std::vector<int>{1, 0});
    CHECK(inst.is_canonical());
    CHECK(inst.maximin_value() == 0.5);
}

TEST_CASE("canonicalize keeps canonical input and degenerate shapes fixed") {
    auto [inst, map] = canonicalize(matrix({{0.5, 1.0}, {0.0, 0.25}}));
    CHECK(inst.means() == matrix({{0.5, 1.0}, {0.0, 0.25}}));
    CHECK(map.is_identity());

    auto [single, single_map] = canonicalize(matrix({{0.3}}));
    CHECK(single.means() == matrix({{0.3}}));
    CHECK(single_map.is_identity());
}

TEST_CASE("canonicalize rejects bad matrices") {
    CHECK_THROWS_AS(canonicalize(matrix(std::vector<std::vector<double>>{})),
                    invalid_instance_error);
    CHECK_THROWS_AS(canonicalize(matrix({{0.1, std::numeric_limits<double>::infinity()}})),
                    invalid_instance_error);
    CHECK_THROWS_AS(canonicalize(matrix({{std::nan("")}})), invalid_instance_error);
}

TEST_CASE("canonical ordering holds on random matrices and the map round-trips") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        int k = 1 + static_cast<int>(rng() % 6);
        int l = 1 + static_cast<int>(rng() % 6);
        oracle::means_t raw = oracle::random_instance(rng, k, l);
        auto [inst, map] = canonicalize(matrix(raw));

        for (int i = 0; i < k; ++i)
            for (int j = 0; j + 1 < l; ++j) CHECK(inst.mean(i, j) <= inst.mean(i, j + 1));
        for (int i = 0; i + 1 < k; ++i) CHECK(inst.mean(i, 0) >= inst.mean(i + 1, 0));

        max_min_instance back = apply_inverse(inst, map);
        CHECK(back.means() == matrix(raw));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < l; ++j) {
                leaf_id raw_leaf = map.leaf_to_raw({i, j});
                leaf_id round = map.leaf_to_canonical(raw_leaf);
                CHECK(round == leaf_id{i, j});
            }
        // subtree 0 attains the raw maximin
        CHECK(inst.mean(0, 0) == max_min_instance(matrix(raw)).maximin_value());
    }
}

TEST_CASE("gap table on the rho instance") {
    auto [inst, map] = canonicalize(rho_instance(0.5));
    CHECK(inst.means() == matrix({{0.5, 1.0}, {0.0, 0.25}}));
    gap_table table = compute_gap_table(inst);
    CHECK(table.gaps == matrix({{0.5, 1.0}, {0.5, 0.5}}));
    REQUIRE(table.sorted.size() == 4);
    CHECK(table.sorted[0].gap == 0.5);
    CHECK(table.sorted[1].gap == 0.5);
    CHECK(table.sorted[2].gap == 0.5);
    CHECK(table.sorted[3].gap == 1.0);
    // row-major tie-break
    CHECK(table.sorted[0].source == leaf_id{0, 0});
    CHECK(table.sorted[1].source == leaf_id{1, 0});
    CHECK(table.sorted[2].source == leaf_id{1, 1});
}

TEST_CASE("gap table at L=1 gives the classic arm gaps") {
    auto [inst, map] = canonicalize(matrix({{0.9}, {0.5}, {0.1}}));
    gap_table table = compute_gap_table(inst);
    CHECK(table.gaps == matrix({{0.4}, {0.4}, {0.8}}));
}

TEST_CASE("gap table rejects a tied optimum") {
    auto [inst, map] = canonicalize(matrix({{0.5, 1.0}, {0.5, 0.7}}));
    CHECK_THROWS_AS(compute_gap_table(inst), degenerate_instance_error);
}

TEST_CASE("gap table matches the brute-force evaluator") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 2 + static_cast<int>(rng() % 4);
        int l = 1 + static_cast<int>(rng() % 4);
        oracle::means_t raw = oracle::random_instance(rng, k, l);
        auto [inst, map] = canonicalize(matrix(raw));
        gap_table table = compute_gap_table(inst);
        oracle::means_t expected = oracle::gaps(raw);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < l; ++j) {
                leaf_id r = map.leaf_to_raw({i, j});
                CHECK(table.gaps(i, j) ==
                      doctest::Approx(expected[static_cast<std::size_t>(r.subtree)]
                                              [static_cast<std::size_t>(r.leaf)])
                          .epsilon(1e-12));
                CHECK(table.gaps(i, j) > 0.0);
            }
    }
}

TEST_CASE("eps summary on the rho instance at eps 0") {
    auto [inst, map] = canonicalize(rho_instance(0.5));
    gap_table table = compute_gap_table(inst);
    eps_summary s = compute_eps_summary(inst, table, 0.0);
    CHECK(s.num_good == 1);
    CHECK(s.good_set == std::vector<int>{0});
    CHECK_FALSE(s.trivial);
    CHECK(*s.delta_star == 0.5);
    CHECK(*s.m == 2);
    CHECK(*s.h2 == 12.0);
    CHECK(s.h1 == 13.0);
}

TEST_CASE("eps summary marks half of the experiment subtrees good at 0.08") {
    generated_instance gi = gen_experiment_instance(10, 10, gen_variant::structured, 3);
    gap_table table = compute_gap_table(gi.canonical);
    eps_summary s = compute_eps_summary(gi.canonical, table, 0.08);
    CHECK(s.num_good == 5);
    CHECK(s.good_set == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("eps summary flags the trivial regime") {
    auto [inst, map] = canonicalize(rho_instance(0.5));
    gap_table table = compute_gap_table(inst);
    double spread = inst.mean(0, 0) - inst.mean(1, 0);
    eps_summary s = compute_eps_summary(inst, table, spread + 0.01);
    CHECK(s.trivial);
    CHECK(s.num_good == 2);
    CHECK_FALSE(s.delta_star.has_value());
    CHECK_FALSE(s.h2.has_value());
    CHECK(s.h1 > 0.0);
}

TEST_CASE("eps summary matches the brute-force enumeration") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        int k = 2 + static_cast<int>(rng() % 4);
        int l = 1 + static_cast<int>(rng() % 4);
        oracle::means_t raw = oracle::random_instance(rng, k, l);
        double eps = (trial % 3) * 0.15;
        auto [inst, map] = canonicalize(matrix(raw));
        gap_table table = compute_gap_table(inst);
        eps_summary s = compute_eps_summary(inst, table, eps);
        oracle::eps_quantities expect = oracle::eps_eval(raw, eps);
        CHECK(s.num_good == expect.num_good);
        CHECK(s.trivial == expect.trivial);
        CHECK(s.h1 == doctest::Approx(expect.h1).epsilon(1e-12));
        if (!expect.trivial) {
            CHECK(*s.delta_star == doctest::Approx(expect.delta_star).epsilon(1e-12));
            CHECK(*s.m == expect.m);
            CHECK(*s.h2 == doctest::Approx(expect.h2).epsilon(1e-12));
        }
    }
}

TEST_CASE("h2 and h1 are monotone in eps and h2 <= h1") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        int k = 2 + static_cast<int>(rng() % 4);
        int l = 1 + static_cast<int>(rng() % 4);
        auto [inst, map] = canonicalize(matrix(oracle::random_instance(rng, k, l)));
        gap_table table = compute_gap_table(inst);
        double prev_h1 = std::numeric_limits<double>::infinity();
        double prev_h2 = std::numeric_limits<double>::infinity();
        int prev_g = 0;
        for (double eps = 0.0; eps <= 0.5 + 1e-12; eps += 0.01) {
            eps_summary s = compute_eps_summary(inst, table, eps);
            CHECK(s.h1 <= prev_h1);
            CHECK(s.num_good >= prev_g);
            prev_h1 = s.h1;
            prev_g = s.num_good;
            if (!s.trivial) {
                CHECK(*s.h2 <= s.h1);
                CHECK(*s.h2 <= prev_h2);
                prev_h2 = *s.h2;
            }
        }
    }
}

TEST_CASE("h2 depends only on the gap multiset, not the tie-break") {
    // all four gaps of the rho instance tie at three values; shuffling the
    // tied block cannot change max_r r / gap^2
    auto [inst, map] = canonicalize(rho_instance(0.5));
    gap_table table = compute_gap_table(inst);
    eps_summary s = compute_eps_summary(inst, table, 0.0);

    std::vector<double> sorted_desc_ties = {0.5, 0.5, 0.5, 1.0};
    std::sort(sorted_desc_ties.begin(), sorted_desc_ties.end());
    int m = -1;
    for (std::size_t r = 0; r < sorted_desc_ties.size(); ++r)
        if (sorted_desc_ties[r] == 0.5) m = static_cast<int>(r);
    double h2 = 0.0;
    for (std::size_t r = static_cast<std::size_t>(m); r < sorted_desc_ties.size(); ++r)
        h2 = std::max(h2,
                      static_cast<double>(r + 1) / (sorted_desc_ties[r] * sorted_desc_ties[r]));
    CHECK(*s.h2 == h2);
}

TEST_CASE("h_lb on the rho instance and in the degenerate directions") {
    auto [inst, map] = canonicalize(rho_instance(0.5));
    CHECK(h_lb(inst, compute_gap_table(inst)) == doctest::Approx(5.0).epsilon(1e-12));

    // L = 1: the within-subtree term vanishes and what is left is the
    // classic sum over suboptimal arms, i.e. H1(0) minus the best arm's term
    auto [arms, arms_map] = canonicalize(matrix({{0.9}, {0.5}, {0.1}}));
    gap_table arms_table = compute_gap_table(arms);
    eps_summary arms_summary = compute_eps_summary(arms, arms_table, 0.0);
    double lb = h_lb(arms, arms_table);
    CHECK(lb == doctest::Approx(1.0 / 0.16 + 1.0 / 0.64).epsilon(1e-12));
    double best_arm_term = 1.0 / (arms_table.gaps(0, 0) * arms_table.gaps(0, 0));
    CHECK(lb == doctest::Approx(arms_summary.h1 - best_arm_term).epsilon(1e-12));

    // K = 1: the competitor sum is empty and nothing needs certifying
    auto [solo, solo_map] = canonicalize(matrix({{0.2, 0.4, 0.9}}));
    CHECK(h_lb(solo, compute_gap_table(solo)) == 0.0);
}

TEST_CASE("h_lb matches the brute-force sum and is below H1(0)") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        int k = 2 + static_cast<int>(rng() % 4);
        int l = 1 + static_cast<int>(rng() % 4);
        oracle::means_t raw = oracle::random_instance(rng, k, l);
        auto [inst, map] = canonicalize(matrix(raw));
        gap_table table = compute_gap_table(inst);
        double h = h_lb(inst, table);
        CHECK(h == doctest::Approx(oracle::h_lb_eval(raw)).epsilon(1e-12));
        CHECK(h <= compute_eps_summary(inst, table, 0.0).h1 + 1e-12);
    }
}

TEST_CASE("generator produces the experiment structure") {
    generated_instance structured = gen_experiment_instance(10, 10, gen_variant::structured, 5);
    const max_min_instance& raw = structured.raw;
    for (int i = 0; i < 10; ++i) {
        double vi = -0.18 * i / 9.0;
        CHECK(raw.min_value(i) == doctest::Approx(vi).epsilon(1e-12));
        for (int j = 0; j < 10; ++j) {
            CHECK(raw.mean(i, j) >= vi);
            CHECK(raw.mean(i, j) <= vi + 0.04);
        }
    }
    CHECK(structured.canonical.is_canonical());
    CHECK(apply_inverse(structured.canonical, structured.map).means() == raw.means());

    generated_instance random_variant = gen_experiment_instance(10, 10, gen_variant::random, 5);
    for (int i = 0; i < 10; ++i) {
        double vi = -0.18 * i / 9.0;
        for (int j = 0; j < 10; ++j) {
            CHECK(random_variant.raw.mean(i, j) >= vi);
            CHECK(random_variant.raw.mean(i, j) <= 1.0);
        }
    }
}

TEST_CASE("generator is deterministic and validates K") {
    generated_instance a = gen_experiment_instance(6, 4, gen_variant::random, 99);
    generated_instance b = gen_experiment_instance(6, 4, gen_variant::random, 99);
    CHECK(a.raw.means() == b.raw.means());
    generated_instance c = gen_experiment_instance(6, 4, gen_variant::random, 100);
    CHECK_FALSE(c.raw.means() == a.raw.means());
    CHECK_THROWS_AS(gen_experiment_instance(1, 4, gen_variant::random, 1),
                    invalid_argument_error);
}

TEST_CASE("evenly spaced assignment mode") {
    generated_instance gi = gen_experiment_instance(3, 5, gen_variant::structured, 0, true);
    for (int i = 0; i < 3; ++i) {
        double vi = -0.18 * i / 2.0;
        for (int j = 0; j < 5; ++j)
            CHECK(gi.raw.mean(i, j) == doctest::Approx(vi + 0.04 * j / 4.0).epsilon(1e-12));
    }
}

TEST_CASE("instance files round-trip 64-bit means") {
    std::mt19937_64 rng(31);
    oracle::means_t raw = oracle::random_instance(rng, 4, 3);
    max_min_instance inst{matrix(raw), noise_family::bernoulli};
    max_min_instance back = instance_from_json(instance_to_json(inst));
    CHECK(back.means() == inst.means());
    CHECK(back.noise() == noise_family::bernoulli);
    CHECK(back.num_subtrees() == 4);
    CHECK(back.num_leaves() == 3);
}

TEST_CASE("instance files reject malformed documents") {
    CHECK_THROWS_AS(instance_from_json("{"), invalid_instance_error);
    CHECK_THROWS_AS(instance_from_json(R"({"k": 2, "l": 2})"), invalid_instance_error);
    CHECK_THROWS_AS(instance_from_json(R"({"k": 2, "l": 2, "means": [[0.1, 0.2]]})"),
                    invalid_instance_error);
    CHECK_THROWS_AS(
        instance_from_json(R"({"k": 1, "l": 1, "means": [[0.1]], "noise": "cauchy"})"),
        invalid_instance_error);
}
