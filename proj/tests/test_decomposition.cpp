#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace bell;
using namespace bell::testing;

TEST_CASE("chain factors of the PR box along (A,B)") {
    const ChainFactors factors = chain_factors(make_pr_box(), Ordering({0, 1}));
    // first factor: P(a|x) = 1/2 for both inputs and outcomes
    CHECK(factors.factor(0).rows() == 2);
    CHECK((factors.factor(0).array() == 0.5).all());
    // second factor: point mass on b = a ^ xy
    const Matrix& f1 = factors.factor(1);
    CHECK(f1.rows() == 8);  // (x, y, a) histories
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                const int in_prefix[2] = {x, y};
                const int out_prefix[1] = {a};
                const JointIndex row = factors.history_index(1, in_prefix, out_prefix);
                const int b = a ^ (x & y);
                CHECK(f1(row, b) == 1.0);
                CHECK(f1(row, 1 - b) == 0.0);
            }
        }
    }
    // no zero-probability histories
    for (int k = 0; k < 2; ++k) {
        for (std::uint8_t m : factors.filler_mask(k)) CHECK(m == 0);
    }
}

TEST_CASE("chain factors of a product behavior ignore the other party") {
    Scenario sc = uniform_scenario(2, 2, 2);
    const Real pa[2] = {0.3, 0.8};
    const Real pb[2] = {0.6, 0.1};
    Matrix P(4, 4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    P(sc.pack_inputs(std::vector<int>{x, y}),
                      sc.pack_outputs(std::vector<int>{a, b})) =
                        (a == 0 ? pa[x] : 1 - pa[x]) * (b == 0 ? pb[y] : 1 - pb[y]);
                }
            }
        }
    }
    const ChainFactors factors = chain_factors(Behavior(sc, P), Ordering({0, 1}));
    const Matrix& f1 = factors.factor(1);
    for (int y = 0; y < 2; ++y) {
        // all (x, a) histories with this y give the same conditional
        for (int x = 0; x < 2; ++x) {
            for (int a = 0; a < 2; ++a) {
                const int in_prefix[2] = {x, y};
                const int out_prefix[1] = {a};
                const JointIndex row = factors.history_index(1, in_prefix, out_prefix);
                CHECK(f1(row, 0) == doctest::Approx(pb[y]).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("chain factors of a deterministic local behavior mark unreachable histories") {
    // a = x, b = y, factored along (B,A): histories of the second factor with
    // b != y never occur
    const Behavior behavior = behavior_from_assignment(make_local_identity_assignment());
    const ChainFactors factors = chain_factors(behavior, Ordering({1, 0}));
    int fillers = 0;
    for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
            for (int b = 0; b < 2; ++b) {
                const int in_prefix[2] = {y, x};  // order-local: B's input first
                const int out_prefix[1] = {b};
                const JointIndex row = factors.history_index(1, in_prefix, out_prefix);
                if (b == y) {
                    CHECK(factors.filler_mask(1)[row] == 0);
                    CHECK(factors.factor(1)(row, x) == 1.0);
                } else {
                    CHECK(factors.filler_mask(1)[row] == 1);
                    ++fillers;
                }
            }
        }
    }
    CHECK(fillers == 4);
    // every conditional column sums to 1, fillers included
    for (int k = 0; k < 2; ++k) {
        const Vector sums = factors.factor(k).rowwise().sum();
        CHECK((sums.array() - 1.0).abs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("chain factors require a no-signaling behavior") {
    CHECK_THROWS_AS(
        chain_factors(behavior_from_assignment(one_way_table()), Ordering({1, 0})),
        NotNoSignaling);
}

TEST_CASE("PR box decomposes into the four order-respecting strategies") {
    const Decomposition d = decompose_ordered(make_pr_box(), Ordering({0, 1}));
    REQUIRE(d.terms.size() == 4);
    const Scenario& sc = d.terms[0].assignment.scenario();
    for (const auto& [weight, assignment] : d.terms) {
        CHECK(weight == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(respects_order(assignment, d.order));
        // a is a function of x alone; b is forced to a ^ xy
        for (int x = 0; x < 2; ++x) {
            const int a0 = assignment.output_of(
                0, sc.pack_inputs(std::vector<int>{x, 0}));
            for (int y = 0; y < 2; ++y) {
                const JointIndex xi = sc.pack_inputs(std::vector<int>{x, y});
                CHECK(assignment.output_of(0, xi) == a0);
                CHECK(assignment.output_of(1, xi) == (a0 ^ (x & y)));
            }
        }
    }
    // the four A-responses are distinct: constants 0 and 1, x, and 1 ^ x
    std::set<std::pair<int, int>> responses;
    for (const auto& term : d.terms) {
        responses.insert({term.assignment.output_of(0, sc.pack_inputs(std::vector<int>{0, 0})),
                          term.assignment.output_of(0, sc.pack_inputs(std::vector<int>{1, 0}))});
    }
    CHECK(responses.size() == 4);
    CHECK(max_abs_diff(reconstruct(d), make_pr_box()) < 1e-15);
}

TEST_CASE("a deterministic local behavior decomposes into itself") {
    const DeterministicAssignment local = make_local_identity_assignment();
    for (const Ordering& order : all_orderings(2)) {
        const Decomposition d = decompose_ordered(behavior_from_assignment(local), order);
        REQUIRE(d.terms.size() == 1);
        CHECK(d.terms[0].weight == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.terms[0].assignment == local);
    }
}

TEST_CASE("tsirelson round-trips along both orders") {
    const Behavior behavior = make_tsirelson();
    for (const Ordering& order : all_orderings(2)) {
        const Decomposition d = decompose_ordered(behavior, order);
        CHECK(max_abs_diff(reconstruct(d), behavior) < 1e-9);
        for (const auto& term : d.terms) {
            CHECK(term.weight > 0);
            CHECK(respects_order(term.assignment, order));
        }
    }
}

TEST_CASE("random no-signaling behaviors round-trip along both orders") {
    std::mt19937_64 rng(101);
    const auto vertices = no_signaling_vertices_2222();
    for (int trial = 0; trial < 60; ++trial) {
        const Behavior p = random_mixture(vertices, rng);
        for (const Ordering& order : all_orderings(2)) {
            const Decomposition d = decompose_ordered(p, order);
            CHECK(max_abs_diff(reconstruct(d), p) < 1e-9);
            Real total = 0;
            for (const auto& term : d.terms) {
                CHECK(term.weight > 0);
                CHECK(respects_order(term.assignment, order));
                total += term.weight;
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("three-party mixtures round-trip along all six orders") {
    std::mt19937_64 rng(2025);
    const auto vertices = no_signaling_vertices_3();
    std::vector<Behavior> cases;
    for (int trial = 0; trial < 4; ++trial) cases.push_back(random_mixture(vertices, rng));
    cases.push_back(pr_times_uniform_3());
    for (const Behavior& p : cases) {
        for (const Ordering& order : all_orderings(3)) {
            const Decomposition d = decompose_ordered(p, order);
            CHECK(max_abs_diff(reconstruct(d), p) < 1e-9);
            for (const auto& term : d.terms) {
                CHECK(respects_order(term.assignment, order));
            }
        }
    }
}

TEST_CASE("the filler choice does not change the reconstruction") {
    const Behavior behavior = behavior_from_assignment(make_local_identity_assignment());
    for (const Ordering& order : all_orderings(2)) {
        const Decomposition point =
            decompose_ordered(behavior, order, kEpsNorm, FillerPolicy::PointMassZero);
        const Decomposition uniform =
            decompose_ordered(behavior, order, kEpsNorm, FillerPolicy::Uniform);
        CHECK(max_abs_diff(reconstruct(point), reconstruct(uniform)) < 1e-9);
        CHECK(max_abs_diff(reconstruct(point), behavior) < 1e-9);
    }
}

TEST_CASE("decompose_ordered rejects signaling behaviors and oversized scenarios") {
    CHECK_THROWS_AS(
        decompose_ordered(behavior_from_assignment(one_way_table()), Ordering({0, 1})),
        NotNoSignaling);
    CHECK_THROWS_AS(
        decompose_ordered(make_uniform(uniform_scenario(4, 2, 2)), Ordering({0, 1, 2, 3})),
        ScenarioTooLarge);
}

TEST_CASE("ordered polytope membership") {
    const Behavior one_way = behavior_from_assignment(one_way_table());
    CHECK(in_ordered_polytope(one_way, Ordering({0, 1}), 1e-9));
    CHECK_FALSE(in_ordered_polytope(one_way, Ordering({1, 0}), 1e-9));

    std::mt19937_64 rng(404);
    const auto vertices = no_signaling_vertices_2222();
    for (int trial = 0; trial < 40; ++trial) {
        const Behavior p = random_mixture(vertices, rng);
        CHECK(in_ordered_polytope(p, Ordering({0, 1}), 1e-9));
        CHECK(in_ordered_polytope(p, Ordering({1, 0}), 1e-9));
    }
    // a cyclic deterministic behavior sits in neither order's polytope
    const Behavior cyclic = behavior_from_assignment(cyclic_table());
    CHECK_FALSE(in_ordered_polytope(cyclic, Ordering({0, 1}), 1e-9));
    CHECK_FALSE(in_ordered_polytope(cyclic, Ordering({1, 0}), 1e-9));
}

TEST_CASE("local polytope membership by the CHSH facets") {
    CHECK(in_local_polytope_2222(make_uniform(uniform_scenario(2, 2, 2)), 1e-9));
    CHECK_FALSE(in_local_polytope_2222(make_tsirelson(), 1e-9));
    CHECK_FALSE(in_local_polytope_2222(make_pr_box(), 1e-9));

    // the equal mixture of all 16 local vertices is local by construction
    std::vector<std::pair<Real, Behavior>> terms;
    for (const DeterministicAssignment& local :
         enumerate_local_assignments(uniform_scenario(2, 2, 2))) {
        terms.push_back({1.0 / 16, behavior_from_assignment(local)});
    }
    CHECK(in_local_polytope_2222(mix(terms), 1e-9));
    CHECK_THROWS_AS(in_local_polytope_2222(make_uniform(uniform_scenario(3, 2, 2)), 1e-9),
                    WrongScenario);
}

TEST_CASE("local vertices decompose with weight exactly on themselves") {
    std::mt19937_64 rng(7);
    const auto locals = enumerate_local_assignments(uniform_scenario(2, 2, 2));
    for (int trial = 0; trial < 8; ++trial) {
        const DeterministicAssignment& local = locals[rng() % locals.size()];
        const Decomposition d =
            decompose_ordered(behavior_from_assignment(local), Ordering({1, 0}));
        REQUIRE(d.terms.size() == 1);
        CHECK(d.terms[0].assignment == local);
    }
}
