#include <doctest.h>

#include "support.hpp"

#include <cmath>
#include <random>

using namespace bell;
using namespace bell::testing;

namespace {
const Real kRoot2 = std::sqrt(Real(2));
}

TEST_CASE("validate accepts the PR box exactly") {
    const ValidationReport report = validate(make_pr_box(), 1e-9);
    CHECK(report.normalized);
    CHECK(report.entries_in_range);
    CHECK(report.worst_deviation == 0.0);
}

TEST_CASE("validate flags a deficient row") {
    Scenario sc = uniform_scenario(2, 2, 2);
    Matrix P = make_pr_box().probs();
    P.row(2) *= 0.9;  // row sums to 0.9
    const ValidationReport report = validate(Behavior(sc, P), 1e-9);
    CHECK_FALSE(report.normalized);
    CHECK(report.worst_deviation == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("validate accepts the tsirelson fixture") {
    // independent oracle: sum each row by hand
    const Behavior behavior = make_tsirelson();
    for (JointIndex x = 0; x < 4; ++x) {
        Real total = 0;
        for (JointIndex a = 0; a < 4; ++a) total += behavior.prob(x, a);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(validate(behavior, 1e-9).normalized);
    CHECK(validate(behavior, 1e-12).normalized);
}

TEST_CASE("no-signaling holds for PR, tsirelson and product behaviors") {
    CHECK(is_no_signaling(make_pr_box(), 1e-12).holds);
    CHECK(is_no_signaling(make_tsirelson(), 1e-12).holds);
    CHECK(is_no_signaling(make_singlet_behavior({0.3, 1.1}, {-0.2, 2.0}), 1e-12).holds);

    // P_A(a|x) * P_B(b|y) factorizes, so marginals cannot move
    Scenario sc = uniform_scenario(2, 2, 2);
    const Real pa[2] = {0.3, 0.8};  // P(a=0|x)
    const Real pb[2] = {0.6, 0.1};
    Matrix P(4, 4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const Real fa = a == 0 ? pa[x] : 1 - pa[x];
                    const Real fb = b == 0 ? pb[y] : 1 - pb[y];
                    P(sc.pack_inputs(std::vector<int>{x, y}),
                      sc.pack_outputs(std::vector<int>{a, b})) = fa * fb;
                }
            }
        }
    }
    CHECK(is_no_signaling(Behavior(sc, P), 1e-12).holds);
}

TEST_CASE("no-signaling fails for the one-way table with the right witness") {
    const Behavior behavior = behavior_from_assignment(one_way_table());
    const NoSignalingReport report = is_no_signaling(behavior, 1e-9);
    CHECK_FALSE(report.holds);
    CHECK(report.worst_violation == doctest::Approx(1.0));
    REQUIRE(report.witness.has_value());
    // B's marginal depends on x when y = 1: the flipped party is A and both
    // witness inputs have y = 1
    const Scenario& sc = behavior.scenario();
    CHECK(report.witness->party == 0);
    CHECK(sc.input_digit(report.witness->input_a, 1) == 1);
    CHECK(sc.input_digit(report.witness->input_b, 1) == 1);
}

TEST_CASE("is_no_signaling rejects invalid behaviors") {
    Matrix P = make_pr_box().probs();
    P(0, 0) += 0.5;
    CHECK_THROWS_AS(is_no_signaling(Behavior(uniform_scenario(2, 2, 2), P), 1e-9),
                    InvalidBehavior);
}

TEST_CASE("chsh values of the canonical behaviors") {
    CHECK(chsh_value(behavior_from_assignment(one_way_table())) == 4.0);
    CHECK(chsh_value(make_pr_box()) == 4.0);
    CHECK(chsh_value(make_uniform(uniform_scenario(2, 2, 2))) == 0.0);
    CHECK(chsh_value(make_tsirelson()) == doctest::Approx(2 * kRoot2).epsilon(1e-12));
    CHECK_THROWS_AS(chsh_value(make_uniform(uniform_scenario(3, 2, 2))), WrongScenario);
}

TEST_CASE("every pointwise-winning assignment reaches S = 4 exactly") {
    // assignments with (a+b) mod 2 = xy in every context: 2 choices per
    // context, 16 in total
    Scenario sc = uniform_scenario(2, 2, 2);
    int count = 0;
    for (int c0 = 0; c0 < 2; ++c0) {
        for (int c1 = 0; c1 < 2; ++c1) {
            for (int c2 = 0; c2 < 2; ++c2) {
                for (int c3 = 0; c3 < 2; ++c3) {
                    const int first[4] = {c0, c1, c2, c3};
                    std::vector<JointIndex> table(4);
                    for (int x = 0; x < 2; ++x) {
                        for (int y = 0; y < 2; ++y) {
                            const JointIndex xi = sc.pack_inputs(std::vector<int>{x, y});
                            const int a = first[xi];
                            const int b = a ^ (x & y);
                            table[xi] = sc.pack_outputs(std::vector<int>{a, b});
                        }
                    }
                    CHECK(chsh_value(behavior_from_assignment(
                              DeterministicAssignment(sc, table))) == 4.0);
                    ++count;
                }
            }
        }
    }
    CHECK(count == 16);
}

TEST_CASE("pr box entries") {
    const Behavior pr = make_pr_box();
    const Scenario& sc = pr.scenario();
    CHECK(pr.prob(sc.pack_inputs(std::vector<int>{1, 1}),
                  sc.pack_outputs(std::vector<int>{0, 1})) == 0.5);
    CHECK(pr.prob(sc.pack_inputs(std::vector<int>{0, 0}),
                  sc.pack_outputs(std::vector<int>{0, 1})) == 0.0);
}

TEST_CASE("singlet behavior hits the quantum boundary at the fixture angles") {
    const auto angles = singlet_chsh_angles();
    const Behavior best =
        make_singlet_behavior({angles[0], angles[1]}, {angles[2], angles[3]});
    CHECK(std::abs(chsh_value(best)) == doctest::Approx(2 * kRoot2).epsilon(1e-12));

    // equal angles give perfect anticorrelation on equal settings
    const Behavior anti = make_singlet_behavior({0.4, 1.2}, {0.4, 1.2});
    const Scenario& sc = anti.scenario();
    for (int x = 0; x < 2; ++x) {
        CHECK(anti.prob(sc.pack_inputs(std::vector<int>{x, x}),
                        sc.pack_outputs(std::vector<int>{0, 0})) == doctest::Approx(0.0));
        CHECK(anti.prob(sc.pack_inputs(std::vector<int>{x, x}),
                        sc.pack_outputs(std::vector<int>{0, 1})) == doctest::Approx(0.5));
    }
}

TEST_CASE("random search cannot beat the singlet fixture") {
    // numeric maximization oracle: random restarts plus axis-wise refinement
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<Real> angle(-3.15, 3.15);
    Real best = 0;
    for (int restart = 0; restart < 60; ++restart) {
        std::array<Real, 4> a{angle(rng), angle(rng), angle(rng), angle(rng)};
        Real value = std::abs(chsh_value(make_singlet_behavior({a[0], a[1]}, {a[2], a[3]})));
        Real step = 0.5;
        while (step > 1e-7) {
            bool improved = false;
            for (int i = 0; i < 4; ++i) {
                for (Real delta : {step, -step}) {
                    std::array<Real, 4> trial = a;
                    trial[i] += delta;
                    const Real v = std::abs(
                        chsh_value(make_singlet_behavior({trial[0], trial[1]},
                                                         {trial[2], trial[3]})));
                    if (v > value) {
                        value = v;
                        a = trial;
                        improved = true;
                    }
                }
            }
            if (!improved) step /= 2;
        }
        best = std::max(best, value);
    }
    CHECK(best <= 2 * kRoot2 + 1e-9);
    CHECK(best == doctest::Approx(2 * kRoot2).epsilon(1e-6));
}

TEST_CASE("behavior_from_assignment places exactly one unit per row") {
    std::mt19937_64 rng(5);
    Scenario sc({2, 3}, {3, 2});
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<JointIndex> table(sc.joint_inputs());
        for (auto& t : table) t = static_cast<JointIndex>(rng() % sc.joint_outputs());
        const Behavior behavior =
            behavior_from_assignment(DeterministicAssignment(sc, table));
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            int units = 0;
            for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
                if (behavior.prob(x, a) == 1.0) ++units;
                else CHECK(behavior.prob(x, a) == 0.0);
            }
            CHECK(units == 1);
        }
    }
}

TEST_CASE("one-way table behavior rows") {
    const Behavior behavior = behavior_from_assignment(one_way_table());
    const Scenario& sc = behavior.scenario();
    CHECK(behavior.prob(sc.pack_inputs(std::vector<int>{1, 1}),
                        sc.pack_outputs(std::vector<int>{0, 1})) == 1.0);
    CHECK(behavior.prob(sc.pack_inputs(std::vector<int>{0, 1}),
                        sc.pack_outputs(std::vector<int>{0, 0})) == 1.0);
}

TEST_CASE("mix is the identity on a single term") {
    const Behavior pr = make_pr_box();
    const Behavior mixed = mix({{1.0, pr}});
    CHECK(max_abs_diff(pr, mixed) == 0.0);
}

TEST_CASE("equal mixture of the four PR strategies is the PR box") {
    // the four order-(A,B) strategies: a constant or a copy of x, b = a ^ xy
    Scenario sc = uniform_scenario(2, 2, 2);
    std::vector<std::pair<Real, Behavior>> terms;
    for (int which = 0; which < 4; ++which) {
        std::vector<JointIndex> table(4);
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                int a = 0;
                switch (which) {
                    case 0: a = 0; break;
                    case 1: a = 1; break;
                    case 2: a = x; break;
                    case 3: a = 1 ^ x; break;
                }
                const int b = a ^ (x & y);
                table[sc.pack_inputs(std::vector<int>{x, y})] =
                    sc.pack_outputs(std::vector<int>{a, b});
            }
        }
        terms.push_back({0.25, behavior_from_assignment(DeterministicAssignment(sc, table))});
    }
    CHECK(max_abs_diff(mix(terms), make_pr_box()) == 0.0);
}

TEST_CASE("half PR plus half noise sits on the classical boundary") {
    const Behavior mixed = mix({{0.5, make_pr_box()}, {0.5, make_uniform(uniform_scenario(2, 2, 2))}});
    CHECK(chsh_value(mixed) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("chsh is linear under mixing") {
    std::mt19937_64 rng(77);
    const auto vertices = no_signaling_vertices_2222();
    for (int trial = 0; trial < 30; ++trial) {
        const Behavior p = random_mixture(vertices, rng);
        const Behavior q = random_mixture(vertices, rng);
        const Real w = std::uniform_real_distribution<Real>(0, 1)(rng);
        const Real lhs = chsh_value(mix({{w, p}, {1 - w, q}}));
        const Real rhs = w * chsh_value(p) + (1 - w) * chsh_value(q);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("mix rejects bad weights and mixed scenarios") {
    const Behavior pr = make_pr_box();
    CHECK_THROWS_AS(mix({{0.5, pr}, {0.4, pr}}), WeightSum);
    CHECK_THROWS_AS(mix({{1.5, pr}, {-0.5, pr}}), WeightSum);
    CHECK_THROWS_AS(mix({{0.5, pr}, {0.5, make_uniform(uniform_scenario(3, 2, 2))}}),
                    ScenarioMismatch);
}

TEST_CASE("generated behaviors validate and are no-signaling at 1e-12") {
    const std::vector<Behavior> generated{
        make_pr_box(), make_tsirelson(), make_singlet_behavior({0.1, 0.9}, {2.2, -0.7})};
    for (const Behavior& behavior : generated) {
        const ValidationReport v = validate(behavior, 1e-12);
        CHECK(v.normalized);
        CHECK(v.entries_in_range);
        CHECK(is_no_signaling(behavior, 1e-12).holds);
    }
}

TEST_CASE("bell functional evaluation is linear in the table") {
    const BellFunctional chsh = chsh_functional();
    CHECK(chsh.classical_bound == 2.0);
    CHECK(evaluate(chsh, make_pr_box()) == 4.0);
    CHECK_THROWS_AS(evaluate(chsh, make_uniform(uniform_scenario(3, 2, 2))), ScenarioMismatch);
}
