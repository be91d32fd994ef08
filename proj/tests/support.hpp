#ifndef BELL_TESTS_SUPPORT_HPP
#define BELL_TESTS_SUPPORT_HPP

#include "bell/behavior.hpp"
#include "bell/decomposition.hpp"

#include <random>
#include <vector>

namespace bell::testing {

// The one-way signaling table used throughout: a = 0, b = x*y.
inline DeterministicAssignment one_way_table() { return make_and_signaling_assignment(0, 1); }

// The cyclic table: a = y, b = x.
inline DeterministicAssignment cyclic_table() { return make_cyclic_swap_assignment(); }

// PR-box symmetry: P(ab|xy) = 1/2 iff a^b = xy ^ alpha*x ^ beta*y ^ gamma.
inline Behavior pr_variant(int alpha, int beta, int gamma) {
    Scenario sc = uniform_scenario(2, 2, 2);
    Matrix P = Matrix::Zero(4, 4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    if ((a ^ b) == ((x & y) ^ (alpha & x) ^ (beta & y) ^ gamma)) {
                        P(sc.pack_inputs(std::vector<int>{x, y}),
                          sc.pack_outputs(std::vector<int>{a, b})) = 0.5;
                    }
                }
            }
        }
    }
    return Behavior(sc, std::move(P));
}

inline std::vector<Behavior> no_signaling_vertices_2222() {
    std::vector<Behavior> vertices;
    for (int alpha = 0; alpha < 2; ++alpha) {
        for (int beta = 0; beta < 2; ++beta) {
            for (int gamma = 0; gamma < 2; ++gamma) {
                vertices.push_back(pr_variant(alpha, beta, gamma));
            }
        }
    }
    for (const DeterministicAssignment& local :
         enumerate_local_assignments(uniform_scenario(2, 2, 2))) {
        vertices.push_back(behavior_from_assignment(local));
    }
    return vertices;
}

// PR box between parties 0 and 1 times uniform noise on party 2.
inline Behavior pr_times_uniform_3() {
    Scenario sc = uniform_scenario(3, 2, 2);
    Matrix P = Matrix::Zero(sc.joint_inputs(), sc.joint_outputs());
    for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        const std::vector<int> xs = sc.unpack_inputs(x);
        for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
            const std::vector<int> as = sc.unpack_outputs(a);
            if ((as[0] ^ as[1]) == (xs[0] & xs[1])) {
                P(x, a) = 0.25;
            }
        }
    }
    return Behavior(sc, std::move(P));
}

inline std::vector<Behavior> no_signaling_vertices_3() {
    std::vector<Behavior> vertices;
    for (const DeterministicAssignment& local :
         enumerate_local_assignments(uniform_scenario(3, 2, 2))) {
        vertices.push_back(behavior_from_assignment(local));
    }
    vertices.push_back(pr_times_uniform_3());
    return vertices;
}

// Random convex mixture of the given behaviors.
inline Behavior random_mixture(const std::vector<Behavior>& vertices, std::mt19937_64& rng) {
    std::exponential_distribution<Real> expo(1.0);
    std::vector<std::pair<Real, Behavior>> terms;
    Real total = 0;
    std::vector<Real> weights(vertices.size());
    for (Real& w : weights) {
        w = expo(rng);
        total += w;
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        terms.push_back({weights[i] / total, vertices[i]});
    }
    return mix(terms);
}

inline Real max_abs_diff(const Behavior& p, const Behavior& q) {
    return (p.probs() - q.probs()).cwiseAbs().maxCoeff();
}

}  // namespace bell::testing

#endif  // BELL_TESTS_SUPPORT_HPP
