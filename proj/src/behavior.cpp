#include "bell/behavior.hpp"

#include <cmath>
#include <numbers>

namespace bell {

Behavior::Behavior(Scenario scenario, Matrix probs)
    : scenario_(std::move(scenario)), probs_(std::move(probs)) {
    if (scenario_.joint_inputs() * scenario_.joint_outputs() > kMaxTableCells) {
        throw ScenarioTooLarge("behavior table would exceed " + std::to_string(kMaxTableCells) +
                               " cells");
    }
    if (probs_.rows() != scenario_.joint_inputs() || probs_.cols() != scenario_.joint_outputs()) {
        throw ScenarioMismatch("behavior table shape does not match scenario");
    }
}

ValidationReport validate(const Behavior& behavior, Real tol) {
    const Matrix& P = behavior.probs();
    ValidationReport report;
    const Real row_dev = (P.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const Real below = std::max(Real(0), -P.minCoeff());
    const Real above = std::max(Real(0), P.maxCoeff() - 1.0);
    const Real range_dev = std::max(below, above);
    report.normalized = row_dev <= tol;
    report.entries_in_range = range_dev <= tol;
    report.worst_deviation = std::max(row_dev, range_dev);
    return report;
}

NoSignalingReport is_no_signaling(const Behavior& behavior, Real tol) {
    const ValidationReport v = validate(behavior, tol);
    if (!v.normalized || !v.entries_in_range) {
        throw InvalidBehavior("behavior fails validation (worst deviation " +
                              std::to_string(v.worst_deviation) + ")");
    }
    const Scenario& sc = behavior.scenario();
    const Matrix& P = behavior.probs();
    const int n = sc.parties();

    NoSignalingReport report;
    report.worst_violation = 0;

    // Marginal of the other parties' outputs under a fixed joint input,
    // indexed by the joint output with party `party`'s digit forced to 0.
    std::vector<Real> marg_a(static_cast<std::size_t>(sc.joint_outputs()));
    std::vector<Real> marg_b(static_cast<std::size_t>(sc.joint_outputs()));
    auto others_marginal = [&](JointIndex x, int party, std::vector<Real>& marg) {
        std::fill(marg.begin(), marg.end(), Real(0));
        for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
            std::vector<int> digits = sc.unpack_outputs(a);
            digits[party] = 0;
            marg[static_cast<std::size_t>(sc.pack_outputs(digits))] += P(x, a);
        }
    };

    for (int party = 0; party < n; ++party) {
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            if (sc.input_digit(x, party) != 0) continue;
            others_marginal(x, party, marg_a);
            std::vector<int> digits = sc.unpack_inputs(x);
            for (int v = 1; v < sc.input_card(party); ++v) {
                digits[party] = v;
                const JointIndex x2 = sc.pack_inputs(digits);
                others_marginal(x2, party, marg_b);
                Real dev = 0;
                for (std::size_t i = 0; i < marg_a.size(); ++i) {
                    dev = std::max(dev, std::abs(marg_a[i] - marg_b[i]));
                }
                if (dev > report.worst_violation) {
                    report.worst_violation = dev;
                    report.witness = NoSignalingWitness{party, x, x2, dev};
                }
            }
        }
    }
    report.holds = report.worst_violation <= tol;
    if (report.holds) report.witness.reset();
    return report;
}

Real evaluate(const BellFunctional& functional, const Behavior& behavior) {
    if (!(functional.scenario == behavior.scenario())) {
        throw ScenarioMismatch("functional and behavior scenarios differ");
    }
    return functional.coefficients.cwiseProduct(behavior.probs()).sum();
}

BellFunctional chsh_functional() {
    Scenario sc = uniform_scenario(2, 2, 2);
    Matrix coeff(4, 4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const Real sign = ((x * y + a + b) % 2 == 0) ? 1.0 : -1.0;
                    coeff(sc.pack_inputs(std::vector<int>{x, y}),
                          sc.pack_outputs(std::vector<int>{a, b})) = sign;
                }
            }
        }
    }
    return BellFunctional{std::move(sc), std::move(coeff), 2.0};
}

Real chsh_value(const Behavior& behavior) {
    static const BellFunctional chsh = chsh_functional();
    if (!(behavior.scenario() == chsh.scenario)) {
        throw WrongScenario("CHSH needs two parties with binary inputs and outputs");
    }
    return evaluate(chsh, behavior);
}

namespace {

Behavior correlator_behavior(const std::array<std::array<Real, 2>, 2>& E) {
    Scenario sc = uniform_scenario(2, 2, 2);
    Matrix P(4, 4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const Real sign = ((a ^ b) == 0) ? 1.0 : -1.0;
                    P(sc.pack_inputs(std::vector<int>{x, y}),
                      sc.pack_outputs(std::vector<int>{a, b})) = (1.0 + sign * E[x][y]) / 4.0;
                }
            }
        }
    }
    return Behavior(std::move(sc), std::move(P));
}

}  // namespace

Behavior make_pr_box() {
    Scenario sc = uniform_scenario(2, 2, 2);
    Matrix P = Matrix::Zero(4, 4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    if ((a ^ b) == (x & y)) {
                        P(sc.pack_inputs(std::vector<int>{x, y}),
                          sc.pack_outputs(std::vector<int>{a, b})) = 0.5;
                    }
                }
            }
        }
    }
    return Behavior(std::move(sc), std::move(P));
}

Behavior make_singlet_behavior(const std::array<Real, 2>& angles_a,
                               const std::array<Real, 2>& angles_b) {
    std::array<std::array<Real, 2>, 2> E{};
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            E[x][y] = -std::cos(angles_a[x] - angles_b[y]);
        }
    }
    return correlator_behavior(E);
}

std::array<Real, 4> singlet_chsh_angles() {
    constexpr Real pi = std::numbers::pi_v<Real>;
    return {0.0, pi / 2, -3 * pi / 4, 3 * pi / 4};
}

Behavior make_tsirelson() {
    const Real e = std::sqrt(Real(2)) / 2;
    return correlator_behavior({{{e, e}, {e, -e}}});
}

Behavior make_uniform(const Scenario& sc) {
    Matrix P = Matrix::Constant(sc.joint_inputs(), sc.joint_outputs(),
                                Real(1) / static_cast<Real>(sc.joint_outputs()));
    return Behavior(sc, std::move(P));
}

Behavior behavior_from_assignment(const DeterministicAssignment& assignment) {
    const Scenario& sc = assignment.scenario();
    Matrix P = Matrix::Zero(sc.joint_inputs(), sc.joint_outputs());
    for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        P(x, assignment.output_index(x)) = 1.0;
    }
    return Behavior(sc, std::move(P));
}

Behavior mix(const std::vector<std::pair<Real, Behavior>>& terms) {
    if (terms.empty()) {
        throw WeightSum("mix needs at least one term");
    }
    Real total = 0;
    for (const auto& [w, behavior] : terms) {
        if (w < 0) throw WeightSum("mixture weights must be non-negative");
        total += w;
        if (!(behavior.scenario() == terms.front().second.scenario())) {
            throw ScenarioMismatch("all mixture terms must share one scenario");
        }
    }
    if (std::abs(total - 1.0) > kEpsNorm) {
        throw WeightSum("mixture weights sum to " + std::to_string(total) + ", expected 1");
    }
    Matrix P = Matrix::Zero(terms.front().second.probs().rows(),
                            terms.front().second.probs().cols());
    for (const auto& [w, behavior] : terms) {
        P += w * behavior.probs();
    }
    return Behavior(terms.front().second.scenario(), std::move(P));
}

}  // namespace bell
