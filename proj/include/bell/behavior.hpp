#ifndef BELL_BEHAVIOR_HPP
#define BELL_BEHAVIOR_HPP

#include "bell/assignment.hpp"
#include "bell/scenario.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace bell {

/// A behavior: the conditional probability table P(a⃗|x⃗) over a scenario,
/// stored dense with joint inputs as rows and joint outputs as columns.
/// Immutable after construction.
class Behavior {
public:
    Behavior(Scenario scenario, Matrix probs);

    const Scenario& scenario() const { return scenario_; }
    const Matrix& probs() const { return probs_; }
    Real prob(JointIndex input_index, JointIndex output_index) const {
        return probs_(input_index, output_index);
    }

private:
    Scenario scenario_;
    Matrix probs_;
};

struct ValidationReport {
    bool normalized = false;
    bool entries_in_range = false;
    Real worst_deviation = 0;
};

/// normalized iff every input-conditional row sums to 1 within tol;
/// worst_deviation is the largest row-sum or range defect found.
ValidationReport validate(const Behavior& behavior, Real tol = kEpsNorm);

struct NoSignalingWitness {
    int party = -1;            // whose input flip moves the others' marginal
    JointIndex input_a = 0;    // the two joint inputs differing only at `party`
    JointIndex input_b = 0;
    Real deviation = 0;
};

struct NoSignalingReport {
    bool holds = false;
    Real worst_violation = 0;
    std::optional<NoSignalingWitness> witness;
};

class NotNoSignaling : public Error {
public:
    NotNoSignaling(const std::string& message, NoSignalingWitness witness)
        : Error(message), witness(witness) {}
    NoSignalingWitness witness;
};

/// Checks that for every party the marginal distribution of the other
/// parties' outputs is unchanged under that party's input flips (sufficient
/// for the full no-signaling condition on complete behaviors). Throws
/// InvalidBehavior when validate() fails at the same tolerance.
NoSignalingReport is_no_signaling(const Behavior& behavior, Real tol = kEpsNorm);

/// A linear functional on behaviors together with its classical bound.
struct BellFunctional {
    Scenario scenario;
    Matrix coefficients;  // same shape as a behavior table
    Real classical_bound = 0;
};

Real evaluate(const BellFunctional& functional, const Behavior& behavior);

/// The CHSH functional S = sum_{xy} (-1)^{xy} E_xy with
/// E_xy = sum_{ab} (-1)^{a+b} P(ab|xy); classical bound 2.
BellFunctional chsh_functional();

/// S for a two-party binary behavior; throws WrongScenario otherwise.
Real chsh_value(const Behavior& behavior);

/// P(ab|xy) = 1/2 if a xor b = x and y, else 0. S = 4.
Behavior make_pr_box();

/// Two-party binary behavior with correlators E_xy = -cos(angles_a[x] -
/// angles_b[y]) and uniform marginals (the singlet correlations for
/// measurements in a plane).
Behavior make_singlet_behavior(const std::array<Real, 2>& angles_a,
                               const std::array<Real, 2>& angles_b);

/// Measurement angles (a0, a1, b0, b1) maximizing |S| of
/// make_singlet_behavior at 2*sqrt(2).
std::array<Real, 4> singlet_chsh_angles();

/// E_00 = E_01 = E_10 = sqrt(2)/2 = -E_11 with uniform marginals; S = 2*sqrt(2).
Behavior make_tsirelson();

/// The uniform noise behavior over a scenario.
Behavior make_uniform(const Scenario& scenario);

/// The degenerate single-assignment behavior: probs[x⃗, a⃗] = 1 iff the
/// assignment maps x⃗ to a⃗.
Behavior behavior_from_assignment(const DeterministicAssignment& assignment);

/// Entrywise convex combination. Throws WeightSum unless the weights are
/// non-negative and sum to 1 within kEpsNorm, ScenarioMismatch on mixed
/// scenarios.
Behavior mix(const std::vector<std::pair<Real, Behavior>>& terms);

}  // namespace bell

#endif  // BELL_BEHAVIOR_HPP
