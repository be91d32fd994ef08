#ifndef BELL_DECOMPOSITION_HPP
#define BELL_DECOMPOSITION_HPP

#include "bell/assignment.hpp"
#include "bell/behavior.hpp"
#include "bell/ordering.hpp"

#include <span>
#include <vector>

namespace bell {

/// What to put in a conditional column whose conditioning event has
/// probability 0. Any choice reproduces the behavior; the point mass on
/// output 0 is the canonical one and keeps decompositions reproducible.
enum class FillerPolicy { PointMassZero, Uniform };

/// The chain factorization of a behavior along a temporal order:
/// P(a⃗|x⃗) = prod_k F_k(a_{pi_k} | x_{pi_0..pi_k}, a_{pi_0..pi_{k-1}}).
/// Factor k is stored as a matrix with one row per history (the inputs of
/// positions 0..k followed by the outputs of positions 0..k-1, mixed radix,
/// position 0 most significant) and one column per outcome of the party at
/// position k. Histories whose conditioning event has probability 0 carry the
/// filler column and are listed in the filler mask.
class ChainFactors {
public:
    ChainFactors(Scenario scenario, Ordering order, std::vector<Matrix> factors,
                 std::vector<std::vector<std::uint8_t>> filler_masks);

    const Scenario& scenario() const { return scenario_; }
    const Ordering& order() const { return order_; }
    const Matrix& factor(int position) const { return factors_[position]; }
    const std::vector<std::uint8_t>& filler_mask(int position) const {
        return filler_masks_[position];
    }
    JointIndex history_count(int position) const { return factors_[position].rows(); }
    /// Row index of the history given order-local input digits (position+1 of
    /// them) and output digits (position of them).
    JointIndex history_index(int position, std::span<const int> input_prefix,
                             std::span<const int> output_prefix) const;

private:
    Scenario scenario_;
    Ordering order_;
    std::vector<Matrix> factors_;
    std::vector<std::vector<std::uint8_t>> filler_masks_;
};

/// Factor k computed as the ratio of consecutive prefix marginals (later
/// inputs fixed to 0, which is irrelevant for no-signaling behaviors). The
/// product of the factors reproduces the behavior exactly on its support.
/// Throws NotNoSignaling (with the witness) when the precondition fails.
ChainFactors chain_factors(const Behavior& behavior, const Ordering& order,
                           FillerPolicy filler = FillerPolicy::PointMassZero,
                           Real tol = kEpsNorm);

struct DecompositionTerm {
    Real weight = 0;
    DeterministicAssignment assignment;
};

/// A finite mixture of deterministic assignments, each respecting the
/// declared order; only strictly positive weights are stored.
struct Decomposition {
    Ordering order;
    std::vector<DecompositionTerm> terms;
};

/// Product coupling over contexts: independently for every position k and
/// every history, an outcome is drawn from factor k's conditional column; a
/// response-function tuple compiles to a full assignment by forward
/// substitution of the earlier outputs. Terms below kPruneWeight are dropped
/// and the remainder renormalized. reconstruct() of the result equals the
/// behavior within the tolerance used here.
Decomposition decompose_ordered(const Behavior& behavior, const Ordering& order,
                                Real tol = kEpsNorm,
                                FillerPolicy filler = FillerPolicy::PointMassZero);

/// Mixture of behavior_from_assignment over the terms.
Behavior reconstruct(const Decomposition& decomposition);

/// Membership in the arrow-of-time polytope for the given order: the marginal
/// distribution of every prefix's outputs must be independent of later
/// parties' inputs within tol (one-way no-signaling along the order). This is
/// exactly the condition under which the chain construction applies.
bool in_ordered_polytope(const Behavior& behavior, const Ordering& order, Real tol = kEpsNorm);

/// Local-polytope membership for two-party binary behaviors via the eight
/// CHSH facets (complete for no-signaling behaviors in this scenario).
bool in_local_polytope_2222(const Behavior& behavior, Real tol = kEpsNorm);

}  // namespace bell

#endif  // BELL_DECOMPOSITION_HPP
