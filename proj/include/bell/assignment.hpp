#ifndef BELL_ASSIGNMENT_HPP
#define BELL_ASSIGNMENT_HPP

#include "bell/ordering.hpp"
#include "bell/scenario.hpp"

#include <set>
#include <utility>
#include <vector>

namespace bell {

/// A deterministic contextual assignment: a total function from joint inputs
/// to joint outputs, one row per context.
class DeterministicAssignment {
public:
    /// `table[x]` is the joint output index produced under joint input x.
    DeterministicAssignment(Scenario scenario, std::vector<JointIndex> table);

    const Scenario& scenario() const { return scenario_; }
    const std::vector<JointIndex>& table() const { return table_; }
    JointIndex output_index(JointIndex input_index) const { return table_[input_index]; }
    /// Output digit of one party under a joint input.
    int output_of(int party, JointIndex input_index) const {
        return scenario_.output_digit(table_[input_index], party);
    }

    friend bool operator==(const DeterministicAssignment&, const DeterministicAssignment&) = default;

private:
    Scenario scenario_;
    std::vector<JointIndex> table_;
};

/// Signaling dependency digraph: edge (i, j) present iff party j's output
/// function depends on party i's input.
struct SignalingGraph {
    int n_parties = 0;
    std::set<std::pair<int, int>> edges;

    bool has_edge(int from, int to) const { return edges.count({from, to}) > 0; }
};

enum class AssignmentKind { Local, Ordered, Cyclic };

struct AssignmentClass {
    AssignmentKind kind = AssignmentKind::Local;
    /// All total orders the assignment's signaling pattern is compatible with
    /// (topological sorts of the dependency graph, lexicographic); empty iff
    /// Cyclic. Truncated at kMaxListedOrders for large party counts.
    std::vector<Ordering> compatible_orders;
    bool orders_truncated = false;
};

/// Dependency is extensional: edge (i, j) iff two joint inputs differing only
/// in party i's input give party j different outputs.
SignalingGraph dependency_graph(const DeterministicAssignment& assignment);

bool has_cycle(const SignalingGraph& graph);

AssignmentClass classify(const DeterministicAssignment& assignment);

/// True iff every signaling edge points forward in `order`; equivalently each
/// party's output is a function of the inputs of parties at or before it.
bool respects_order(const DeterministicAssignment& assignment, const Ordering& order);

/// All assignments where each party's output is a function of its own input
/// only. Count is prod_i d_i^{m_i}; throws ScenarioTooLarge beyond
/// kMaxEnumeration.
std::vector<DeterministicAssignment> enumerate_local_assignments(const Scenario& scenario);

/// All assignments where the party at order position k responds to the inputs
/// of positions 0..k only. Count is prod_k d_k^{m_0*...*m_k}.
std::vector<DeterministicAssignment> enumerate_ordered_strategies(const Scenario& scenario,
                                                                  const Ordering& order);

/// Topological sorts of `graph` in lexicographic vertex order, at most
/// `max_count`; sets *truncated when more exist.
std::vector<Ordering> topological_sorts(const SignalingGraph& graph, std::size_t max_count,
                                        bool* truncated);

// Canonical two-party binary fixtures used by the demos and tests.
/// Both outputs 0 except the receiver outputs 1 when both inputs are 1; the
/// receiver's output is the AND of the inputs, so it signals one way from
/// `signaler` to `receiver`.
DeterministicAssignment make_and_signaling_assignment(int signaler, int receiver);
/// a = y and b = x: each party outputs the other's input (a signaling cycle).
DeterministicAssignment make_cyclic_swap_assignment();
/// a = x, b = y: local.
DeterministicAssignment make_local_identity_assignment();
DeterministicAssignment make_constant_assignment(const Scenario& scenario, JointIndex output_index);

}  // namespace bell

#endif  // BELL_ASSIGNMENT_HPP
