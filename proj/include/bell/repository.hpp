#ifndef BELL_REPOSITORY_HPP
#define BELL_REPOSITORY_HPP

#include "bell/behavior.hpp"
#include "bell/decomposition.hpp"

#include <map>
#include <optional>
#include <variant>

namespace bell {

/// Per-round storage keyed by the full context, including the time ordering:
/// one decomposition per ordering, sampled independently per round.
struct UpgradedMode {};

/// The thought-experiment store: one fixed (typically signaling) assignment
/// replayed every round, whatever the actual measurement order.
struct NaiveAssignmentMode {
    DeterministicAssignment assignment;
};

/// Samples from a single fixed-order decomposition but ignores the actual
/// measurement order.
struct NaiveDecompositionMode {
    Ordering order;
};

using RepositoryMode = std::variant<UpgradedMode, NaiveAssignmentMode, NaiveDecompositionMode>;

/// The per-round store of contextual deterministic assignments. Immutable
/// after construction; round sampling is a pure function of
/// (seed, round_id, ordering), so replays are bit-identical.
class Repository {
public:
    const Behavior& behavior() const { return behavior_; }
    const RepositoryMode& mode() const { return mode_; }
    std::uint64_t seed() const { return seed_; }
    const std::map<Ordering, Decomposition>& per_order_decompositions() const {
        return decompositions_;
    }
    bool upgraded() const { return std::holds_alternative<UpgradedMode>(mode_); }

    friend Repository build_repository(Behavior behavior, RepositoryMode mode,
                                       std::uint64_t seed);
    friend Repository repository_from_orders(Behavior reference,
                                             std::map<Ordering, Decomposition> per_order,
                                             std::uint64_t seed);

private:
    Repository(Behavior behavior, RepositoryMode mode, std::uint64_t seed)
        : behavior_(std::move(behavior)), mode_(std::move(mode)), seed_(seed) {}

    Behavior behavior_;
    RepositoryMode mode_;
    std::uint64_t seed_ = 0;
    std::map<Ordering, Decomposition> decompositions_;
};

/// Upgraded mode precomputes decompose_ordered for all n! orders (n at most
/// kMaxOrderParties); naive modes store their fixed object. Throws
/// NotNoSignaling, ScenarioTooLarge, TooManyOrders, ScenarioMismatch.
Repository build_repository(Behavior behavior, RepositoryMode mode, std::uint64_t seed);

/// Upgraded repository built from explicitly supplied per-order
/// decompositions (each term must respect its order). This is how a
/// hand-written order-dependent context table is loaded: unlike
/// build_repository it does not require the per-order behaviors to agree, so
/// `reference` is only the nominal behavior reported by audits.
Repository repository_from_orders(Behavior reference, std::map<Ordering, Decomposition> per_order,
                                  std::uint64_t seed);

/// One round's actualized assignment.
struct RoundAssignment {
    std::uint64_t round_id = 0;
    DeterministicAssignment assignment;
    std::optional<Ordering> origin_order;  // absent in naive-assignment mode
    std::size_t term_index = 0;            // the hidden-variable identity
    bool from_upgraded = false;
};

/// Draws one term of the ordering's decomposition with probability equal to
/// its weight, from the stream keyed by (seed, round_id, ordering rank).
/// Naive modes ignore `order`.
RoundAssignment sample_round(const Repository& repo, std::uint64_t round_id,
                             const Ordering& order);

struct ForcedInput {
    int party = -1;
    int value = 0;
};

enum class ViolationKind { InputRequired, InputForced };

/// A free-choice failure: the queried output depends on inputs that have not
/// been chosen yet.
struct FreeChoiceViolation {
    ViolationKind kind = ViolationKind::InputRequired;
    std::vector<int> dependent_parties;  // unchosen parties the output depends on
    std::vector<ForcedInput> forced;     // set by the Force policy
};

struct QueryResult {
    std::optional<int> outcome;
    std::optional<FreeChoiceViolation> violation;
    bool aborted = false;
};

using KnownInputs = std::map<int, int>;  // party -> already chosen input

/// The context selecting a stored value: the inputs fixed so far plus, once
/// it is known, the round's temporal ordering. In upgraded mode the ordering
/// must be present by the time a query is resolved.
struct ContextKey {
    KnownInputs inputs;
    std::optional<Ordering> order;
};

/// Asks the round's assignment for `party`'s output given its input and the
/// inputs already fixed by earlier queries. If the output is constant over
/// all completions of the unknown inputs it is returned; otherwise an
/// InputRequired violation lists the parties whose inputs matter. Throws
/// DuplicateQuery if the party already appears in known_inputs.
QueryResult query(const RoundAssignment& round, int party, int input,
                  const KnownInputs& known_inputs);

/// One-call consultation: samples the round actualized for the context's
/// ordering and queries it. The ordering may be omitted only in
/// naive-assignment mode, where the store ignores it.
QueryResult lookup(const Repository& repo, std::uint64_t round_id, const ContextKey& context,
                   int party, int input);

struct BlockPolicy {};

/// Commits the unchosen inputs to values presampled from the agents' nominal
/// input distributions.
struct ForcePolicy {
    std::map<int, int> presampled_inputs;  // party -> presampled value
};

using ResolvePolicy = std::variant<BlockPolicy, ForcePolicy>;

/// Resolves an InputRequired violation. Block aborts the round; Force commits
/// the presampled values, returns the outcome under them and reports
/// InputForced for every dependent party so the caller overrides those
/// agents' later choices. Throws PolicyUnavailable for upgraded-mode rounds,
/// where violations cannot arise.
QueryResult resolve_forced(const RoundAssignment& round, int party, int input,
                           const KnownInputs& known_inputs, const ResolvePolicy& policy);

}  // namespace bell

#endif  // BELL_REPOSITORY_HPP
