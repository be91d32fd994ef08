#ifndef BELL_EXPERIMENT_HPP
#define BELL_EXPERIMENT_HPP

#include "bell/repository.hpp"
#include "bell/stats.hpp"

#include <span>
#include <string_view>

namespace bell {

/// Distribution of an agent's measurement time. The timestamp marks the
/// moment the agent's system produces its outcome (the repository query), not
/// the input choice; inputs are drawn immediately before the query.
struct TimingDist {
    enum class Kind { Fixed, Uniform } kind = Kind::Fixed;
    Real t = 0;       // Fixed
    Real t_min = 0;   // Uniform
    Real t_max = 0;

    static TimingDist fixed(Real t) { return {Kind::Fixed, t, 0, 0}; }
    static TimingDist uniform(Real t_min, Real t_max);
};

struct AgentSpec {
    int party = -1;
    std::vector<Real> input_dist;  // probability vector over the party's inputs
    TimingDist timing;
};

enum class PolicyKind { Block, Force };

struct ExperimentConfig {
    Behavior behavior;
    std::vector<AgentSpec> agents;  // one per party
    std::uint64_t rounds = 0;
    RepositoryMode mode;
    PolicyKind policy = PolicyKind::Force;
    std::uint64_t seed = 0;
};

struct RoundLog {
    std::uint64_t round_id = 0;
    std::vector<Real> timestamps;       // per party
    std::vector<int> order;             // derived ordering, earliest first
    std::vector<int> inputs;            // per party, -1 if never queried
    std::vector<std::uint8_t> forced;   // per party
    std::vector<int> outcomes;          // per party, -1 if never queried
    std::uint64_t term_index = 0;       // the hidden-variable identity
    std::uint64_t order_rank = 0;
    bool violation = false;             // an InputRequired event occurred
    bool aborted = false;               // Block policy cut the round short
};

struct StatsReport {
    std::uint64_t rounds = 0;
    std::uint64_t aborted_rounds = 0;
    std::uint64_t violation_rounds = 0;
    std::uint64_t forced_rounds = 0;
    bool insufficient_data = false;

    // Frequency estimate over non-aborted, non-forced rounds; contexts never
    // visited are listed and left uniform.
    std::optional<Behavior> empirical;
    std::vector<JointIndex> unvisited_contexts;

    std::optional<Real> chsh;         // two-party binary scenarios only
    std::optional<Real> chsh_stderr;

    std::optional<ContingencyTest> inputs_vs_lambda;
    std::optional<ContingencyTest> inputs_vs_ordering;

    Real violation_rate = 0;
    std::vector<Real> forced_rate;    // per party
    // Mutual information (bits) between the earliest queried party's outcome
    // and the first forced party's input, over forced rounds.
    Real forced_mi_bits = 0;
};

struct ExperimentResult {
    std::vector<RoundLog> logs;
    StatsReport report;
};

/// Ascending timestamp sort; ties broken by ascending party index, so the
/// lower-index party counts as earlier on equality.
Ordering derive_ordering(std::span<const Real> timestamps);

/// Runs the full Monte-Carlo experiment: per round, timestamps are sampled,
/// the ordering derived, the repository queried in temporal order with each
/// agent's input drawn from its distribution unless forced, and everything
/// logged. All randomness comes from streams keyed by (seed, round, purpose,
/// party), so logs are identical for any `threads` value.
ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

/// Same, against an already built repository (e.g. one assembled with
/// repository_from_orders). The repository's seed should equal config.seed
/// for a coherent replay key.
ExperimentResult run_experiment_with(const Repository& repo, const ExperimentConfig& config,
                                     int threads = 1);

/// Aggregates a log vector into the statistics report. `config` supplies the
/// scenario and nominal distributions.
StatsReport compute_stats(std::span<const RoundLog> logs, const ExperimentConfig& config);

// Variable selectors over round logs, for the independence and
// mutual-information tests: "inputs" (joint input index), "lambda" (sampled
// term index), "ordering" (ordering rank), and the per-party forms
// "input:<party>", "outcome:<party>", "forced:<party>".
// Aborted rounds are skipped. Throws UnknownSelector on anything else.

ContingencyTest independence_test(std::span<const RoundLog> logs, std::string_view lhs,
                                  std::string_view rhs);

Real mutual_information(std::span<const RoundLog> logs, std::string_view lhs,
                        std::string_view rhs);

struct EmpiricalBehavior {
    Behavior behavior;
    std::vector<JointIndex> unvisited_contexts;
    bool complete = false;  // every context visited at least once
};

/// P̂(a⃗|x⃗) over non-aborted, non-forced rounds.
EmpiricalBehavior empirical_behavior(std::span<const RoundLog> logs, const Scenario& scenario);

}  // namespace bell

#endif  // BELL_EXPERIMENT_HPP
