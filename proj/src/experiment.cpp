#include "bell/experiment.hpp"

#include "bell/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <thread>

namespace bell {

TimingDist TimingDist::uniform(Real t_min, Real t_max) {
    if (t_min > t_max) {
        throw Error("uniform timing needs t_min <= t_max");
    }
    return {Kind::Uniform, 0, t_min, t_max};
}

Ordering derive_ordering(std::span<const Real> timestamps) {
    std::vector<int> seq(timestamps.size());
    std::iota(seq.begin(), seq.end(), 0);
    std::sort(seq.begin(), seq.end(), [&](int a, int b) {
        if (timestamps[a] != timestamps[b]) return timestamps[a] < timestamps[b];
        return a < b;
    });
    return Ordering(std::move(seq));
}

namespace {

void check_config(const ExperimentConfig& config) {
    const Scenario& sc = config.behavior.scenario();
    const int n = sc.parties();
    if (static_cast<int>(config.agents.size()) != n) {
        throw ScenarioMismatch("config needs exactly one agent per party");
    }
    std::vector<bool> seen(n, false);
    for (const AgentSpec& agent : config.agents) {
        if (agent.party < 0 || agent.party >= n || seen[agent.party]) {
            throw ScenarioMismatch("agent party indices must cover every party exactly once");
        }
        seen[agent.party] = true;
        if (static_cast<int>(agent.input_dist.size()) != sc.input_card(agent.party)) {
            throw ScenarioMismatch("agent input distribution length must match the input count");
        }
        Real total = 0;
        for (Real p : agent.input_dist) {
            if (p < 0) throw Error("agent input probabilities must be non-negative");
            total += p;
        }
        if (std::abs(total - 1.0) > kEpsNorm) {
            throw Error("agent input distribution must sum to 1");
        }
        if (agent.timing.kind == TimingDist::Kind::Uniform &&
            agent.timing.t_min > agent.timing.t_max) {
            throw Error("uniform timing needs t_min <= t_max");
        }
    }
}

int draw_from_dist(std::span<const Real> dist, Real u) {
    Real acc = 0;
    for (std::size_t i = 0; i + 1 < dist.size(); ++i) {
        acc += dist[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(dist.size()) - 1;
}

RoundLog simulate_round(const Repository& repo, const ExperimentConfig& config,
                        const std::vector<const AgentSpec*>& agent_of, std::uint64_t round_id) {
    const Scenario& sc = config.behavior.scenario();
    const int n = sc.parties();
    RoundLog log;
    log.round_id = round_id;
    log.timestamps.resize(n);
    log.inputs.assign(n, -1);
    log.forced.assign(n, 0);
    log.outcomes.assign(n, -1);

    for (int p = 0; p < n; ++p) {
        const TimingDist& timing = agent_of[p]->timing;
        if (timing.kind == TimingDist::Kind::Fixed) {
            log.timestamps[p] = timing.t;
        } else {
            KeyedStream stream(config.seed,
                               {round_id, static_cast<std::uint64_t>(StreamPurpose::TimingDraw),
                                static_cast<std::uint64_t>(p)});
            log.timestamps[p] = stream.next_uniform(timing.t_min, timing.t_max);
        }
    }
    const Ordering ordering = derive_ordering(log.timestamps);
    log.order = ordering.sequence();
    log.order_rank = ordering.rank();

    const RoundAssignment round = sample_round(repo, round_id, ordering);
    log.term_index = round.term_index;

    // Inputs are presampled per (seed, round, party); the same presample
    // backs both the agent's own choice and a forced commitment.
    std::vector<int> presampled(n);
    for (int p = 0; p < n; ++p) {
        KeyedStream stream(config.seed,
                           {round_id, static_cast<std::uint64_t>(StreamPurpose::InputDraw),
                            static_cast<std::uint64_t>(p)});
        presampled[p] = draw_from_dist(agent_of[p]->input_dist, stream.next_double());
    }

    KnownInputs known;
    std::map<int, int> forced_values;
    for (int k = 0; k < n; ++k) {
        const int party = ordering.at(k);
        int input = presampled[party];
        if (auto it = forced_values.find(party); it != forced_values.end()) {
            input = it->second;
        }
        QueryResult result = query(round, party, input, known);
        if (result.violation && result.violation->kind == ViolationKind::InputRequired) {
            log.violation = true;
            if (config.policy == PolicyKind::Block) {
                log.inputs[party] = input;
                log.aborted = true;
                break;
            }
            ForcePolicy force;
            for (int p = 0; p < n; ++p) {
                if (p != party && known.count(p) == 0) force.presampled_inputs[p] = presampled[p];
            }
            result = resolve_forced(round, party, input, known, force);
            for (const ForcedInput& f : result.violation->forced) {
                forced_values[f.party] = f.value;
                log.forced[f.party] = 1;
            }
        }
        known[party] = input;
        log.inputs[party] = input;
        log.outcomes[party] = *result.outcome;
    }
    return log;
}

// ---- selectors ----------------------------------------------------------

using SelectorFn = std::int64_t (*)(const RoundLog&, int);

std::pair<SelectorFn, int> parse_selector(std::string_view name, int n_parties) {
    auto parse_party = [&](std::string_view text) {
        int party = -1;
        const auto* end = text.data() + text.size();
        if (std::from_chars(text.data(), end, party).ptr != end || party < 0 ||
            party >= n_parties) {
            throw UnknownSelector("bad party in selector: " + std::string(text));
        }
        return party;
    };
    if (name == "inputs") {
        return {[](const RoundLog& log, int) {
                    std::int64_t idx = 0;
                    for (int v : log.inputs) idx = idx * 1024 + (v + 1);
                    return idx;
                },
                0};
    }
    if (name == "lambda") {
        return {[](const RoundLog& log, int) {
                    return static_cast<std::int64_t>(log.term_index);
                },
                0};
    }
    if (name == "ordering") {
        return {[](const RoundLog& log, int) {
                    return static_cast<std::int64_t>(log.order_rank);
                },
                0};
    }
    if (name.starts_with("input:")) {
        return {[](const RoundLog& log, int p) {
                    return static_cast<std::int64_t>(log.inputs[p]);
                },
                parse_party(name.substr(6))};
    }
    if (name.starts_with("outcome:")) {
        return {[](const RoundLog& log, int p) {
                    return static_cast<std::int64_t>(log.outcomes[p]);
                },
                parse_party(name.substr(8))};
    }
    if (name.starts_with("forced:")) {
        return {[](const RoundLog& log, int p) {
                    return static_cast<std::int64_t>(log.forced[p]);
                },
                parse_party(name.substr(7))};
    }
    throw UnknownSelector("unknown selector: " + std::string(name));
}

Matrix contingency(std::span<const RoundLog> logs, std::string_view lhs, std::string_view rhs) {
    const int n = logs.empty() ? 0 : static_cast<int>(logs.front().inputs.size());
    auto [lhs_fn, lhs_party] = parse_selector(lhs, std::max(n, 1));
    auto [rhs_fn, rhs_party] = parse_selector(rhs, std::max(n, 1));
    std::map<std::int64_t, int> lhs_labels, rhs_labels;
    std::vector<std::pair<std::int64_t, std::int64_t>> values;
    values.reserve(logs.size());
    for (const RoundLog& log : logs) {
        if (log.aborted) continue;
        const std::int64_t a = lhs_fn(log, lhs_party);
        const std::int64_t b = rhs_fn(log, rhs_party);
        lhs_labels.emplace(a, 0);
        rhs_labels.emplace(b, 0);
        values.push_back({a, b});
    }
    int next = 0;
    for (auto& [label, idx] : lhs_labels) idx = next++;
    next = 0;
    for (auto& [label, idx] : rhs_labels) idx = next++;
    Matrix counts = Matrix::Zero(std::max<int>(1, static_cast<int>(lhs_labels.size())),
                                 std::max<int>(1, static_cast<int>(rhs_labels.size())));
    for (auto [a, b] : values) {
        counts(lhs_labels[a], rhs_labels[b]) += 1;
    }
    return counts;
}

}  // namespace

ContingencyTest independence_test(std::span<const RoundLog> logs, std::string_view lhs,
                                  std::string_view rhs) {
    return pearson_independence(contingency(logs, lhs, rhs));
}

Real mutual_information(std::span<const RoundLog> logs, std::string_view lhs,
                        std::string_view rhs) {
    return mutual_information_bits(contingency(logs, lhs, rhs));
}

EmpiricalBehavior empirical_behavior(std::span<const RoundLog> logs, const Scenario& sc) {
    Matrix counts = Matrix::Zero(sc.joint_inputs(), sc.joint_outputs());
    for (const RoundLog& log : logs) {
        if (log.aborted) continue;
        if (std::any_of(log.forced.begin(), log.forced.end(), [](std::uint8_t f) { return f; }))
            continue;
        counts(sc.pack_inputs(log.inputs), sc.pack_outputs(log.outcomes)) += 1;
    }
    EmpiricalBehavior result{Behavior(sc, Matrix::Zero(sc.joint_inputs(), sc.joint_outputs())),
                             {},
                             true};
    Matrix probs(sc.joint_inputs(), sc.joint_outputs());
    for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
        const Real total = counts.row(x).sum();
        if (total <= 0) {
            result.unvisited_contexts.push_back(x);
            result.complete = false;
            probs.row(x).setConstant(Real(1) / static_cast<Real>(sc.joint_outputs()));
        } else {
            probs.row(x) = counts.row(x) / total;
        }
    }
    result.behavior = Behavior(sc, std::move(probs));
    return result;
}

namespace {

void add_chsh_estimate(StatsReport& report, std::span<const RoundLog> logs, const Scenario& sc) {
    if (!(sc == uniform_scenario(2, 2, 2))) return;
    // correlator counts per context over clean rounds
    Real n_ctx[2][2] = {};
    Real sum_ctx[2][2] = {};
    for (const RoundLog& log : logs) {
        if (log.aborted) continue;
        if (log.forced[0] || log.forced[1]) continue;
        const Real value = ((log.outcomes[0] + log.outcomes[1]) % 2 == 0) ? 1.0 : -1.0;
        n_ctx[log.inputs[0]][log.inputs[1]] += 1;
        sum_ctx[log.inputs[0]][log.inputs[1]] += value;
    }
    Real s = 0, var = 0;
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            if (n_ctx[x][y] < 1) return;  // context never visited
            const Real e = sum_ctx[x][y] / n_ctx[x][y];
            s += ((x & y) ? -1.0 : 1.0) * e;
            var += std::max(Real(0), 1.0 - e * e) / n_ctx[x][y];
        }
    }
    report.chsh = s;
    report.chsh_stderr = std::sqrt(var);
}

}  // namespace

StatsReport compute_stats(std::span<const RoundLog> logs, const ExperimentConfig& config) {
    const Scenario& sc = config.behavior.scenario();
    const int n = sc.parties();
    StatsReport report;
    report.rounds = logs.size();
    report.forced_rate.assign(n, 0);
    for (const RoundLog& log : logs) {
        if (log.aborted) ++report.aborted_rounds;
        if (log.violation) ++report.violation_rounds;
        bool any_forced = false;
        for (int p = 0; p < n; ++p) {
            if (log.forced[p]) {
                report.forced_rate[p] += 1;
                any_forced = true;
            }
        }
        if (any_forced) ++report.forced_rounds;
    }
    if (report.rounds == 0) {
        report.insufficient_data = true;
        return report;
    }
    report.violation_rate = static_cast<Real>(report.violation_rounds) / report.rounds;
    for (Real& rate : report.forced_rate) rate /= static_cast<Real>(report.rounds);

    EmpiricalBehavior empirical = empirical_behavior(logs, sc);
    report.unvisited_contexts = empirical.unvisited_contexts;
    report.insufficient_data = !empirical.complete;
    report.empirical = std::move(empirical.behavior);

    add_chsh_estimate(report, logs, sc);
    report.inputs_vs_lambda = independence_test(logs, "inputs", "lambda");
    report.inputs_vs_ordering = independence_test(logs, "inputs", "ordering");

    // MI(earliest outcome; first forced input) over forced rounds
    Matrix forced_counts;
    std::map<std::pair<int, int>, Real> cells;
    int max_out = 0, max_in = 0;
    for (const RoundLog& log : logs) {
        if (log.aborted) continue;
        int forced_party = -1;
        for (int k = 0; k < n; ++k) {
            if (log.forced[log.order[k]]) {
                forced_party = log.order[k];
                break;
            }
        }
        if (forced_party < 0) continue;
        const int first_outcome = log.outcomes[log.order[0]];
        const int forced_input = log.inputs[forced_party];
        cells[{first_outcome, forced_input}] += 1;
        max_out = std::max(max_out, first_outcome + 1);
        max_in = std::max(max_in, forced_input + 1);
    }
    if (!cells.empty()) {
        forced_counts = Matrix::Zero(max_out, max_in);
        for (auto& [key, count] : cells) forced_counts(key.first, key.second) = count;
        report.forced_mi_bits = mutual_information_bits(forced_counts);
    }
    return report;
}

ExperimentResult run_experiment(const ExperimentConfig& config, int threads) {
    const Repository repo = build_repository(config.behavior, config.mode, config.seed);
    return run_experiment_with(repo, config, threads);
}

ExperimentResult run_experiment_with(const Repository& repo, const ExperimentConfig& config,
                                     int threads) {
    check_config(config);
    const int n = config.behavior.scenario().parties();
    std::vector<const AgentSpec*> agent_of(n, nullptr);
    for (const AgentSpec& agent : config.agents) agent_of[agent.party] = &agent;

    std::vector<RoundLog> logs(config.rounds);
    auto worker = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t r = begin; r < end; ++r) {
            logs[r] = simulate_round(repo, config, agent_of, r);
        }
    };
    if (threads <= 1 || config.rounds < 2) {
        worker(0, config.rounds);
    } else {
        const std::uint64_t used = std::min<std::uint64_t>(threads, config.rounds);
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (config.rounds + used - 1) / used;
        for (std::uint64_t t = 0; t < used; ++t) {
            const std::uint64_t begin = t * chunk;
            const std::uint64_t end = std::min(config.rounds, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }
    StatsReport report = compute_stats(logs, config);
    return ExperimentResult{std::move(logs), std::move(report)};
}

}  // namespace bell
