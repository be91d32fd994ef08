#include "bell/assignment.hpp"

#include <algorithm>
#include <cmath>

namespace bell {

DeterministicAssignment::DeterministicAssignment(Scenario scenario, std::vector<JointIndex> table)
    : scenario_(std::move(scenario)), table_(std::move(table)) {
    if (static_cast<JointIndex>(table_.size()) != scenario_.joint_inputs()) {
        throw ScenarioMismatch("assignment table must have one row per joint input");
    }
    for (JointIndex out : table_) {
        if (out < 0 || out >= scenario_.joint_outputs()) {
            throw ScenarioMismatch("assignment output index out of range");
        }
    }
}

SignalingGraph dependency_graph(const DeterministicAssignment& assignment) {
    const Scenario& sc = assignment.scenario();
    const int n = sc.parties();
    SignalingGraph graph;
    graph.n_parties = n;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            bool depends = false;
            for (JointIndex x = 0; x < sc.joint_inputs() && !depends; ++x) {
                if (sc.input_digit(x, i) != 0) continue;
                std::vector<int> digits = sc.unpack_inputs(x);
                const int base_out = assignment.output_of(j, x);
                for (int v = 1; v < sc.input_card(i); ++v) {
                    digits[i] = v;
                    if (assignment.output_of(j, sc.pack_inputs(digits)) != base_out) {
                        depends = true;
                        break;
                    }
                }
            }
            if (depends) graph.edges.insert({i, j});
        }
    }
    return graph;
}

bool has_cycle(const SignalingGraph& graph) {
    // Kahn: a cycle exists iff zero-indegree elimination gets stuck.
    const int n = graph.n_parties;
    std::vector<int> indegree(n, 0);
    for (auto& [i, j] : graph.edges) indegree[j]++;
    std::vector<int> ready;
    for (int v = 0; v < n; ++v) {
        if (indegree[v] == 0) ready.push_back(v);
    }
    int removed = 0;
    while (!ready.empty()) {
        const int v = ready.back();
        ready.pop_back();
        ++removed;
        for (auto& [i, j] : graph.edges) {
            if (i == v && --indegree[j] == 0) ready.push_back(j);
        }
    }
    return removed != n;
}

std::vector<Ordering> topological_sorts(const SignalingGraph& graph, std::size_t max_count,
                                        bool* truncated) {
    const int n = graph.n_parties;
    std::vector<int> indegree(n, 0);
    for (auto& [i, j] : graph.edges) indegree[j]++;
    std::vector<Ordering> sorts;
    std::vector<int> current;
    std::vector<bool> used(n, false);
    bool hit_cap = false;

    auto recurse = [&](auto&& self) -> void {
        if (current.size() == static_cast<std::size_t>(n)) {
            if (sorts.size() < max_count) {
                sorts.emplace_back(current);
            } else {
                hit_cap = true;
            }
            return;
        }
        for (int v = 0; v < n && !hit_cap; ++v) {
            if (used[v] || indegree[v] != 0) continue;
            used[v] = true;
            current.push_back(v);
            for (auto& [i, j] : graph.edges) {
                if (i == v) indegree[j]--;
            }
            self(self);
            for (auto& [i, j] : graph.edges) {
                if (i == v) indegree[j]++;
            }
            current.pop_back();
            used[v] = false;
        }
    };
    recurse(recurse);
    if (truncated) *truncated = hit_cap;
    return sorts;
}

AssignmentClass classify(const DeterministicAssignment& assignment) {
    const SignalingGraph graph = dependency_graph(assignment);
    AssignmentClass result;
    if (has_cycle(graph)) {
        result.kind = AssignmentKind::Cyclic;
        return result;
    }
    result.kind = graph.edges.empty() ? AssignmentKind::Local : AssignmentKind::Ordered;
    result.compatible_orders = topological_sorts(graph, kMaxListedOrders, &result.orders_truncated);
    return result;
}

bool respects_order(const DeterministicAssignment& assignment, const Ordering& order) {
    const SignalingGraph graph = dependency_graph(assignment);
    for (auto& [i, j] : graph.edges) {
        if (order.position_of(i) >= order.position_of(j)) return false;
    }
    return true;
}

namespace {

void check_enumeration_count(const std::vector<double>& log_factors) {
    double log_count = 0;
    for (double f : log_factors) log_count += f;
    if (log_count > std::log(static_cast<double>(kMaxEnumeration))) {
        throw ScenarioTooLarge("enumeration would exceed " + std::to_string(kMaxEnumeration) +
                               " strategies");
    }
}

}  // namespace

std::vector<DeterministicAssignment> enumerate_local_assignments(const Scenario& sc) {
    const int n = sc.parties();
    std::vector<double> logs;
    for (int p = 0; p < n; ++p) {
        logs.push_back(sc.input_card(p) * std::log(static_cast<double>(sc.output_card(p))));
    }
    check_enumeration_count(logs);

    // Odometer over per-party response functions f_p : input -> output,
    // concatenated into one digit vector.
    std::vector<int> cell_card;
    std::vector<std::pair<int, int>> cell_owner;  // (party, input value)
    for (int p = 0; p < n; ++p) {
        for (int v = 0; v < sc.input_card(p); ++v) {
            cell_card.push_back(sc.output_card(p));
            cell_owner.push_back({p, v});
        }
    }
    std::vector<int> digits(cell_card.size(), 0);
    std::vector<DeterministicAssignment> out;
    while (true) {
        std::vector<JointIndex> table(sc.joint_inputs());
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            std::vector<int> outs(n);
            std::size_t cell = 0;
            for (int p = 0; p < n; ++p) {
                outs[p] = digits[cell + sc.input_digit(x, p)];
                cell += sc.input_card(p);
            }
            table[x] = sc.pack_outputs(outs);
        }
        out.emplace_back(sc, std::move(table));
        // increment odometer, last digit fastest
        int i = static_cast<int>(digits.size()) - 1;
        while (i >= 0 && ++digits[i] == cell_card[i]) {
            digits[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

std::vector<DeterministicAssignment> enumerate_ordered_strategies(const Scenario& sc,
                                                                  const Ordering& order) {
    const int n = sc.parties();
    if (order.parties() != n) {
        throw ScenarioMismatch("ordering party count does not match scenario");
    }
    // Response function of the party at position k maps the joint inputs of
    // positions 0..k to its own output.
    std::vector<JointIndex> prefix_cells(n);  // number of input prefixes per position
    JointIndex cells = 1;
    std::vector<double> logs;
    for (int k = 0; k < n; ++k) {
        cells *= sc.input_card(order.at(k));
        prefix_cells[k] = cells;
        logs.push_back(static_cast<double>(cells) *
                       std::log(static_cast<double>(sc.output_card(order.at(k)))));
    }
    check_enumeration_count(logs);

    std::vector<int> cell_card;
    std::vector<std::pair<int, JointIndex>> cell_pos;  // (position k, prefix index)
    for (int k = 0; k < n; ++k) {
        for (JointIndex c = 0; c < prefix_cells[k]; ++c) {
            cell_card.push_back(sc.output_card(order.at(k)));
            cell_pos.push_back({k, c});
        }
    }
    // prefix index of joint input x at position k: mixed radix over the input
    // cards of order positions 0..k
    auto prefix_index = [&](JointIndex x, int k) {
        JointIndex idx = 0;
        for (int j = 0; j <= k; ++j) {
            idx = idx * sc.input_card(order.at(j)) + sc.input_digit(x, order.at(j));
        }
        return idx;
    };
    std::vector<JointIndex> cell_offset(n, 0);
    for (int k = 1; k < n; ++k) cell_offset[k] = cell_offset[k - 1] + prefix_cells[k - 1];

    std::vector<int> digits(cell_card.size(), 0);
    std::vector<DeterministicAssignment> out;
    while (true) {
        std::vector<JointIndex> table(sc.joint_inputs());
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            std::vector<int> outs(n);
            for (int k = 0; k < n; ++k) {
                outs[order.at(k)] = digits[cell_offset[k] + prefix_index(x, k)];
            }
            table[x] = sc.pack_outputs(outs);
        }
        out.emplace_back(sc, std::move(table));
        int i = static_cast<int>(digits.size()) - 1;
        while (i >= 0 && ++digits[i] == cell_card[i]) {
            digits[i] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return out;
}

DeterministicAssignment make_and_signaling_assignment(int signaler, int receiver) {
    if ((signaler != 0 && signaler != 1) || (receiver != 0 && receiver != 1) ||
        signaler == receiver) {
        throw Error("signaler and receiver must be distinct parties 0 and 1");
    }
    Scenario sc = uniform_scenario(2, 2, 2);
    std::vector<JointIndex> table(4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            std::vector<int> outs(2, 0);
            outs[receiver] = x * y;
            table[sc.pack_inputs(std::vector<int>{x, y})] = sc.pack_outputs(outs);
        }
    }
    return DeterministicAssignment(sc, std::move(table));
}

DeterministicAssignment make_cyclic_swap_assignment() {
    Scenario sc = uniform_scenario(2, 2, 2);
    std::vector<JointIndex> table(4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            table[sc.pack_inputs(std::vector<int>{x, y})] =
                sc.pack_outputs(std::vector<int>{y, x});
        }
    }
    return DeterministicAssignment(sc, std::move(table));
}

DeterministicAssignment make_local_identity_assignment() {
    Scenario sc = uniform_scenario(2, 2, 2);
    std::vector<JointIndex> table(4);
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            table[sc.pack_inputs(std::vector<int>{x, y})] =
                sc.pack_outputs(std::vector<int>{x, y});
        }
    }
    return DeterministicAssignment(sc, std::move(table));
}

DeterministicAssignment make_constant_assignment(const Scenario& sc, JointIndex output_index) {
    return DeterministicAssignment(sc,
                                   std::vector<JointIndex>(sc.joint_inputs(), output_index));
}

}  // namespace bell
