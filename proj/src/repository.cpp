#include "bell/repository.hpp"

#include "bell/random.hpp"

#include <algorithm>

namespace bell {

namespace {

std::size_t draw_term(const Decomposition& decomposition, Real u) {
    Real acc = 0;
    for (std::size_t i = 0; i < decomposition.terms.size(); ++i) {
        acc += decomposition.terms[i].weight;
        if (u < acc) return i;
    }
    return decomposition.terms.size() - 1;
}

}  // namespace

Repository build_repository(Behavior behavior, RepositoryMode mode, std::uint64_t seed) {
    const Scenario& sc = behavior.scenario();
    if (const auto* naive = std::get_if<NaiveAssignmentMode>(&mode)) {
        if (!(naive->assignment.scenario() == sc)) {
            throw ScenarioMismatch("stored assignment does not match the behavior's scenario");
        }
        return Repository(std::move(behavior), std::move(mode), seed);
    }

    std::vector<Ordering> orders;
    if (std::holds_alternative<UpgradedMode>(mode)) {
        orders = all_orderings(sc.parties());
    } else {
        const auto& fixed = std::get<NaiveDecompositionMode>(mode);
        if (fixed.order.parties() != sc.parties()) {
            throw ScenarioMismatch("fixed decomposition order does not match the scenario");
        }
        orders.push_back(fixed.order);
    }
    Repository repo(std::move(behavior), std::move(mode), seed);
    for (const Ordering& order : orders) {
        repo.decompositions_.emplace(order, decompose_ordered(repo.behavior_, order));
    }
    return repo;
}

Repository repository_from_orders(Behavior reference, std::map<Ordering, Decomposition> per_order,
                                  std::uint64_t seed) {
    if (per_order.empty()) {
        throw Error("per-order repository needs at least one ordering");
    }
    const int n = reference.scenario().parties();
    for (const auto& [order, decomposition] : per_order) {
        if (order.parties() != n) {
            throw ScenarioMismatch("ordering party count does not match the scenario");
        }
        if (decomposition.terms.empty()) {
            throw Error("every stored decomposition needs at least one term");
        }
        for (const auto& term : decomposition.terms) {
            if (!(term.assignment.scenario() == reference.scenario())) {
                throw ScenarioMismatch("decomposition term scenario mismatch");
            }
            if (!respects_order(term.assignment, order)) {
                throw Error("stored assignment does not respect its declared ordering");
            }
        }
    }
    Repository repo(std::move(reference), UpgradedMode{}, seed);
    for (auto& [order, decomposition] : per_order) {
        repo.decompositions_.emplace(order, std::move(decomposition));
    }
    return repo;
}

RoundAssignment sample_round(const Repository& repo, std::uint64_t round_id,
                             const Ordering& order) {
    if (const auto* naive = std::get_if<NaiveAssignmentMode>(&repo.mode())) {
        return RoundAssignment{round_id, naive->assignment, std::nullopt, 0, false};
    }
    const Ordering* effective = &order;
    if (const auto* fixed = std::get_if<NaiveDecompositionMode>(&repo.mode())) {
        effective = &fixed->order;
    }
    const auto it = repo.per_order_decompositions().find(*effective);
    if (it == repo.per_order_decompositions().end()) {
        throw Error("repository has no decomposition for ordering " + format_ordering(*effective));
    }
    KeyedStream stream(repo.seed(),
                       {round_id, static_cast<std::uint64_t>(StreamPurpose::TermDraw),
                        effective->rank()});
    const std::size_t term = draw_term(it->second, stream.next_double());
    return RoundAssignment{round_id, it->second.terms[term].assignment,
                           *effective, term, repo.upgraded()};
}

namespace {

// Iterates the assignment outputs of `party` over all completions of the
// unknown inputs; reports the outcome when constant, otherwise which unknown
// parties the output extensionally depends on.
struct CompletionScan {
    bool constant = true;
    int outcome = -1;
    std::vector<int> dependent;
};

CompletionScan scan_completions(const RoundAssignment& round, int party,
                                const std::vector<int>& base_inputs,
                                const std::vector<int>& unknown) {
    const Scenario& sc = round.assignment.scenario();
    CompletionScan scan;
    std::vector<int> inputs = base_inputs;
    JointIndex combos = 1;
    for (int u : unknown) combos *= sc.input_card(u);
    // first pass: is the output constant?
    for (JointIndex c = 0; c < combos; ++c) {
        JointIndex rem = c;
        for (int u : unknown) {
            inputs[u] = static_cast<int>(rem % sc.input_card(u));
            rem /= sc.input_card(u);
        }
        const int out = round.assignment.output_of(party, sc.pack_inputs(inputs));
        if (c == 0) {
            scan.outcome = out;
        } else if (out != scan.outcome) {
            scan.constant = false;
        }
    }
    if (scan.constant) return scan;
    // second pass: per-party extensional dependence
    for (std::size_t i = 0; i < unknown.size(); ++i) {
        bool depends = false;
        for (JointIndex c = 0; c < combos && !depends; ++c) {
            JointIndex rem = c;
            for (int u : unknown) {
                inputs[u] = static_cast<int>(rem % sc.input_card(u));
                rem /= sc.input_card(u);
            }
            if (inputs[unknown[i]] != 0) continue;
            const int base = round.assignment.output_of(party, sc.pack_inputs(inputs));
            for (int v = 1; v < sc.input_card(unknown[i]); ++v) {
                inputs[unknown[i]] = v;
                if (round.assignment.output_of(party, sc.pack_inputs(inputs)) != base) {
                    depends = true;
                    break;
                }
            }
        }
        if (depends) scan.dependent.push_back(unknown[i]);
    }
    return scan;
}

std::pair<std::vector<int>, std::vector<int>> split_inputs(const RoundAssignment& round,
                                                           int party, int input,
                                                           const KnownInputs& known_inputs) {
    const Scenario& sc = round.assignment.scenario();
    if (party < 0 || party >= sc.parties()) {
        throw Error("query party out of range");
    }
    if (known_inputs.count(party) > 0) {
        throw DuplicateQuery("party " + std::to_string(party) + " already queried this round");
    }
    if (input < 0 || input >= sc.input_card(party)) {
        throw Error("query input out of range");
    }
    std::vector<int> base(sc.parties(), 0);
    std::vector<int> unknown;
    for (int p = 0; p < sc.parties(); ++p) {
        if (p == party) {
            base[p] = input;
        } else if (auto it = known_inputs.find(p); it != known_inputs.end()) {
            base[p] = it->second;
        } else {
            unknown.push_back(p);
        }
    }
    return {std::move(base), std::move(unknown)};
}

}  // namespace

QueryResult query(const RoundAssignment& round, int party, int input,
                  const KnownInputs& known_inputs) {
    auto [base, unknown] = split_inputs(round, party, input, known_inputs);
    const CompletionScan scan = scan_completions(round, party, base, unknown);
    QueryResult result;
    if (scan.constant) {
        result.outcome = scan.outcome;
        return result;
    }
    result.violation =
        FreeChoiceViolation{ViolationKind::InputRequired, scan.dependent, {}};
    return result;
}

QueryResult lookup(const Repository& repo, std::uint64_t round_id, const ContextKey& context,
                   int party, int input) {
    const bool needs_order = !std::holds_alternative<NaiveAssignmentMode>(repo.mode());
    if (needs_order && !context.order) {
        throw Error("this repository mode needs the ordering in the context");
    }
    const Ordering order = context.order
                               ? *context.order
                               : Ordering::identity(repo.behavior().scenario().parties());
    return query(sample_round(repo, round_id, order), party, input, context.inputs);
}

QueryResult resolve_forced(const RoundAssignment& round, int party, int input,
                           const KnownInputs& known_inputs, const ResolvePolicy& policy) {
    if (round.from_upgraded) {
        throw PolicyUnavailable("violations cannot arise in upgraded mode");
    }
    auto [base, unknown] = split_inputs(round, party, input, known_inputs);
    const CompletionScan scan = scan_completions(round, party, base, unknown);
    QueryResult result;
    if (scan.constant) {
        // nothing to resolve; behave like query
        result.outcome = scan.outcome;
        return result;
    }
    if (std::holds_alternative<BlockPolicy>(policy)) {
        result.aborted = true;
        result.violation =
            FreeChoiceViolation{ViolationKind::InputRequired, scan.dependent, {}};
        return result;
    }
    const auto& force = std::get<ForcePolicy>(policy);
    const Scenario& sc = round.assignment.scenario();
    std::vector<int> inputs = base;
    FreeChoiceViolation violation{ViolationKind::InputForced, scan.dependent, {}};
    for (int u : unknown) {
        const auto it = force.presampled_inputs.find(u);
        if (it == force.presampled_inputs.end()) {
            throw Error("force policy lacks a presampled input for party " + std::to_string(u));
        }
        inputs[u] = it->second;
    }
    for (int u : scan.dependent) {
        violation.forced.push_back(ForcedInput{u, inputs[u]});
    }
    result.outcome = round.assignment.output_of(party, sc.pack_inputs(inputs));
    result.violation = std::move(violation);
    return result;
}

}  // namespace bell
