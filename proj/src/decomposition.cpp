#include "bell/decomposition.hpp"

#include <algorithm>
#include <cmath>

namespace bell {

namespace {

// Cards of the order-local input prefix of length `len`.
std::vector<int> prefix_input_cards(const Scenario& sc, const Ordering& order, int len) {
    std::vector<int> cards(len);
    for (int j = 0; j < len; ++j) cards[j] = sc.input_card(order.at(j));
    return cards;
}

std::vector<int> prefix_output_cards(const Scenario& sc, const Ordering& order, int len) {
    std::vector<int> cards(len);
    for (int j = 0; j < len; ++j) cards[j] = sc.output_card(order.at(j));
    return cards;
}

JointIndex product_of(std::span<const int> cards) {
    JointIndex p = 1;
    for (int c : cards) p *= c;
    return p;
}

// Marginal of the first `len` outputs given the first `len` inputs (later
// inputs fixed to 0): rows = input prefixes, cols = output prefixes.
Matrix prefix_marginal(const Behavior& behavior, const Ordering& order, int len) {
    const Scenario& sc = behavior.scenario();
    const int n = sc.parties();
    const std::vector<int> in_cards = prefix_input_cards(sc, order, len);
    const std::vector<int> out_cards = prefix_output_cards(sc, order, len);
    const JointIndex n_in = product_of(in_cards);
    const JointIndex n_out = product_of(out_cards);

    Matrix marg = Matrix::Zero(n_in, n_out);
    std::vector<int> full_inputs(n, 0);
    std::vector<int> prefix(len);
    for (JointIndex xi = 0; xi < n_in; ++xi) {
        JointIndex rem = xi;
        for (int j = len - 1; j >= 0; --j) {
            prefix[j] = static_cast<int>(rem % in_cards[j]);
            rem /= in_cards[j];
        }
        std::fill(full_inputs.begin(), full_inputs.end(), 0);
        for (int j = 0; j < len; ++j) full_inputs[order.at(j)] = prefix[j];
        const JointIndex x = sc.pack_inputs(full_inputs);
        for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
            JointIndex ai = 0;
            for (int j = 0; j < len; ++j) {
                ai = ai * out_cards[j] + sc.output_digit(a, order.at(j));
            }
            marg(xi, ai) += behavior.prob(x, a);
        }
    }
    return marg;
}

}  // namespace

ChainFactors::ChainFactors(Scenario scenario, Ordering order, std::vector<Matrix> factors,
                           std::vector<std::vector<std::uint8_t>> filler_masks)
    : scenario_(std::move(scenario)),
      order_(std::move(order)),
      factors_(std::move(factors)),
      filler_masks_(std::move(filler_masks)) {}

JointIndex ChainFactors::history_index(int position, std::span<const int> input_prefix,
                                       std::span<const int> output_prefix) const {
    JointIndex idx = 0;
    for (int j = 0; j <= position; ++j) {
        idx = idx * scenario_.input_card(order_.at(j)) + input_prefix[j];
    }
    for (int j = 0; j < position; ++j) {
        idx = idx * scenario_.output_card(order_.at(j)) + output_prefix[j];
    }
    return idx;
}

ChainFactors chain_factors(const Behavior& behavior, const Ordering& order, FillerPolicy filler,
                           Real tol) {
    const Scenario& sc = behavior.scenario();
    const int n = sc.parties();
    if (order.parties() != n) {
        throw ScenarioMismatch("ordering party count does not match scenario");
    }
    const NoSignalingReport ns = is_no_signaling(behavior, tol);
    if (!ns.holds) {
        throw NotNoSignaling("chain factorization needs a no-signaling behavior (violation " +
                                 std::to_string(ns.worst_violation) + ")",
                             *ns.witness);
    }

    std::vector<Matrix> factors(n);
    std::vector<std::vector<std::uint8_t>> masks(n);
    Matrix below = prefix_marginal(behavior, order, 0);  // 1x1 == 1
    for (int k = 0; k < n; ++k) {
        const int party = order.at(k);
        const int d = sc.output_card(party);
        const int m_k = sc.input_card(party);
        const Matrix above = prefix_marginal(behavior, order, k + 1);
        const JointIndex in_count = above.rows();        // prefixes of length k+1
        const JointIndex out_below = below.cols();       // output prefixes of length k
        Matrix table(in_count * out_below, d);
        std::vector<std::uint8_t> mask(static_cast<std::size_t>(in_count * out_below), 0);
        for (JointIndex xi = 0; xi < in_count; ++xi) {
            const JointIndex xi_below = xi / m_k;  // drop the last input digit
            for (JointIndex ai = 0; ai < out_below; ++ai) {
                const JointIndex row = xi * out_below + ai;
                const Real den = below(xi_below, ai);
                if (den < kFillerThreshold) {
                    mask[static_cast<std::size_t>(row)] = 1;
                    if (filler == FillerPolicy::Uniform) {
                        table.row(row).setConstant(Real(1) / d);
                    } else {
                        table.row(row).setZero();
                        table(row, 0) = 1.0;
                    }
                    continue;
                }
                for (int o = 0; o < d; ++o) {
                    table(row, o) = above(xi, ai * d + o) / den;
                }
            }
        }
        factors[k] = std::move(table);
        masks[k] = std::move(mask);
        below = above;
    }
    return ChainFactors(sc, order, std::move(factors), std::move(masks));
}

namespace {

struct StrategyCell {
    int position;             // k
    JointIndex prefix_index;  // over the order-local input prefix of length k+1
};

// Enumerates outcome choices cell by cell, pruning branches whose partial
// weight falls below kPruneWeight, and compiles each surviving leaf into a
// full assignment table.
class ProductCoupling {
public:
    ProductCoupling(const Behavior& behavior, const ChainFactors& factors)
        : sc_(behavior.scenario()), factors_(factors), order_(factors.order()) {
        const int n = sc_.parties();
        choice_.resize(n);
        out_prefix_count_.resize(n);
        JointIndex cells = 1;
        for (int k = 0; k < n; ++k) {
            cells *= sc_.input_card(order_.at(k));
            out_prefix_count_[k] =
                product_of(prefix_output_cards(sc_, order_, k));
            choice_[k].assign(static_cast<std::size_t>(cells), 0);
            for (JointIndex c = 0; c < cells; ++c) {
                cells_.push_back({k, c});
            }
        }
        // joint input -> prefix index per position, precomputed
        input_prefix_.assign(n, std::vector<JointIndex>(
                                    static_cast<std::size_t>(sc_.joint_inputs()), 0));
        for (JointIndex x = 0; x < sc_.joint_inputs(); ++x) {
            JointIndex idx = 0;
            for (int k = 0; k < n; ++k) {
                idx = idx * sc_.input_card(order_.at(k)) + sc_.input_digit(x, order_.at(k));
                input_prefix_[k][static_cast<std::size_t>(x)] = idx;
            }
        }
    }

    std::vector<DecompositionTerm> run() {
        terms_.clear();
        descend(0, 1.0);
        return std::move(terms_);
    }

private:
    // Divisor taking a length-(k+1) prefix index down to length (j+1).
    JointIndex truncate_prefix(JointIndex prefix, int k, int j) const {
        JointIndex div = 1;
        for (int l = j + 1; l <= k; ++l) div *= sc_.input_card(order_.at(l));
        return prefix / div;
    }

    void descend(std::size_t cell_index, Real weight) {
        if (cell_index == cells_.size()) {
            compile(weight);
            return;
        }
        const StrategyCell& cell = cells_[cell_index];
        const int k = cell.position;
        // history row: input prefix digits then the outputs earlier positions
        // chose for this context
        JointIndex out_idx = 0;
        for (int j = 0; j < k; ++j) {
            const JointIndex pj = truncate_prefix(cell.prefix_index, k, j);
            out_idx = out_idx * sc_.output_card(order_.at(j)) +
                      choice_[j][static_cast<std::size_t>(pj)];
        }
        const JointIndex row = cell.prefix_index * out_prefix_count_[k] + out_idx;
        const Matrix& factor = factors_.factor(k);
        const int d = sc_.output_card(order_.at(k));
        for (int o = 0; o < d; ++o) {
            const Real w = weight * factor(row, o);
            if (w < kPruneWeight) continue;
            choice_[k][static_cast<std::size_t>(cell.prefix_index)] = o;
            descend(cell_index + 1, w);
        }
    }

    void compile(Real weight) {
        const int n = sc_.parties();
        std::vector<JointIndex> table(static_cast<std::size_t>(sc_.joint_inputs()));
        std::vector<int> outs(n);
        for (JointIndex x = 0; x < sc_.joint_inputs(); ++x) {
            for (int k = 0; k < n; ++k) {
                outs[order_.at(k)] =
                    choice_[k][static_cast<std::size_t>(input_prefix_[k][static_cast<std::size_t>(x)])];
            }
            table[static_cast<std::size_t>(x)] = sc_.pack_outputs(outs);
        }
        terms_.push_back({weight, DeterministicAssignment(sc_, std::move(table))});
    }

    const Scenario& sc_;
    const ChainFactors& factors_;
    const Ordering& order_;
    std::vector<StrategyCell> cells_;
    std::vector<std::vector<int>> choice_;
    std::vector<JointIndex> out_prefix_count_;
    std::vector<std::vector<JointIndex>> input_prefix_;
    std::vector<DecompositionTerm> terms_;
};

void check_strategy_space(const Scenario& sc, const Ordering& order) {
    double log_count = 0;
    JointIndex cells = 1;
    for (int k = 0; k < sc.parties(); ++k) {
        cells *= sc.input_card(order.at(k));
        log_count += static_cast<double>(cells) *
                     std::log(static_cast<double>(sc.output_card(order.at(k))));
    }
    if (log_count > std::log(static_cast<double>(kMaxEnumeration))) {
        throw ScenarioTooLarge("ordered strategy space exceeds " +
                               std::to_string(kMaxEnumeration) + " objects");
    }
}

}  // namespace

Decomposition decompose_ordered(const Behavior& behavior, const Ordering& order, Real tol,
                                FillerPolicy filler) {
    check_strategy_space(behavior.scenario(), order);
    const ChainFactors factors = chain_factors(behavior, order, filler, tol);
    ProductCoupling coupling(behavior, factors);
    std::vector<DecompositionTerm> terms = coupling.run();

    Real total = 0;
    for (const auto& term : terms) total += term.weight;
    for (auto& term : terms) term.weight /= total;
    return Decomposition{order, std::move(terms)};
}

Behavior reconstruct(const Decomposition& decomposition) {
    if (decomposition.terms.empty()) {
        throw Error("cannot reconstruct from an empty decomposition");
    }
    const Scenario& sc = decomposition.terms.front().assignment.scenario();
    Matrix P = Matrix::Zero(sc.joint_inputs(), sc.joint_outputs());
    for (const auto& [weight, assignment] : decomposition.terms) {
        if (!(assignment.scenario() == sc)) {
            throw ScenarioMismatch("decomposition terms disagree on the scenario");
        }
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            P(x, assignment.output_index(x)) += weight;
        }
    }
    return Behavior(sc, std::move(P));
}

bool in_ordered_polytope(const Behavior& behavior, const Ordering& order, Real tol) {
    const Scenario& sc = behavior.scenario();
    const int n = sc.parties();
    if (order.parties() != n) {
        throw ScenarioMismatch("ordering party count does not match scenario");
    }
    for (int len = 1; len < n; ++len) {
        const std::vector<int> out_cards = prefix_output_cards(sc, order, len);
        const JointIndex n_out = product_of(out_cards);
        // group joint inputs by the prefix's input digits; the prefix output
        // marginal must agree within each group
        std::vector<JointIndex> group_of(static_cast<std::size_t>(sc.joint_inputs()));
        JointIndex n_groups = 1;
        for (int j = 0; j < len; ++j) n_groups *= sc.input_card(order.at(j));
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            JointIndex g = 0;
            for (int j = 0; j < len; ++j) {
                g = g * sc.input_card(order.at(j)) + sc.input_digit(x, order.at(j));
            }
            group_of[static_cast<std::size_t>(x)] = g;
        }
        Matrix reference(n_groups, n_out);
        std::vector<std::uint8_t> seen(static_cast<std::size_t>(n_groups), 0);
        Vector marg(n_out);
        for (JointIndex x = 0; x < sc.joint_inputs(); ++x) {
            marg.setZero();
            for (JointIndex a = 0; a < sc.joint_outputs(); ++a) {
                JointIndex ai = 0;
                for (int j = 0; j < len; ++j) {
                    ai = ai * out_cards[j] + sc.output_digit(a, order.at(j));
                }
                marg(ai) += behavior.prob(x, a);
            }
            const JointIndex g = group_of[static_cast<std::size_t>(x)];
            if (!seen[static_cast<std::size_t>(g)]) {
                reference.row(g) = marg.transpose();
                seen[static_cast<std::size_t>(g)] = 1;
            } else if ((reference.row(g).transpose() - marg).cwiseAbs().maxCoeff() > tol) {
                return false;
            }
        }
    }
    return true;
}

bool in_local_polytope_2222(const Behavior& behavior, Real tol) {
    const Scenario& sc = behavior.scenario();
    if (!(sc == uniform_scenario(2, 2, 2))) {
        throw WrongScenario("local membership test needs two parties with binary inputs/outputs");
    }
    Real E[2][2];
    for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
            Real e = 0;
            for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) {
                    const Real sign = ((a + b) % 2 == 0) ? 1.0 : -1.0;
                    e += sign * behavior.prob(sc.pack_inputs(std::vector<int>{x, y}),
                                              sc.pack_outputs(std::vector<int>{a, b}));
                }
            }
            E[x][y] = e;
        }
    }
    for (int minus = 0; minus < 4; ++minus) {
        Real s = 0;
        for (int x = 0; x < 2; ++x) {
            for (int y = 0; y < 2; ++y) {
                const Real sign = (x * 2 + y == minus) ? -1.0 : 1.0;
                s += sign * E[x][y];
            }
        }
        if (std::abs(s) > 2.0 + tol) return false;
    }
    return true;
}

}  // namespace bell
