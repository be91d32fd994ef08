#ifndef BELL_SCENARIO_HPP
#define BELL_SCENARIO_HPP

#include "bell/types.hpp"

#include <span>
#include <vector>

namespace bell {

/// A multipartite measurement scenario: per-party input and output alphabet
/// sizes. Joint inputs and outputs are flattened in lexicographic order with
/// party 0 as the most significant digit (mixed radix per the cardinality
/// lists); that convention is shared by every table and file format in the
/// library.
class Scenario {
public:
    Scenario(std::vector<int> input_cards, std::vector<int> output_cards);

    int parties() const { return static_cast<int>(input_cards_.size()); }
    int input_card(int party) const { return input_cards_[party]; }
    int output_card(int party) const { return output_cards_[party]; }
    const std::vector<int>& input_cards() const { return input_cards_; }
    const std::vector<int>& output_cards() const { return output_cards_; }

    JointIndex joint_inputs() const { return joint_inputs_; }
    JointIndex joint_outputs() const { return joint_outputs_; }

    JointIndex pack_inputs(std::span<const int> digits) const;
    JointIndex pack_outputs(std::span<const int> digits) const;
    std::vector<int> unpack_inputs(JointIndex index) const;
    std::vector<int> unpack_outputs(JointIndex index) const;
    // Single-digit extraction without materializing the whole tuple.
    int input_digit(JointIndex index, int party) const;
    int output_digit(JointIndex index, int party) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;

private:
    std::vector<int> input_cards_;
    std::vector<int> output_cards_;
    std::vector<JointIndex> input_strides_;
    std::vector<JointIndex> output_strides_;
    JointIndex joint_inputs_ = 1;
    JointIndex joint_outputs_ = 1;
};

/// n parties, each with `inputs` settings and `outputs` outcomes.
Scenario uniform_scenario(int parties, int inputs, int outputs);

// Mixed-radix helpers shared by the index codecs above and the chain-factor
// history indexing.
JointIndex checked_radix_product(std::span<const int> cards);
JointIndex pack_digits(std::span<const int> cards, std::span<const JointIndex> strides,
                       std::span<const int> digits);
std::vector<JointIndex> radix_strides(std::span<const int> cards);

}  // namespace bell

#endif  // BELL_SCENARIO_HPP
