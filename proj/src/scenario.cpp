#include "bell/scenario.hpp"

#include <limits>

namespace bell {

namespace {

void check_cards(const std::vector<int>& cards, const char* what) {
    if (cards.empty()) {
        throw ScenarioTooLarge(std::string("scenario needs at least one party (") + what + ")");
    }
    for (int c : cards) {
        if (c < 1) {
            throw ScenarioTooLarge(std::string("all ") + what + " cardinalities must be >= 1");
        }
    }
}

}  // namespace

JointIndex checked_radix_product(std::span<const int> cards) {
    JointIndex product = 1;
    constexpr JointIndex limit = std::numeric_limits<JointIndex>::max();
    for (int c : cards) {
        if (c > 0 && product > limit / c) {
            throw ScenarioTooLarge("joint index space overflows 63 bits");
        }
        product *= c;
    }
    return product;
}

std::vector<JointIndex> radix_strides(std::span<const int> cards) {
    std::vector<JointIndex> strides(cards.size(), 1);
    for (int i = static_cast<int>(cards.size()) - 2; i >= 0; --i) {
        strides[i] = strides[i + 1] * cards[i + 1];
    }
    return strides;
}

JointIndex pack_digits(std::span<const int> cards, std::span<const JointIndex> strides,
                       std::span<const int> digits) {
    JointIndex index = 0;
    for (std::size_t i = 0; i < cards.size(); ++i) {
        index += strides[i] * digits[i];
    }
    return index;
}

Scenario::Scenario(std::vector<int> input_cards, std::vector<int> output_cards)
    : input_cards_(std::move(input_cards)), output_cards_(std::move(output_cards)) {
    check_cards(input_cards_, "input");
    check_cards(output_cards_, "output");
    if (input_cards_.size() != output_cards_.size()) {
        throw ScenarioMismatch("input and output cardinality lists must have equal length");
    }
    joint_inputs_ = checked_radix_product(input_cards_);
    joint_outputs_ = checked_radix_product(output_cards_);
    input_strides_ = radix_strides(input_cards_);
    output_strides_ = radix_strides(output_cards_);
}

JointIndex Scenario::pack_inputs(std::span<const int> digits) const {
    return pack_digits(input_cards_, input_strides_, digits);
}

JointIndex Scenario::pack_outputs(std::span<const int> digits) const {
    return pack_digits(output_cards_, output_strides_, digits);
}

std::vector<int> Scenario::unpack_inputs(JointIndex index) const {
    std::vector<int> digits(input_cards_.size());
    for (std::size_t i = 0; i < input_cards_.size(); ++i) {
        digits[i] = static_cast<int>((index / input_strides_[i]) % input_cards_[i]);
    }
    return digits;
}

std::vector<int> Scenario::unpack_outputs(JointIndex index) const {
    std::vector<int> digits(output_cards_.size());
    for (std::size_t i = 0; i < output_cards_.size(); ++i) {
        digits[i] = static_cast<int>((index / output_strides_[i]) % output_cards_[i]);
    }
    return digits;
}

int Scenario::input_digit(JointIndex index, int party) const {
    return static_cast<int>((index / input_strides_[party]) % input_cards_[party]);
}

int Scenario::output_digit(JointIndex index, int party) const {
    return static_cast<int>((index / output_strides_[party]) % output_cards_[party]);
}

Scenario uniform_scenario(int parties, int inputs, int outputs) {
    return Scenario(std::vector<int>(parties, inputs), std::vector<int>(parties, outputs));
}

}  // namespace bell
