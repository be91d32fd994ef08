#ifndef BELL_ORDERING_HPP
#define BELL_ORDERING_HPP

#include "bell/types.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bell {

/// A total temporal order over parties, earliest first.
class Ordering {
public:
    explicit Ordering(std::vector<int> parties);

    static Ordering identity(int n_parties);

    int parties() const { return static_cast<int>(sequence_.size()); }
    /// Party measuring at position k (0 = earliest).
    int at(int position) const { return sequence_[position]; }
    /// Position of `party` in the order.
    int position_of(int party) const { return positions_[party]; }
    const std::vector<int>& sequence() const { return sequence_; }

    /// Lexicographic rank among all permutations of the same party count
    /// (Lehmer code). Used as the per-ordering stream key in the repository.
    std::uint64_t rank() const;

    friend bool operator==(const Ordering&, const Ordering&);
    friend bool operator<(const Ordering&, const Ordering&);

private:
    std::vector<int> sequence_;
    std::vector<int> positions_;
};

/// All n! orderings in lexicographic sequence order. Throws TooManyOrders for
/// n above kMaxOrderParties.
std::vector<Ordering> all_orderings(int n_parties);

/// Parties as comma-separated letters, "A,B,C" meaning parties 0,1,2.
std::string format_ordering(const Ordering& order);
Ordering parse_ordering(std::string_view text, int n_parties);

}  // namespace bell

#endif  // BELL_ORDERING_HPP
