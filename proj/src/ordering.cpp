#include "bell/ordering.hpp"

#include <algorithm>
#include <numeric>

namespace bell {

Ordering::Ordering(std::vector<int> parties) : sequence_(std::move(parties)) {
    const int n = static_cast<int>(sequence_.size());
    if (n == 0) {
        throw Error("ordering must list at least one party");
    }
    positions_.assign(n, -1);
    for (int pos = 0; pos < n; ++pos) {
        const int p = sequence_[pos];
        if (p < 0 || p >= n || positions_[p] != -1) {
            throw Error("ordering is not a permutation of 0.." + std::to_string(n - 1));
        }
        positions_[p] = pos;
    }
}

Ordering Ordering::identity(int n_parties) {
    std::vector<int> seq(n_parties);
    std::iota(seq.begin(), seq.end(), 0);
    return Ordering(std::move(seq));
}

std::uint64_t Ordering::rank() const {
    const int n = parties();
    std::uint64_t rank = 0;
    for (int i = 0; i < n; ++i) {
        int smaller = 0;
        for (int j = i + 1; j < n; ++j) {
            if (sequence_[j] < sequence_[i]) ++smaller;
        }
        std::uint64_t factorial = 1;
        for (int k = 2; k <= n - 1 - i; ++k) factorial *= k;
        rank += smaller * factorial;
    }
    return rank;
}

bool operator==(const Ordering& a, const Ordering& b) { return a.sequence_ == b.sequence_; }

bool operator<(const Ordering& a, const Ordering& b) { return a.sequence_ < b.sequence_; }

std::vector<Ordering> all_orderings(int n_parties) {
    if (n_parties > kMaxOrderParties) {
        throw TooManyOrders("refusing to enumerate " + std::to_string(n_parties) +
                            "! orderings (max " + std::to_string(kMaxOrderParties) + " parties)");
    }
    std::vector<int> seq(n_parties);
    std::iota(seq.begin(), seq.end(), 0);
    std::vector<Ordering> orders;
    do {
        orders.emplace_back(seq);
    } while (std::next_permutation(seq.begin(), seq.end()));
    return orders;
}

std::string format_ordering(const Ordering& order) {
    std::string out;
    for (int k = 0; k < order.parties(); ++k) {
        if (k > 0) out += ',';
        out += static_cast<char>('A' + order.at(k));
    }
    return out;
}

Ordering parse_ordering(std::string_view text, int n_parties) {
    std::vector<int> seq;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char c = text[pos];
        if (c >= 'A' && c < 'A' + n_parties) {
            seq.push_back(c - 'A');
        } else if (c >= 'a' && c < 'a' + n_parties) {
            seq.push_back(c - 'a');
        } else {
            throw ParseError("bad party letter '" + std::string(1, c) + "' in ordering \"" +
                             std::string(text) + "\"");
        }
        ++pos;
        if (pos < text.size()) {
            if (text[pos] != ',') {
                throw ParseError("expected ',' in ordering \"" + std::string(text) + "\"");
            }
            ++pos;
        }
    }
    if (static_cast<int>(seq.size()) != n_parties) {
        throw ParseError("ordering \"" + std::string(text) + "\" must list all " +
                         std::to_string(n_parties) + " parties");
    }
    return Ordering(std::move(seq));
}

}  // namespace bell
