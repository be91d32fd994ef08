#ifndef BELL_TYPES_HPP
#define BELL_TYPES_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bell {

/* change to float or long double for other precisions */
using Real = double;

using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

// Flattened joint input/output index (mixed radix, party 0 most significant).
using JointIndex = std::int64_t;

// Default tolerance for normalization and no-signaling checks.
inline constexpr Real kEpsNorm = 1e-9;
// Decomposition terms below this weight are dropped and the rest renormalized.
inline constexpr Real kPruneWeight = 1e-12;
// Conditioning events with probability below this get the canonical filler column.
inline constexpr Real kFillerThreshold = 1e-12;
// Enumerations (local assignments, ordered strategies) refuse to produce more
// objects than this.
inline constexpr JointIndex kMaxEnumeration = 10'000'000;
// Behavior tables refuse to allocate more cells than this.
inline constexpr JointIndex kMaxTableCells = 100'000'000;
// Orderings are enumerated per party count up to n! with n at most this.
inline constexpr int kMaxOrderParties = 6;
// classify() truncates the compatible-order list beyond this many entries.
inline constexpr std::size_t kMaxListedOrders = 40320;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidBehavior : public Error {
public:
    using Error::Error;
};

class WrongScenario : public Error {
public:
    using Error::Error;
};

class WeightSum : public Error {
public:
    using Error::Error;
};

class ScenarioMismatch : public Error {
public:
    using Error::Error;
};

class ScenarioTooLarge : public Error {
public:
    using Error::Error;
};

class TooManyOrders : public Error {
public:
    using Error::Error;
};

class DuplicateQuery : public Error {
public:
    using Error::Error;
};

class PolicyUnavailable : public Error {
public:
    using Error::Error;
};

class UnknownSelector : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace bell

#endif  // BELL_TYPES_HPP
