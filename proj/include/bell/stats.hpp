#ifndef BELL_STATS_HPP
#define BELL_STATS_HPP

#include "bell/types.hpp"

namespace bell {

/// Upper regularized incomplete gamma Q(s, x), s > 0, x >= 0.
Real regularized_gamma_q(Real s, Real x);

/// Survival function of the chi-squared distribution: P(X >= stat) with
/// `dof` degrees of freedom.
Real chi2_survival(Real stat, int dof);

struct ContingencyTest {
    Real chi2 = 0;
    int dof = 0;
    Real p_value = 1;
    bool low_power = false;  // some expected cell count below 5
};

/// Pearson chi-squared test of independence on a contingency table
/// (rows x cols of counts).
ContingencyTest pearson_independence(const Matrix& counts);

/// Plug-in mutual information of a joint count table, in bits.
Real mutual_information_bits(const Matrix& counts);

}  // namespace bell

#endif  // BELL_STATS_HPP
