#include "bell/stats.hpp"

#include <cmath>

namespace bell {

namespace {

constexpr int kMaxIter = 600;
constexpr Real kEps = 1e-16;

// Lower regularized gamma by series expansion, for x < s + 1.
Real gamma_p_series(Real s, Real x) {
    Real ap = s;
    Real sum = 1.0 / s;
    Real del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper regularized gamma by Lentz continued fraction, for x >= s + 1.
Real gamma_q_cf(Real s, Real x) {
    constexpr Real tiny = 1e-300;
    Real b = x + 1 - s;
    Real c = 1 / tiny;
    Real d = 1 / b;
    Real h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const Real an = -static_cast<Real>(i) * (static_cast<Real>(i) - s);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1 / d;
        const Real delta = d * c;
        h *= delta;
        if (std::abs(delta - 1) < kEps) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

Real regularized_gamma_q(Real s, Real x) {
    if (s <= 0 || x < 0) {
        throw Error("regularized_gamma_q needs s > 0 and x >= 0");
    }
    if (x == 0) return 1.0;
    if (x < s + 1) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

Real chi2_survival(Real stat, int dof) {
    if (dof <= 0) return 1.0;
    return regularized_gamma_q(0.5 * dof, 0.5 * stat);
}

ContingencyTest pearson_independence(const Matrix& counts) {
    ContingencyTest result;
    const Real total = counts.sum();
    if (total <= 0) {
        result.low_power = true;
        return result;
    }
    const Vector row_sums = counts.rowwise().sum();
    const Vector col_sums = counts.colwise().sum().transpose();
    int active_rows = 0, active_cols = 0;
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
        if (row_sums(r) > 0) ++active_rows;
    }
    for (Eigen::Index c = 0; c < counts.cols(); ++c) {
        if (col_sums(c) > 0) ++active_cols;
    }
    result.dof = std::max(0, (active_rows - 1) * (active_cols - 1));
    if (result.dof == 0) {
        result.low_power = true;
        return result;
    }
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
        if (row_sums(r) <= 0) continue;
        for (Eigen::Index c = 0; c < counts.cols(); ++c) {
            if (col_sums(c) <= 0) continue;
            const Real expected = row_sums(r) * col_sums(c) / total;
            if (expected < 5.0) result.low_power = true;
            const Real diff = counts(r, c) - expected;
            result.chi2 += diff * diff / expected;
        }
    }
    result.p_value = chi2_survival(result.chi2, result.dof);
    return result;
}

Real mutual_information_bits(const Matrix& counts) {
    const Real total = counts.sum();
    if (total <= 0) return 0;
    const Vector row_sums = counts.rowwise().sum();
    const Vector col_sums = counts.colwise().sum().transpose();
    Real mi = 0;
    for (Eigen::Index r = 0; r < counts.rows(); ++r) {
        for (Eigen::Index c = 0; c < counts.cols(); ++c) {
            const Real joint = counts(r, c);
            if (joint <= 0) continue;
            const Real p = joint / total;
            mi += p * std::log2(p * total * total / (row_sums(r) * col_sums(c)));
        }
    }
    return std::max(Real(0), mi);
}

}  // namespace bell
