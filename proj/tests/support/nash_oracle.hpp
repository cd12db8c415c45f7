#pragma once

// Support enumeration for two-player games: an oracle independent of
// verify_mixed_ne, valid for nondegenerate payoff matrices.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace vrnet::test {

struct BimatrixNe {
    std::vector<double> x;  // row player
    std::vector<double> y;  // column player
};

namespace detail {

// Mixed strategy over `support` making every action in `other_support` of the
// opponent indifferent under payoff(opp_action, own_action).
inline std::optional<std::vector<double>> indifference(const Eigen::MatrixXd& payoff, const std::vector<int>& support,
                                                       const std::vector<int>& other_support, std::size_t n_own) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) m(r, c) = payoff(other_support[static_cast<std::size_t>(r)], support[static_cast<std::size_t>(c)]);
        m(r, k) = -1.0;
    }
    for (Eigen::Index c = 0; c < k; ++c) m(k, c) = 1.0;
    rhs(k) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd sol = lu.solve(rhs);
    std::vector<double> p(n_own, 0.0);
    for (Eigen::Index c = 0; c < k; ++c) {
        if (sol(c) < -1e-12) return std::nullopt;
        p[static_cast<std::size_t>(support[static_cast<std::size_t>(c)])] = std::max(0.0, sol(c));
    }
    return p;
}

inline std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
        std::vector<int> s;
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) s.push_back(i);
        out.push_back(s);
    }
    return out;
}

}  // namespace detail

/// All equilibria found by equal-size support enumeration. a: row payoffs, b: column payoffs.
inline std::vector<BimatrixNe> support_enumeration(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    std::vector<BimatrixNe> out;
    for (int k = 1; k <= std::min(m, n); ++k) {
        for (const auto& rows : detail::subsets(m, k)) {
            for (const auto& cols : detail::subsets(n, k)) {
                // y makes the row player indifferent over `rows`; x does so for the column player
                const auto y = detail::indifference(a, cols, rows, static_cast<std::size_t>(n));
                const Eigen::MatrixXd bt = b.transpose();
                const auto x = detail::indifference(bt, rows, cols, static_cast<std::size_t>(m));
                if (!x || !y) continue;
                Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x->data(), m);
                Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y->data(), n);
                const Eigen::VectorXd row_payoff = a * yv;
                const Eigen::VectorXd col_payoff = b.transpose() * xv;
                const double v_row = xv.dot(row_payoff);
                const double v_col = yv.dot(col_payoff);
                if (row_payoff.maxCoeff() > v_row + 1e-9 || col_payoff.maxCoeff() > v_col + 1e-9) continue;
                out.push_back({*x, *y});
            }
        }
    }
    return out;
}

}  // namespace vrnet::test
