#ifndef DRSDDP_TESTS_TEST_UTIL_HPP_
#define DRSDDP_TESTS_TEST_UTIL_HPP_

// Shared brute-force oracles for the test suites. Everything here is
// independent of the simplex/branch-and-bound code paths it is used to check:
// enumeration only, no pivoting.

#include <cmath>
#include <optional>
#include <vector>

#include "drsddp/lp.hpp"
#include "drsddp/mip.hpp"

namespace testutil {

inline bool row_satisfied(const drsddp::LpRow& row, const std::vector<double>& x, double tol) {
    double lhs = 0.0;
    for (auto [c, v] : row.coefs) lhs += v * x[c];
    switch (row.rel) {
        case drsddp::Relation::le: return lhs <= row.rhs + tol;
        case drsddp::Relation::ge: return lhs >= row.rhs - tol;
        case drsddp::Relation::eq: return std::fabs(lhs - row.rhs) <= tol;
    }
    return false;
}

inline bool feasible_point(const drsddp::LpProblem& p, const std::vector<double>& x, double tol = 1e-7) {
    for (int j = 0; j < p.num_cols(); ++j)
        if (x[j] < p.lower[j] - tol || x[j] > p.upper[j] + tol) return false;
    for (const auto& row : p.rows)
        if (!row_satisfied(row, x, tol)) return false;
    return true;
}

inline double objective_at(const drsddp::LpProblem& p, const std::vector<double>& x) {
    double v = 0.0;
    for (int j = 0; j < p.num_cols(); ++j) v += p.cost[j] * x[j];
    return v;
}

// Exhaustive optimum of a pure-binary program: every column must be binary.
// Returns nullopt when no assignment is feasible.
inline std::optional<double> enumerate_binary_optimum(const drsddp::MipProblem& p) {
    int n = p.base.num_cols();
    std::optional<double> best;
    std::vector<double> x(n, 0.0);
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1u ? 1.0 : 0.0;
        if (!feasible_point(p.base, x)) continue;
        double v = objective_at(p.base, x);
        if (p.base.sense == drsddp::Sense::maximize) v = -v;
        if (!best || v < *best) best = v;
    }
    if (best && p.base.sense == drsddp::Sense::maximize) return -*best;
    return best;
}

// Vertex enumeration for small LPs: every choice of n active constraints
// (rows at equality or columns at a bound) is solved by Gaussian elimination
// and kept if feasible. Intended for n <= 6 or so.
inline std::optional<double> enumerate_vertices_optimum(const drsddp::LpProblem& p) {
    int n = p.num_cols();
    struct Plane { std::vector<double> a; double b; };
    std::vector<Plane> planes;
    for (const auto& row : p.rows) {
        Plane pl;
        pl.a.assign(n, 0.0);
        for (auto [c, v] : row.coefs) pl.a[c] += v;
        pl.b = row.rhs;
        planes.push_back(pl);
    }
    for (int j = 0; j < n; ++j) {
        if (p.lower[j] > -drsddp::kInf) {
            Plane pl; pl.a.assign(n, 0.0); pl.a[j] = 1.0; pl.b = p.lower[j]; planes.push_back(pl);
        }
        if (p.upper[j] < drsddp::kInf) {
            Plane pl; pl.a.assign(n, 0.0); pl.a[j] = 1.0; pl.b = p.upper[j]; planes.push_back(pl);
        }
    }
    int m = static_cast<int>(planes.size());
    std::optional<double> best;
    std::vector<int> pick(n, 0);
    std::vector<int> combo;
    // enumerate all n-subsets of planes
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    auto solve_system = [&](const std::vector<int>& sel) -> std::optional<std::vector<double>> {
        std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) a[r][c] = planes[sel[r]].a[c];
            a[r][n] = planes[sel[r]].b;
        }
        for (int col = 0; col < n; ++col) {
            int piv = -1;
            double bestv = 1e-9;
            for (int r = col; r < n; ++r)
                if (std::fabs(a[r][col]) > bestv) { bestv = std::fabs(a[r][col]); piv = r; }
            if (piv < 0) return std::nullopt;
            std::swap(a[col], a[piv]);
            for (int r = 0; r < n; ++r) {
                if (r == col) continue;
                double f = a[r][col] / a[col][col];
                if (f == 0.0) continue;
                for (int c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
            }
        }
        std::vector<double> x(n);
        for (int r = 0; r < n; ++r) x[r] = a[r][n] / a[r][r];
        return x;
    };
    bool done = false;
    while (!done) {
        if (auto x = solve_system(idx)) {
            if (feasible_point(p, *x, 1e-6)) {
                double v = objective_at(p, *x);
                if (p.sense == drsddp::Sense::maximize) v = -v;
                if (!best || v < *best) best = v;
            }
        }
        // next combination
        int i = n - 1;
        while (i >= 0 && idx[i] == m - n + i) --i;
        if (i < 0) { done = true; break; }
        ++idx[i];
        for (int k = i + 1; k < n; ++k) idx[k] = idx[k - 1] + 1;
    }
    (void)pick; (void)combo;
    if (best && p.sense == drsddp::Sense::maximize) return -*best;
    return best;
}

}  // namespace testutil

#endif  // DRSDDP_TESTS_TEST_UTIL_HPP_
