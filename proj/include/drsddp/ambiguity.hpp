#ifndef DRSDDP_AMBIGUITY_HPP_
#define DRSDDP_AMBIGUITY_HPP_

// Finite-support Wasserstein ambiguity sets: the transport polytope, the
// worst/best-case distribution LPs, and the coefficient LPs behind the
// risk-receptive aggregate cut.

#include <utility>
#include <vector>

#include "drsddp/lp.hpp"
#include "drsddp/model.hpp"

namespace drsddp {

struct DistributionVector {
    std::vector<double> probs;
};

inline double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d += std::fabs(a[k] - b[k]);
    return d;
}

inline std::vector<std::vector<double>> l1_distance_matrix(const ScenarioSupport& s) {
    int n = s.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            d[i][j] = d[j][i] = l1_distance(s.realizations[i], s.realizations[j]);
    return d;
}

struct PolytopeColumns {
    std::vector<int> p;  // probability columns, one per scenario
    int v_begin = -1;    // first transport column; layout v[i*N + j]
};

// Appends the transport polytope on fresh columns of `lp`:
//   sum_j v_ij = p_i,  sum_i v_ij = pbar_j,  sum_ij d_ij v_ij <= eps,
//   sum_i p_i = 1,  v >= 0, p in [0,1].
inline PolytopeColumns add_wasserstein_polytope(LpProblem& lp, const ScenarioSupport& s,
                                                double eps,
                                                const std::vector<std::vector<double>>* dist = nullptr) {
    if (eps < 0.0) throw ModelError("wasserstein radius must be nonnegative");
    const int n = s.size();
    std::vector<std::vector<double>> local;
    if (!dist) {
        local = l1_distance_matrix(s);
        dist = &local;
    }
    PolytopeColumns cols;
    for (int i = 0; i < n; ++i) cols.p.push_back(lp.add_column(0.0, 0.0, 1.0));
    cols.v_begin = lp.num_cols();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lp.add_column(0.0, 0.0, kInf);
    auto v = [&](int i, int j) { return cols.v_begin + i * n + j; };
    for (int i = 0; i < n; ++i) {
        std::vector<std::pair<int, double>> row{{cols.p[i], -1.0}};
        for (int j = 0; j < n; ++j) row.push_back({v(i, j), 1.0});
        lp.add_row(row, Relation::eq, 0.0);
    }
    for (int j = 0; j < n; ++j) {
        std::vector<std::pair<int, double>> row;
        for (int i = 0; i < n; ++i) row.push_back({v(i, j), 1.0});
        lp.add_row(row, Relation::eq, s.reference_probs[j]);
    }
    std::vector<std::pair<int, double>> budget;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if ((*dist)[i][j] != 0.0) budget.push_back({v(i, j), (*dist)[i][j]});
    lp.add_row(budget, Relation::le, eps);
    std::vector<std::pair<int, double>> mass;
    for (int i = 0; i < n; ++i) mass.push_back({cols.p[i], 1.0});
    lp.add_row(mass, Relation::eq, 1.0);
    return cols;
}

namespace detail {

inline std::pair<DistributionVector, double> extreme_distribution(
    const std::vector<double>& values, const ScenarioSupport& s, double eps, Sense sense) {
    if (static_cast<int>(values.size()) != s.size())
        throw DimensionMismatch("scenario value vector does not match the support");
    // A zero radius pins the distribution to the reference.
    if (eps == 0.0) {
        DistributionVector d{s.reference_probs};
        return {d, dot(values, s.reference_probs)};
    }
    LpProblem lp;
    lp.sense = sense;
    PolytopeColumns cols = add_wasserstein_polytope(lp, s, eps);
    for (int i = 0; i < s.size(); ++i) lp.cost[cols.p[i]] = values[i];
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw NumericalFailure("distribution polytope LP did not solve to optimality");
    DistributionVector d;
    for (int c : cols.p) d.probs.push_back(std::max(0.0, sol.primal[c]));
    return {d, sol.objective};
}

}  // namespace detail

// Distribution attaining the largest expected value over the ball.
inline std::pair<DistributionVector, double> worst_case_distribution(
    const std::vector<double>& values, const ScenarioSupport& s, double eps) {
    return detail::extreme_distribution(values, s, eps, Sense::maximize);
}

// Distribution attaining the smallest expected value over the ball.
inline std::pair<DistributionVector, double> best_case_distribution(
    const std::vector<double>& values, const ScenarioSupport& s, double eps) {
    return detail::extreme_distribution(values, s, eps, Sense::minimize);
}

// Re-check that `probs` admits a feasible transport plan from the reference
// within the budget (used by tests and debug assertions).
inline bool transport_feasible(const ScenarioSupport& s, double eps,
                               const std::vector<double>& probs, double tol = 1e-7) {
    LpProblem lp;
    PolytopeColumns cols = add_wasserstein_polytope(lp, s, eps + tol);
    for (int i = 0; i < s.size(); ++i) {
        lp.lower[cols.p[i]] = probs[i] - tol;
        lp.upper[cols.p[i]] = probs[i] + tol;
    }
    return solve_lp(lp).status == LpStatus::optimal;
}

// Aggregate cut for the optimistic expected cost-to-go built from one valid
// cut per next-stage scenario. Coefficients come from d_x + 1 small LPs over
// the ambiguity polytope: per coordinate the inner min (when x_hat_j = 0) or
// max (when x_hat_j = 1) of the expected gradient, and the inner min of the
// expected cut value at x_hat for the intercept. Emitted in (alpha, beta)
// form: phi >= pi'(x - x_hat) + gamma  ==  alpha = pi, beta = gamma - pi'x_hat.
inline Cut drr_cut_coefficients(const std::vector<Cut>& cuts_by_scenario,
                                const std::vector<double>& x_hat, const ScenarioSupport& s,
                                double eps, long iteration = 0) {
    const int n = s.size();
    if (static_cast<int>(cuts_by_scenario.size()) != n)
        throw DimensionMismatch("need exactly one cut per scenario");
    const int dx = static_cast<int>(x_hat.size());
    for (const auto& c : cuts_by_scenario)
        if (static_cast<int>(c.alpha.size()) != dx)
            throw DimensionMismatch("cut gradient width mismatch");

    std::vector<double> pi(dx, 0.0);
    double gamma = 0.0;
    if (eps == 0.0) {
        for (int i = 0; i < n; ++i) {
            double p = s.reference_probs[i];
            for (int j = 0; j < dx; ++j) pi[j] += p * cuts_by_scenario[i].alpha[j];
            gamma += p * cuts_by_scenario[i].value_at(x_hat);
        }
    } else {
        std::vector<double> grad(n), vals(n);
        for (int j = 0; j < dx; ++j) {
            for (int i = 0; i < n; ++i) grad[i] = cuts_by_scenario[i].alpha[j];
            bool at_one = x_hat[j] > 0.5;
            pi[j] = at_one ? worst_case_distribution(grad, s, eps).second
                           : best_case_distribution(grad, s, eps).second;
        }
        for (int i = 0; i < n; ++i) vals[i] = cuts_by_scenario[i].value_at(x_hat);
        gamma = best_case_distribution(vals, s, eps).second;
    }
    Cut out;
    out.stage = cuts_by_scenario.front().stage;
    out.scenario = -1;
    out.kind = CutKind::drr_aggregate;
    out.alpha = pi;
    out.beta = gamma - dot(pi, x_hat);
    out.iteration = iteration;
    return out;
}

}  // namespace drsddp

#endif  // DRSDDP_AMBIGUITY_HPP_
