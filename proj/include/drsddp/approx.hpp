#ifndef DRSDDP_APPROX_HPP_
#define DRSDDP_APPROX_HPP_

// Cut constructors and reformulation fragments: Benders gradients from fixed
// state-copy columns, integer optimality cuts, robust separation cuts, the
// Wasserstein dual rows, and the McCormick linearization of the bilinear
// probability-times-state products.

#include <vector>

#include "drsddp/ambiguity.hpp"
#include "drsddp/lp.hpp"
#include "drsddp/model.hpp"

namespace drsddp {

// Benders cut from an optimal LP relaxation solve. The state copy columns are
// fixed at x_prev, so their reduced costs are exactly the value function's
// sensitivity; the intercept makes the cut tight at the expansion point.
inline Cut benders_cut_from_duals(const std::vector<double>& copy_reduced_costs,
                                  double lp_objective, const std::vector<double>& x_prev,
                                  int host_stage, int scenario, long iteration) {
    Cut c;
    c.stage = host_stage;
    c.scenario = scenario;
    c.kind = CutKind::benders;
    c.alpha = copy_reduced_costs;
    c.beta = lp_objective - dot(c.alpha, x_prev);
    c.iteration = iteration;
    return c;
}

// Integer optimality cut: tight at the binary expansion point, equal to the
// global lower bound L one Hamming step away and below it further out.
inline Cut integer_optimality_cut(double q_hat, const std::vector<double>& x_hat, double lower_bound,
                                  int host_stage, int scenario, long iteration) {
    if (lower_bound > q_hat + 1e-9) throw BadBound("integer optimality cut needs L <= q_hat");
    Cut c;
    c.stage = host_stage;
    c.scenario = scenario;
    c.kind = CutKind::integer_optimality;
    double span = q_hat - lower_bound;
    double ones = 0.0;
    c.alpha.resize(x_hat.size());
    for (std::size_t j = 0; j < x_hat.size(); ++j) {
        c.alpha[j] = span * (2.0 * x_hat[j] - 1.0);
        ones += x_hat[j];
    }
    c.beta = q_hat - span * ones;
    c.iteration = iteration;
    return c;
}

// Expectation aggregate under the reference distribution (risk-neutral).
inline Cut expectation_cut(const std::vector<Cut>& cuts_by_scenario, const ScenarioSupport& s,
                           long iteration = 0) {
    if (static_cast<int>(cuts_by_scenario.size()) != s.size())
        throw DimensionMismatch("need exactly one cut per scenario");
    Cut out;
    out.stage = cuts_by_scenario.front().stage;
    out.scenario = -1;
    out.kind = CutKind::dro_aggregate;
    out.alpha.assign(cuts_by_scenario.front().alpha.size(), 0.0);
    out.beta = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        double p = s.reference_probs[i];
        for (std::size_t j = 0; j < out.alpha.size(); ++j)
            out.alpha[j] += p * cuts_by_scenario[i].alpha[j];
        out.beta += p * cuts_by_scenario[i].beta;
    }
    out.iteration = iteration;
    return out;
}

// Robust aggregate: weights are the worst-case distribution for the scenario
// cut values at x_hat.
inline Cut dro_separation_cut(const std::vector<Cut>& cuts_by_scenario,
                              const std::vector<double>& x_hat, const ScenarioSupport& s,
                              double eps, long iteration = 0) {
    if (static_cast<int>(cuts_by_scenario.size()) != s.size())
        throw DimensionMismatch("need exactly one cut per scenario");
    std::vector<double> vals(s.size());
    for (int i = 0; i < s.size(); ++i) vals[i] = cuts_by_scenario[i].value_at(x_hat);
    auto [dist, value] = worst_case_distribution(vals, s, eps);
    (void)value;
    Cut out;
    out.stage = cuts_by_scenario.front().stage;
    out.scenario = -1;
    out.kind = CutKind::dro_aggregate;
    out.alpha.assign(cuts_by_scenario.front().alpha.size(), 0.0);
    out.beta = 0.0;
    for (int i = 0; i < s.size(); ++i) {
        double p = dist.probs[i];
        for (std::size_t j = 0; j < out.alpha.size(); ++j)
            out.alpha[j] += p * cuts_by_scenario[i].alpha[j];
        out.beta += p * cuts_by_scenario[i].beta;
    }
    out.iteration = iteration;
    return out;
}

// ---------------------------------------------------------------------------
// Reformulation fragments appended into a host subproblem.

// Risk-receptive reformulation: probability columns with their transport
// polytope, eta_i = p_i * x via McCormick rows, and theta_i epigraph rows per
// scenario cut; finally phi >= sum_i theta_i. `value_floor` is a valid lower
// bound on next-stage values, keeping theta bounded before any cut exists.
inline void add_drr_mccormick_fragment(LpProblem& lp, const std::vector<int>& x_cols, int phi_col,
                                       const std::vector<Cut>& scenario_cuts,
                                       const ScenarioSupport& s, double eps, double value_floor) {
    const int n = s.size();
    const int dx = static_cast<int>(x_cols.size());
    PolytopeColumns pc = add_wasserstein_polytope(lp, s, eps);
    std::vector<std::vector<int>> eta(n);
    std::vector<int> theta(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < dx; ++j) eta[i].push_back(lp.add_column(0.0, 0.0, 1.0));
        theta[i] = lp.add_column(0.0, -kInf, kInf);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < dx; ++j) {
            lp.add_row({{eta[i][j], 1.0}, {x_cols[j], -1.0}}, Relation::le, 0.0);
            lp.add_row({{eta[i][j], 1.0}, {pc.p[i], -1.0}}, Relation::le, 0.0);
            lp.add_row({{eta[i][j], 1.0}, {pc.p[i], -1.0}, {x_cols[j], -1.0}}, Relation::ge, -1.0);
        }
        lp.add_row({{theta[i], 1.0}, {pc.p[i], -value_floor}}, Relation::ge, 0.0);
    }
    for (const Cut& c : scenario_cuts) {
        if (c.scenario < 0 || c.scenario >= n)
            throw DimensionMismatch("reformulation fragment needs per-scenario cuts");
        std::vector<std::pair<int, double>> row{{theta[c.scenario], 1.0}};
        for (int j = 0; j < dx; ++j)
            if (c.alpha[j] != 0.0) row.push_back({eta[c.scenario][j], -c.alpha[j]});
        row.push_back({pc.p[c.scenario], -c.beta});
        lp.add_row(row, Relation::ge, 0.0);
    }
    std::vector<std::pair<int, double>> link{{phi_col, 1.0}};
    for (int i = 0; i < n; ++i) link.push_back({theta[i], -1.0});
    lp.add_row(link, Relation::ge, 0.0);
}

// Robust dual reformulation: phi >= eps*rho + sum_i pbar_i nu_i with
//   nu_i + ||w_i - w_j|| rho >= alpha_j'x + beta_j   for all i, j.
inline void add_dro_dual_fragment(LpProblem& lp, const std::vector<int>& x_cols, int phi_col,
                                  const std::vector<Cut>& scenario_cuts, const ScenarioSupport& s,
                                  double eps, double value_floor) {
    const int n = s.size();
    const int dx = static_cast<int>(x_cols.size());
    auto dist = l1_distance_matrix(s);
    int rho = lp.add_column(0.0, 0.0, kInf);
    std::vector<int> nu(n);
    for (int i = 0; i < n; ++i) nu[i] = lp.add_column(0.0, value_floor, kInf);
    for (const Cut& c : scenario_cuts) {
        if (c.scenario < 0 || c.scenario >= n)
            throw DimensionMismatch("reformulation fragment needs per-scenario cuts");
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<int, double>> row{{nu[i], 1.0}};
            if (dist[i][c.scenario] != 0.0) row.push_back({rho, dist[i][c.scenario]});
            for (int j = 0; j < dx; ++j)
                if (c.alpha[j] != 0.0) row.push_back({x_cols[j], -c.alpha[j]});
            lp.add_row(row, Relation::ge, c.beta);
        }
    }
    std::vector<std::pair<int, double>> link{{phi_col, 1.0}, {rho, -eps}};
    for (int i = 0; i < n; ++i)
        if (s.reference_probs[i] != 0.0) link.push_back({nu[i], -s.reference_probs[i]});
    lp.add_row(link, Relation::ge, 0.0);
}

}  // namespace drsddp

#endif  // DRSDDP_APPROX_HPP_
