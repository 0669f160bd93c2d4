#ifndef DRSDDP_SUBPROBLEM_HPP_
#define DRSDDP_SUBPROBLEM_HPP_

// Stage subproblem assembly: state columns, local columns, fixed copies of
// the incoming state, and an epigraph variable phi fed either by aggregate
// cut rows or by one of the reformulation fragments.

#include <vector>

#include "drsddp/approx.hpp"
#include "drsddp/mip.hpp"
#include "drsddp/model.hpp"

namespace drsddp {

enum class ApproxMode : std::uint8_t { epigraph, mccormick, wasserstein_dual };

struct SubproblemLayout {
    std::vector<int> x_cols, y_cols, copy_cols;
    int phi_col = -1;
};

// Builds the stage-t subproblem at (x_prev, scenario). The incoming state is
// modeled as copy columns pinned at x_prev (their reduced costs then carry
// the Benders gradient); `fix_copies=false` relaxes them to [0,1] instead.
// `data_override` substitutes the stage data (same shape) for evaluation on
// draws outside the training support.
inline MipProblem build_subproblem(const MultistageModel& m, int t,
                                   const std::vector<double>& x_prev, int scenario,
                                   const std::vector<Cut>& cuts, ApproxMode mode,
                                   double phi_floor, SubproblemLayout* layout_out = nullptr,
                                   bool fix_copies = true,
                                   const StageData* data_override = nullptr) {
    const StageTemplate& st = m.stage(t);
    if (st.disjunctive()) throw ModelError("plain builder cannot host a disjunctive stage");
    if (!data_override && (scenario < 0 || scenario >= m.num_scenarios(t)))
        throw DimensionMismatch("scenario index out of range");
    if (static_cast<int>(x_prev.size()) != st.dim_xprev)
        throw DimensionMismatch("incoming state width mismatch");
    for (const Cut& c : cuts)
        if (c.stage != t) throw DimensionMismatch("cut hosted by a different stage");

    const StageData& d = data_override ? *data_override : st.data[scenario];
    MipProblem p;
    SubproblemLayout lay;
    for (int j = 0; j < st.dim_x; ++j) {
        lay.x_cols.push_back(p.base.add_column(d.cost_x[j], 0.0, 1.0));
        p.binary_columns.push_back(lay.x_cols.back());
    }
    for (int j = 0; j < st.dim_y; ++j) {
        lay.y_cols.push_back(p.base.add_column(d.cost_y[j], st.y_lower[j], st.y_upper[j]));
        if (st.y_binary[j]) p.binary_columns.push_back(lay.y_cols.back());
    }
    for (int j = 0; j < st.dim_xprev; ++j) {
        double v = x_prev[j];
        lay.copy_cols.push_back(fix_copies ? p.base.add_column(0.0, v, v)
                                           : p.base.add_column(0.0, 0.0, 1.0));
    }
    const bool terminal = (t == m.horizon);
    lay.phi_col = terminal ? p.base.add_column(1.0, 0.0, 0.0)
                           : p.base.add_column(1.0, phi_floor, kInf);

    for (const StageRow& row : d.rows) {
        std::vector<std::pair<int, double>> coefs;
        for (int j = 0; j < st.dim_x; ++j)
            if (row.coef_x[j] != 0.0) coefs.push_back({lay.x_cols[j], row.coef_x[j]});
        for (int j = 0; j < st.dim_y; ++j)
            if (row.coef_y[j] != 0.0) coefs.push_back({lay.y_cols[j], row.coef_y[j]});
        for (int j = 0; j < st.dim_xprev; ++j)
            if (row.coef_xprev[j] != 0.0) coefs.push_back({lay.copy_cols[j], row.coef_xprev[j]});
        p.base.add_row(std::move(coefs), row.rel, row.rhs);
    }

    if (!terminal) {
        std::vector<Cut> scenario_cuts;
        for (const Cut& c : cuts) {
            if (c.aggregate()) {
                std::vector<std::pair<int, double>> row{{lay.phi_col, 1.0}};
                for (int j = 0; j < st.dim_x; ++j)
                    if (c.alpha[j] != 0.0) row.push_back({lay.x_cols[j], -c.alpha[j]});
                p.base.add_row(std::move(row), Relation::ge, c.beta);
            } else {
                scenario_cuts.push_back(c);
            }
        }
        if (mode == ApproxMode::epigraph) {
            if (!scenario_cuts.empty())
                throw ModelError("per-scenario cuts require a reformulation mode");
        } else {
            const ScenarioSupport& next = m.support(t + 1);
            if (mode == ApproxMode::mccormick)
                add_drr_mccormick_fragment(p.base, lay.x_cols, lay.phi_col, scenario_cuts, next,
                                           m.ambiguity.epsilon, phi_floor);
            else
                add_dro_dual_fragment(p.base, lay.x_cols, lay.phi_col, scenario_cuts, next,
                                      m.ambiguity.epsilon, phi_floor);
        }
    } else if (!cuts.empty()) {
        throw ModelError("terminal stage cannot host cuts");
    }

    if (layout_out) *layout_out = lay;
    return p;
}

// Valid lower bounds M_t on every stage value function, computed bottom-up
// from LP relaxations with the incoming state free in [0,1], minus a safety
// margin. Index t in [1, T]; entry T+1 is zero. These bounds serve both as
// the epigraph floor (stage t hosts floor M_{t+1}) and as the L constant of
// integer optimality cuts.
inline std::vector<double> compute_value_floors(const MultistageModel& m, double margin = 0.01) {
    std::vector<double> floors(m.horizon + 2, 0.0);
    for (int t = m.horizon; t >= 1; --t) {
        double raw = kInf;
        const StageTemplate& st = m.stage(t);
        std::vector<double> free_state(st.dim_xprev, 0.0);
        for (int i = 0; i < m.num_scenarios(t); ++i) {
            if (st.disjunctive()) {
                // Disjunctive stages: bound by the cheapest disjunct relaxation.
                for (std::size_t h = 0; h < st.disjuncts[i].size(); ++h) {
                    MultistageModel probe = m;  // borrow the plain builder per disjunct
                    probe.stages[t - 1].data[i].rows = st.disjuncts[i][h].rows;
                    probe.stages[t - 1].disjuncts.clear();
                    MipProblem sub = build_subproblem(probe, t, free_state, i, {},
                                                      ApproxMode::epigraph,
                                                      std::max(0.0, floors[t + 1]), nullptr, false);
                    LpSolution s = solve_lp(lp_relaxation(sub));
                    if (s.status == LpStatus::optimal) raw = std::min(raw, s.objective);
                    else if (s.status == LpStatus::unbounded)
                        throw ModelError("stage relaxation unbounded; compactness assumption violated");
                }
            } else {
                MipProblem sub = build_subproblem(m, t, free_state, i, {}, ApproxMode::epigraph,
                                                  floors[t + 1], nullptr, false);
                LpSolution s = solve_lp(lp_relaxation(sub));
                if (s.status == LpStatus::infeasible)
                    throw ModelError("stage relaxation infeasible; recourse assumption violated");
                if (s.status == LpStatus::unbounded)
                    throw ModelError("stage relaxation unbounded; compactness assumption violated");
                raw = std::min(raw, s.objective);
            }
        }
        if (raw == kInf) throw ModelError("no feasible disjunct in any scenario");
        floors[t] = raw - margin * (1.0 + std::fabs(raw));
    }
    return floors;
}

// Plain Benders cut for the stage value function at (x_prev, scenario): LP
// relaxation gradient from the copy columns, intercept tight at x_prev.
inline Cut benders_cut(const MultistageModel& m, int t, const std::vector<double>& x_prev,
                       int scenario, const std::vector<Cut>& cuts, ApproxMode mode,
                       double phi_floor, const SimplexOptions& sopt = {}, long iteration = 0) {
    SubproblemLayout lay;
    MipProblem sub = build_subproblem(m, t, x_prev, scenario, cuts, mode, phi_floor, &lay);
    LpSolution s = solve_lp(lp_relaxation(sub), sopt);
    if (s.status != LpStatus::optimal)
        throw ModelError("stage LP relaxation not optimal; model violates standing assumptions");
    std::vector<double> grad(lay.copy_cols.size());
    for (std::size_t j = 0; j < lay.copy_cols.size(); ++j)
        grad[j] = s.reduced_costs[lay.copy_cols[j]];
    return benders_cut_from_duals(grad, s.objective, x_prev, t - 1, scenario, iteration);
}

// Strengthened Benders cut: keep the LP gradient, recompute the intercept by
// a Lagrangian evaluation with the copy columns released into [0,1] and
// priced at the gradient. Dominates the plain intercept and stays valid for
// the mixed-binary value function.
inline Cut strengthened_benders_cut(const MultistageModel& m, int t,
                                    const std::vector<double>& x_prev, int scenario,
                                    const std::vector<Cut>& cuts, ApproxMode mode,
                                    double phi_floor, const MipOptions& mopt = {},
                                    long iteration = 0) {
    SubproblemLayout lay;
    MipProblem sub = build_subproblem(m, t, x_prev, scenario, cuts, mode, phi_floor, &lay);
    LpSolution s = solve_lp(lp_relaxation(sub), mopt.lp);
    if (s.status != LpStatus::optimal)
        throw ModelError("stage LP relaxation not optimal; model violates standing assumptions");
    std::vector<double> grad(lay.copy_cols.size());
    for (std::size_t j = 0; j < lay.copy_cols.size(); ++j)
        grad[j] = s.reduced_costs[lay.copy_cols[j]];

    SubproblemLayout lag_lay;
    MipProblem lag = build_subproblem(m, t, x_prev, scenario, cuts, mode, phi_floor, &lag_lay,
                                      /*fix_copies=*/false);
    for (std::size_t j = 0; j < lag_lay.copy_cols.size(); ++j)
        lag.base.cost[lag_lay.copy_cols[j]] = -grad[j];
    MipSolution ms = solve_mip(lag, mopt);
    if (ms.status != MipStatus::optimal)
        throw ModelError("Lagrangian evaluation failed; model violates standing assumptions");
    Cut c;
    c.stage = t - 1;
    c.scenario = scenario;
    c.kind = CutKind::strengthened_benders;
    c.alpha = grad;
    c.beta = ms.incumbent_bound;
    c.iteration = iteration;
    return c;
}

}  // namespace drsddp

#endif  // DRSDDP_SUBPROBLEM_HPP_
