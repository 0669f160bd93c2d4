#ifndef DRSDDP_DISJUNCTIVE_HPP_
#define DRSDDP_DISJUNCTIVE_HPP_

// Lifted hull formulations for disjunctive stage sets, the hierarchy of
// relaxations between the LP relaxation and the integer hull, and the
// LP-subproblem driver that reuses the sampling loop with Benders-style cuts
// extracted from the lifted duals.

#include <functional>
#include <vector>

#include "drsddp/sddp.hpp"

namespace drsddp {

struct LiftedLayout {
    std::vector<int> x_cols, y_cols;
    int phi_col = -1;
    int convexity_row = -1;       // sum_h zeta0 = 1
    std::vector<int> link_rows;   // sum_h zeta3 = x_prev, one row per coordinate
};

namespace detail {

struct JPair {
    std::vector<int> zero, one;
};

// All (J1, J2) pairs with |J1 u J2| = s over [dx].
inline std::vector<JPair> enumerate_fixings(int dx, int s, long cap) {
    std::vector<JPair> out;
    std::vector<int> subset;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(subset.size()) == s) {
            for (unsigned long mask = 0; mask < (1ul << s); ++mask) {
                JPair p;
                for (int k = 0; k < s; ++k)
                    ((mask >> k) & 1ul ? p.one : p.zero).push_back(subset[k]);
                out.push_back(std::move(p));
                if (static_cast<long>(out.size()) > cap)
                    throw TooManyDisjuncts("hierarchy enumeration exceeds the configured cap");
            }
            return;
        }
        for (int j = start; j < dx; ++j) {
            subset.push_back(j);
            rec(j + 1);
            subset.pop_back();
        }
    };
    rec(0);
    return out;
}

// Shared lifted-LP assembly. Each block h carries its own row set plus
// optional state fixings; cut copies and box rows are homogenized by zeta0.
struct LiftedBlock {
    const std::vector<StageRow>* rows;
    std::vector<int> fix_zero, fix_one;  // indices into the state vector
};

inline LpProblem build_lifted(const StageTemplate& st, const StageData& d,
                              const std::vector<LiftedBlock>& blocks,
                              const std::vector<Cut>& cuts, const std::vector<double>& x_prev,
                              LiftedLayout* layout_out) {
    for (int j = 0; j < st.dim_y; ++j)
        if (st.y_lower[j] != 0.0)
            throw ModelError("lifted formulations require nonnegative local variables");
    LpProblem lp;
    LiftedLayout lay;
    for (int j = 0; j < st.dim_x; ++j) lay.x_cols.push_back(lp.add_column(d.cost_x[j], 0.0, 1.0));
    for (int j = 0; j < st.dim_y; ++j)
        lay.y_cols.push_back(lp.add_column(d.cost_y[j], 0.0, kInf));
    lay.phi_col = lp.add_column(1.0, 0.0, kInf);

    const int H = static_cast<int>(blocks.size());
    std::vector<int> z0(H);
    std::vector<std::vector<int>> z1(H), z2(H), z3(H);
    std::vector<int> z4(H);
    for (int h = 0; h < H; ++h) {
        z0[h] = lp.add_column(0.0, 0.0, kInf);
        for (int j = 0; j < st.dim_x; ++j) z1[h].push_back(lp.add_column(0.0, 0.0, kInf));
        for (int j = 0; j < st.dim_y; ++j) z2[h].push_back(lp.add_column(0.0, 0.0, kInf));
        for (int j = 0; j < st.dim_xprev; ++j) z3[h].push_back(lp.add_column(0.0, 0.0, kInf));
        z4[h] = lp.add_column(0.0, 0.0, kInf);
    }

    {
        std::vector<std::pair<int, double>> row;
        for (int h = 0; h < H; ++h) row.push_back({z0[h], 1.0});
        lay.convexity_row = lp.add_row(std::move(row), Relation::eq, 1.0);
    }
    for (int j = 0; j < st.dim_x; ++j) {
        std::vector<std::pair<int, double>> row{{lay.x_cols[j], -1.0}};
        for (int h = 0; h < H; ++h) row.push_back({z1[h][j], 1.0});
        lp.add_row(std::move(row), Relation::eq, 0.0);
    }
    for (int j = 0; j < st.dim_y; ++j) {
        std::vector<std::pair<int, double>> row{{lay.y_cols[j], -1.0}};
        for (int h = 0; h < H; ++h) row.push_back({z2[h][j], 1.0});
        lp.add_row(std::move(row), Relation::eq, 0.0);
    }
    for (int j = 0; j < st.dim_xprev; ++j) {
        std::vector<std::pair<int, double>> row;
        for (int h = 0; h < H; ++h) row.push_back({z3[h][j], 1.0});
        lay.link_rows.push_back(lp.add_row(std::move(row), Relation::eq, x_prev[j]));
    }
    {
        std::vector<std::pair<int, double>> row{{lay.phi_col, -1.0}};
        for (int h = 0; h < H; ++h) row.push_back({z4[h], 1.0});
        lp.add_row(std::move(row), Relation::eq, 0.0);
    }

    for (int h = 0; h < H; ++h) {
        for (const StageRow& r : *blocks[h].rows) {
            std::vector<std::pair<int, double>> row;
            for (int j = 0; j < st.dim_x; ++j)
                if (r.coef_x[j] != 0.0) row.push_back({z1[h][j], r.coef_x[j]});
            for (int j = 0; j < st.dim_y; ++j)
                if (r.coef_y[j] != 0.0) row.push_back({z2[h][j], r.coef_y[j]});
            for (int j = 0; j < st.dim_xprev; ++j)
                if (r.coef_xprev[j] != 0.0) row.push_back({z3[h][j], r.coef_xprev[j]});
            if (r.rhs != 0.0) row.push_back({z0[h], -r.rhs});
            lp.add_row(std::move(row), r.rel, 0.0);
        }
        // Homogenized variable boxes: x <= 1, x_prev <= 1, finite y uppers.
        for (int j = 0; j < st.dim_x; ++j)
            lp.add_row({{z1[h][j], 1.0}, {z0[h], -1.0}}, Relation::le, 0.0);
        for (int j = 0; j < st.dim_xprev; ++j)
            lp.add_row({{z3[h][j], 1.0}, {z0[h], -1.0}}, Relation::le, 0.0);
        for (int j = 0; j < st.dim_y; ++j)
            if (st.y_upper[j] < kInf)
                lp.add_row({{z2[h][j], 1.0}, {z0[h], -st.y_upper[j]}}, Relation::le, 0.0);
        for (int j : blocks[h].fix_zero) lp.upper[z1[h][j]] = 0.0;
        for (int j : blocks[h].fix_one)
            lp.add_row({{z1[h][j], 1.0}, {z0[h], -1.0}}, Relation::eq, 0.0);
        for (const Cut& c : cuts) {
            if (!c.aggregate()) throw ModelError("lifted subproblems host aggregate cuts only");
            std::vector<std::pair<int, double>> row{{z4[h], 1.0}};
            for (int j = 0; j < st.dim_x; ++j)
                if (c.alpha[j] != 0.0) row.push_back({z1[h][j], -c.alpha[j]});
            if (c.beta != 0.0) row.push_back({z0[h], -c.beta});
            lp.add_row(std::move(row), Relation::ge, 0.0);
        }
    }
    if (layout_out) *layout_out = lay;
    return lp;
}

}  // namespace detail

// Tight extended formulation of one disjunctive stage scenario: the lifted
// LP whose projection onto (x, y, phi) is the convex hull of the disjunctive
// set with the cut epigraph distributed into every disjunct.
inline LpProblem tight_extended_formulation(const StageTemplate& st, const StageData& d,
                                            const std::vector<Disjunct>& disjuncts,
                                            const std::vector<Cut>& cuts,
                                            const std::vector<double>& x_prev,
                                            LiftedLayout* layout_out = nullptr) {
    if (disjuncts.empty()) throw ModelError("disjunctive stage without disjuncts");
    std::vector<detail::LiftedBlock> blocks;
    for (const auto& h : disjuncts) blocks.push_back({&h.rows, {}, {}});
    return detail::build_lifted(st, d, blocks, cuts, x_prev, layout_out);
}

// Level-s relaxation of a mixed-binary stage: every way of fixing s state
// coordinates to binary values becomes one disjunct of the lifted LP. s = 0
// is the plain LP relaxation; s = dim_x reproduces the integer hull.
inline LpProblem hierarchy_relaxation(const StageTemplate& st, const StageData& d,
                                      const std::vector<Cut>& cuts,
                                      const std::vector<double>& x_prev, int s,
                                      long cap = 10000, LiftedLayout* layout_out = nullptr) {
    if (st.disjunctive()) throw ModelError("hierarchy relaxation applies to mixed-binary stages");
    if (s < 0 || s > st.dim_x) throw ModelError("hierarchy level must lie in [0, dim_x]");
    auto fixings = detail::enumerate_fixings(st.dim_x, s, cap);
    std::vector<detail::LiftedBlock> blocks;
    blocks.reserve(fixings.size());
    for (const auto& f : fixings) blocks.push_back({&d.rows, f.zero, f.one});
    return detail::build_lifted(st, d, blocks, cuts, x_prev, layout_out);
}

// One LP-per-disjunct nonemptiness check, run at model load time.
inline void validate_disjunctive_model(const MultistageModel& m) {
    for (int t = 1; t <= m.horizon; ++t) {
        const StageTemplate& st = m.stage(t);
        if (!st.disjunctive()) throw ModelError("LP-subproblem driver needs disjunctive stages");
        for (int i = 0; i < m.num_scenarios(t); ++i) {
            for (std::size_t h = 0; h < st.disjuncts[i].size(); ++h) {
                LpProblem lp;
                std::vector<int> xc, yc, pc;
                for (int j = 0; j < st.dim_x; ++j) xc.push_back(lp.add_column(0.0, 0.0, 1.0));
                for (int j = 0; j < st.dim_y; ++j)
                    yc.push_back(lp.add_column(0.0, st.y_lower[j], st.y_upper[j]));
                for (int j = 0; j < st.dim_xprev; ++j) pc.push_back(lp.add_column(0.0, 0.0, 1.0));
                for (const StageRow& r : st.disjuncts[i][h].rows) {
                    std::vector<std::pair<int, double>> row;
                    for (int j = 0; j < st.dim_x; ++j)
                        if (r.coef_x[j] != 0.0) row.push_back({xc[j], r.coef_x[j]});
                    for (int j = 0; j < st.dim_y; ++j)
                        if (r.coef_y[j] != 0.0) row.push_back({yc[j], r.coef_y[j]});
                    for (int j = 0; j < st.dim_xprev; ++j)
                        if (r.coef_xprev[j] != 0.0) row.push_back({pc[j], r.coef_xprev[j]});
                    lp.add_row(std::move(row), r.rel, r.rhs);
                }
                if (solve_lp(lp).status == LpStatus::infeasible)
                    throw EmptyDisjunct("disjunct is empty for every binary incoming state");
            }
        }
    }
}

namespace detail {

struct DpForward {
    std::vector<std::vector<double>> states;
    double total_cost = 0.0;
    double first_stage_value = 0.0;
};

inline DpForward dp_forward(const Policy& pol, const std::vector<int>& path,
                            const SimplexOptions& sopt = {}) {
    const MultistageModel& m = pol.model;
    DpForward out;
    std::vector<double> x_prev = m.x0;
    for (int t = 1; t <= m.horizon; ++t) {
        const StageTemplate& st = m.stage(t);
        LiftedLayout lay;
        LpProblem lp = tight_extended_formulation(st, st.data[path[t - 1]],
                                                  st.disjuncts[path[t - 1]], pol.stage_cuts(t),
                                                  x_prev, &lay);
        if (t == m.horizon) lp.upper[lay.phi_col] = 0.0;
        LpSolution sol = solve_lp(lp, sopt);
        if (sol.status != LpStatus::optimal)
            throw ModelError("LP-subproblem not solvable; disjunctive assumptions violated");
        std::vector<double> x;
        double cost = 0.0;
        const StageData& d = st.data[path[t - 1]];
        for (int j = 0; j < st.dim_x; ++j) {
            x.push_back(std::round(sol.primal[lay.x_cols[j]]));
            cost += d.cost_x[j] * sol.primal[lay.x_cols[j]];
        }
        for (int j = 0; j < st.dim_y; ++j) cost += d.cost_y[j] * sol.primal[lay.y_cols[j]];
        if (t == 1) out.first_stage_value = sol.objective;
        out.states.push_back(x);
        out.total_cost += cost;
        x_prev = std::move(x);
    }
    return out;
}

// Benders-style cut from the lifted LP at (x_hat, scenario): gradient from
// the duals of the state linking rows, intercept tight at x_hat.
inline Cut dp_scenario_cut(const Policy& pol, int t, const std::vector<double>& x_hat,
                           int scenario, long iteration, const SimplexOptions& sopt = {}) {
    const StageTemplate& st = pol.model.stage(t);
    LiftedLayout lay;
    LpProblem lp = tight_extended_formulation(st, st.data[scenario], st.disjuncts[scenario],
                                              pol.stage_cuts(t), x_hat, &lay);
    if (t == pol.model.horizon) lp.upper[lay.phi_col] = 0.0;
    LpSolution sol = solve_lp(lp, sopt);
    if (sol.status != LpStatus::optimal)
        throw ModelError("LP-subproblem not solvable; disjunctive assumptions violated");
    Cut c;
    c.stage = t - 1;
    c.scenario = scenario;
    c.kind = CutKind::benders;
    c.alpha.resize(lay.link_rows.size());
    for (std::size_t j = 0; j < lay.link_rows.size(); ++j) c.alpha[j] = sol.duals[lay.link_rows[j]];
    c.beta = sol.objective - dot(c.alpha, x_hat);
    c.iteration = iteration;
    return c;
}

}  // namespace detail

// Sampling driver over LP-subproblems: hull-exact stage solves, per-scenario
// Benders cuts from the lifted duals, aggregation per variant.
inline std::pair<Policy, SolveLog> dasddp_dp_run(const MultistageModel& m,
                                                 const SolverConfig& cfg) {
    cfg.validate();
    m.validate();
    validate_disjunctive_model(m);
    if (cfg.variant == Variant::drr_r || cfg.variant == Variant::dro_r)
        throw ModelError("the LP-subproblem driver supports the cutting-plane variants");
    Policy pol;
    pol.model = m;
    pol.variant = cfg.variant;
    pol.mode = ApproxMode::epigraph;
    pol.cuts.assign(m.horizon + 1, {});
    pol.floors.assign(m.horizon + 2, 0.0);

    SolveLog log;
    Rng rng(cfg.seed);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    double best_lb = -kInf;
    int stall = 0;
    log.status = StopReason::iter_limit;
    for (long l = 1; l <= cfg.max_iters; ++l) {
        IterRecord rec;
        rec.iter = l;
        for (int p = 0; p < cfg.paths_per_iter; ++p) {
            rec.path = sample_path(rng, m);
            detail::DpForward fwd = detail::dp_forward(pol, rec.path);
            rec.fwd_obj = fwd.total_cost;
            for (int t = m.horizon; t >= 2; --t) {
                const std::vector<double>& x_hat = fwd.states[t - 2];
                const int n = m.num_scenarios(t);
                std::vector<Cut> scen(n);
                if (cfg.threads > 1 && n > 1) {
                    std::vector<std::future<Cut>> futs;
                    for (int i = 0; i < n; ++i)
                        futs.push_back(std::async(std::launch::async, [&, t, i] {
                            return detail::dp_scenario_cut(pol, t, x_hat, i, l);
                        }));
                    for (int i = 0; i < n; ++i) scen[i] = futs[i].get();
                } else {
                    for (int i = 0; i < n; ++i)
                        scen[i] = detail::dp_scenario_cut(pol, t, x_hat, i, l);
                }
                const ScenarioSupport& sup = m.support(t);
                const double eps = m.ambiguity.singleton() ? 0.0 : m.ambiguity.epsilon;
                Cut agg;
                switch (cfg.variant) {
                    case Variant::dro_c: agg = dro_separation_cut(scen, x_hat, sup, eps, l); break;
                    case Variant::drr_c: agg = drr_cut_coefficients(scen, x_hat, sup, eps, l); break;
                    default: agg = expectation_cut(scen, sup, l); break;
                }
                pol.cuts[t - 1].push_back(std::move(agg));
                rec.cuts_added += 1;
            }
        }
        {
            LiftedLayout lay;
            const StageTemplate& st1 = m.stage(1);
            LpProblem lp = tight_extended_formulation(st1, st1.data[0], st1.disjuncts[0],
                                                      pol.stage_cuts(1), m.x0, &lay);
            if (m.horizon == 1) lp.upper[lay.phi_col] = 0.0;
            LpSolution sol = solve_lp(lp);
            if (sol.status != LpStatus::optimal) throw ModelError("first LP-subproblem failed");
            rec.lb = sol.objective;
        }
        rec.time_s = elapsed();
        log.records.push_back(rec);
        if (rec.lb > best_lb + cfg.stall_tol) {
            best_lb = rec.lb;
            stall = 0;
        } else if (++stall >= cfg.stall_iters) {
            log.status = StopReason::converged_stall;
            break;
        }
        if (elapsed() > cfg.time_limit_secs) {
            log.status = StopReason::time_limit;
            break;
        }
    }
    log.final_lb = log.records.empty() ? -kInf : log.records.back().lb;
    log.wall_secs = elapsed();
    return {std::move(pol), std::move(log)};
}

}  // namespace drsddp

#endif  // DRSDDP_DISJUNCTIVE_HPP_
