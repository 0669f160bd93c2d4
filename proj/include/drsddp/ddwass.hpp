#ifndef DRSDDP_DDWASS_HPP_
#define DRSDDP_DDWASS_HPP_

// Decision-dependent Wasserstein machinery for continuous box supports with
// RHS-only uncertainty: affine radius maps and the cut-generating LP derived
// from the Lagrangian dual of the penalized stage problem. The l1 ground norm
// makes the dual-norm condition a pair of linear rows per coordinate.

#include <vector>

#include "drsddp/lp.hpp"
#include "drsddp/model.hpp"

namespace drsddp {

struct DdRadius {
    double base = 0.0;
    std::vector<double> slope;

    double eval(const std::vector<double>& x) const {
        double v = base + dot(slope, x);
        if (v < -1e-12) throw NegativeRadius("decision-dependent radius is negative");
        return std::max(v, 0.0);
    }

    // The radius must stay nonnegative at every binary state; the minimum over
    // the box is attained coordinatewise.
    void validate() const {
        double lo = base;
        for (double s : slope) lo += std::min(0.0, s);
        if (lo < -1e-12) throw NegativeRadius("radius map can reach negative values");
    }
};

namespace detail {

// Stage shape checks for the continuous-support dual: pure state stages with
// >= rows whose RHS is the random vector, costs shared across scenarios.
inline void check_dd_stage(const StageTemplate& st) {
    if (st.disjunctive()) throw ModelError("decision-dependent stages cannot be disjunctive");
    if (st.dim_y != 0) throw ModelError("decision-dependent stages carry state columns only");
    if (!st.rhs_is_omega) throw ModelError("decision-dependent stages need rhs_is_omega");
    for (const auto& d : st.data) {
        if (d.cost_x != st.data.front().cost_x)
            throw ModelError("decision-dependent stages need scenario-independent costs");
        for (std::size_t r = 0; r < d.rows.size(); ++r) {
            if (d.rows[r].rel != Relation::ge)
                throw ModelError("decision-dependent stages need >= rows");
            if (d.rows[r].coef_x != st.data.front().rows[r].coef_x ||
                d.rows[r].coef_xprev != st.data.front().rows[r].coef_xprev)
                throw ModelError("decision-dependent stages need scenario-independent matrices");
        }
    }
}

}  // namespace detail

// Cut for the stage-t optimistic expected cost-to-go as a function of the
// incoming state, generated at x_hat from cuts {(pi^k, gamma^k)} valid for
// the next stage's optimistic expected cost-to-go. Any feasible dual point
// yields a valid cut; the LP maximizes the bound at x_hat.
inline Cut dd_cut_generate(const MultistageModel& m, int t, const std::vector<double>& x_hat,
                           const std::vector<Cut>& next_cuts, long iteration = 0,
                           const SimplexOptions& sopt = {}) {
    const StageTemplate& st = m.stage(t);
    detail::check_dd_stage(st);
    const AmbiguitySpec& amb = m.ambiguity;
    if (amb.kind != AmbiguitySpec::Kind::wasserstein_dd_continuous)
        throw ModelError("dd cut generation needs a decision-dependent ambiguity set");
    DdRadius radius{amb.epsilon + amb.dd_base, amb.dd_slope};
    radius.validate();
    if (static_cast<int>(radius.slope.size()) != st.dim_xprev)
        throw DimensionMismatch("radius slope width must match the incoming state");

    const int d_omega = static_cast<int>(st.data.front().rows.size());
    if (static_cast<int>(amb.box_lower.size()) != d_omega)
        throw DimensionMismatch("box bounds must cover every random coordinate");
    const int n = m.num_scenarios(t);
    const int dx = st.dim_x;
    std::vector<Cut> cuts = next_cuts;
    if (cuts.empty()) throw ModelError("dd cut generation needs at least one next-stage cut");
    for (const Cut& c : cuts) {
        if (!c.aggregate()) throw ModelError("dd cut generation aggregates only");
        if (static_cast<int>(c.alpha.size()) != dx)
            throw DimensionMismatch("next-stage cut width mismatch");
    }
    const int K = static_cast<int>(cuts.size());
    const auto& A_rows = st.data.front().rows;  // scenario-independent matrices
    const auto& cost = st.data.front().cost_x;
    const double inv_n = 1.0 / static_cast<double>(n);

    LpProblem lp;
    lp.sense = Sense::maximize;
    const int rho = lp.add_column(-radius.eval(x_hat), 0.0, kInf);
    struct Block {
        int lambda0, mu0, nu0, zeta0;
    };
    std::vector<Block> blocks(n);
    for (int i = 0; i < n; ++i) {
        const auto& omega = m.support(t).realizations[i];
        Block b;
        b.lambda0 = lp.num_cols();
        for (int r = 0; r < d_omega; ++r) {
            double cx = 0.0;  // -(C x_hat)_r + omega_r
            cx = omega[r] - dot(A_rows[r].coef_xprev, x_hat);
            lp.add_column(inv_n * cx, 0.0, kInf);
        }
        b.mu0 = lp.num_cols();
        for (int r = 0; r < d_omega; ++r)
            lp.add_column(inv_n * (amb.box_lower[r] - omega[r]), 0.0, kInf);
        b.nu0 = lp.num_cols();
        for (int r = 0; r < d_omega; ++r)
            lp.add_column(inv_n * (omega[r] - amb.box_upper[r]), 0.0, kInf);
        b.zeta0 = lp.num_cols();
        for (int k = 0; k < K; ++k) lp.add_column(inv_n * cuts[k].beta, 0.0, kInf);
        blocks[i] = b;
    }
    for (int i = 0; i < n; ++i) {
        const Block& b = blocks[i];
        for (int j = 0; j < dx; ++j) {
            std::vector<std::pair<int, double>> row;
            for (int r = 0; r < d_omega; ++r)
                if (A_rows[r].coef_x[j] != 0.0) row.push_back({b.lambda0 + r, A_rows[r].coef_x[j]});
            for (int k = 0; k < K; ++k)
                if (cuts[k].alpha[j] != 0.0) row.push_back({b.zeta0 + k, -cuts[k].alpha[j]});
            lp.add_row(std::move(row), Relation::eq, cost[j]);
        }
        for (int r = 0; r < d_omega; ++r) {
            lp.add_row({{b.lambda0 + r, 1.0}, {b.mu0 + r, -1.0}, {b.nu0 + r, 1.0}, {rho, -1.0}},
                       Relation::le, 0.0);
            lp.add_row({{b.lambda0 + r, 1.0}, {b.mu0 + r, -1.0}, {b.nu0 + r, 1.0}, {rho, 1.0}},
                       Relation::ge, 0.0);
        }
        std::vector<std::pair<int, double>> ones;
        for (int k = 0; k < K; ++k) ones.push_back({b.zeta0 + k, 1.0});
        lp.add_row(std::move(ones), Relation::eq, 1.0);
    }

    LpSolution sol = solve_lp(lp, sopt);
    if (sol.status == LpStatus::infeasible)
        throw DualInfeasible("dual system infeasible: next-stage cuts inconsistent with the costs");
    if (sol.status == LpStatus::unbounded)
        throw NumericalFailure("dd cut LP unbounded; the stage violates compactness");

    Cut out;
    out.stage = t - 1;
    out.scenario = -1;
    out.kind = CutKind::dd_wasserstein;
    out.iteration = iteration;
    out.alpha.assign(st.dim_xprev, 0.0);
    double beta = -sol.primal[rho] * (amb.epsilon + amb.dd_base);
    for (int j = 0; j < st.dim_xprev; ++j) out.alpha[j] = -sol.primal[rho] * radius.slope[j];
    for (int i = 0; i < n; ++i) {
        const Block& b = blocks[i];
        const auto& omega = m.support(t).realizations[i];
        for (int r = 0; r < d_omega; ++r) {
            double lam = sol.primal[b.lambda0 + r];
            double mu = sol.primal[b.mu0 + r];
            double nu = sol.primal[b.nu0 + r];
            for (int j = 0; j < st.dim_xprev; ++j)
                out.alpha[j] -= inv_n * A_rows[r].coef_xprev[j] * lam;
            beta += inv_n * (mu * amb.box_lower[r] - nu * amb.box_upper[r] +
                             (lam - mu + nu) * omega[r]);
        }
        for (int k = 0; k < K; ++k)
            beta += inv_n * sol.primal[b.zeta0 + k] * cuts[k].beta;
    }
    out.beta = beta;
    return out;
}

}  // namespace drsddp

#endif  // DRSDDP_DDWASS_HPP_
