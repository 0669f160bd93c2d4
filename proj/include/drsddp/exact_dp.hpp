#ifndef DRSDDP_EXACT_DP_HPP_
#define DRSDDP_EXACT_DP_HPP_

// Exact backward recursion over all binary states, with the inner min/max
// over the ambiguity polytope solved as an LP. Desk scale only; this is the
// ground truth the sampling algorithms are checked against.

#include <vector>

#include "drsddp/ambiguity.hpp"
#include "drsddp/mip.hpp"
#include "drsddp/model.hpp"

namespace drsddp {

enum class RiskPosture : std::uint8_t { neutral, dro, drr };

struct ExactDpOptions {
    int max_dim_x = 12;
    int max_horizon = 4;
    int max_support = 4;
    double tol_mip = 1e-7;
};

namespace detail {

// Minimum local cost at a fixed (x_t, x_prev); returns false when the rows
// cannot be satisfied. Row residuals already absorb the fixed columns.
inline bool local_minimum(const StageTemplate& st, const std::vector<StageRow>& rows,
                          const std::vector<double>& cost_y, const std::vector<double>& x,
                          const std::vector<double>& x_prev, double tol_mip, double* value) {
    if (st.dim_y == 0) {
        for (const auto& r : rows) {
            double lhs = dot(r.coef_x, x) + dot(r.coef_xprev, x_prev);
            bool ok = true;
            switch (r.rel) {
                case Relation::le: ok = lhs <= r.rhs + 1e-9; break;
                case Relation::ge: ok = lhs >= r.rhs - 1e-9; break;
                case Relation::eq: ok = std::fabs(lhs - r.rhs) <= 1e-9; break;
            }
            if (!ok) return false;
        }
        *value = 0.0;
        return true;
    }
    MipProblem p;
    for (int j = 0; j < st.dim_y; ++j) {
        p.base.add_column(cost_y[j], st.y_lower[j], st.y_upper[j]);
        if (st.y_binary[j]) p.binary_columns.push_back(j);
    }
    for (const auto& r : rows) {
        std::vector<std::pair<int, double>> coefs;
        for (int j = 0; j < st.dim_y; ++j)
            if (r.coef_y[j] != 0.0) coefs.push_back({j, r.coef_y[j]});
        double rhs = r.rhs - dot(r.coef_x, x) - dot(r.coef_xprev, x_prev);
        p.base.add_row(std::move(coefs), r.rel, rhs);
    }
    MipOptions opt;
    opt.tol_mip = tol_mip;
    MipSolution s = solve_mip(p, opt);
    if (s.status != MipStatus::optimal) return false;
    *value = s.objective;
    return true;
}

inline std::vector<double> state_bits(unsigned long mask, int dim) {
    std::vector<double> x(dim, 0.0);
    for (int j = 0; j < dim; ++j) x[j] = (mask >> j) & 1ul ? 1.0 : 0.0;
    return x;
}

}  // namespace detail

// Stage value Q_t(x_prev, scenario) given the tabulated expected cost-to-go
// of the next stage (indexed by the state bit pattern; empty at the horizon).
inline double exact_stage_value(const MultistageModel& m, int t, const std::vector<double>& x_prev,
                                int scenario, const std::vector<double>& next_ecg,
                                double tol_mip = 1e-7) {
    const StageTemplate& st = m.stage(t);
    const StageData& d = st.data[scenario];
    double best = kInf;
    for (unsigned long mask = 0; mask < (1ul << st.dim_x); ++mask) {
        std::vector<double> x = detail::state_bits(mask, st.dim_x);
        double tail = next_ecg.empty() ? 0.0 : next_ecg[mask];
        double base = dot(d.cost_x, x) + tail;
        double vy = 0.0;
        bool ok = false;
        if (st.disjunctive()) {
            for (const auto& h : st.disjuncts[scenario]) {
                double v = 0.0;
                if (detail::local_minimum(st, h.rows, d.cost_y, x, x_prev, tol_mip, &v)) {
                    if (!ok || v < vy) vy = v;
                    ok = true;
                }
            }
        } else {
            ok = detail::local_minimum(st, d.rows, d.cost_y, x, x_prev, tol_mip, &vy);
        }
        if (!ok) continue;
        best = std::min(best, base + vy);
    }
    if (best == kInf) throw ModelError("stage set empty for some binary state");
    return best;
}

// Expected cost-to-go of stage-t values under the requested risk posture.
inline double exact_expected_value(const std::vector<double>& values, const ScenarioSupport& s,
                                   const AmbiguitySpec& amb, RiskPosture risk) {
    if (risk == RiskPosture::neutral || amb.singleton())
        return dot(values, s.reference_probs);
    if (risk == RiskPosture::dro) return worst_case_distribution(values, s, amb.epsilon).second;
    return best_case_distribution(values, s, amb.epsilon).second;
}

inline double exact_value_dp(const MultistageModel& m, RiskPosture risk,
                             const ExactDpOptions& opt = {}) {
    m.validate();
    if (m.ambiguity.kind == AmbiguitySpec::Kind::wasserstein_dd_continuous)
        throw TooLarge("exact recursion supports finite supports only");
    if (m.horizon > opt.max_horizon) throw TooLarge("horizon exceeds the exact recursion limit");
    for (int t = 1; t <= m.horizon; ++t) {
        if (m.stage(t).dim_x > opt.max_dim_x) throw TooLarge("state dimension exceeds the limit");
        if (m.num_scenarios(t) > opt.max_support) throw TooLarge("support size exceeds the limit");
    }

    std::vector<double> next_ecg;  // indexed by this stage's state bit pattern
    for (int t = m.horizon; t >= 2; --t) {
        const StageTemplate& st = m.stage(t);
        const int prev_dim = st.dim_xprev;
        const int n = m.num_scenarios(t);
        std::vector<double> ecg(1ul << prev_dim, 0.0);
        for (unsigned long mask = 0; mask < (1ul << prev_dim); ++mask) {
            std::vector<double> x_prev = detail::state_bits(mask, prev_dim);
            std::vector<double> values(n);
            for (int i = 0; i < n; ++i)
                values[i] = exact_stage_value(m, t, x_prev, i, next_ecg, opt.tol_mip);
            ecg[mask] = exact_expected_value(values, m.support(t), m.ambiguity, risk);
        }
        next_ecg = std::move(ecg);
    }
    return exact_stage_value(m, 1, m.x0, 0, next_ecg, opt.tol_mip);
}

}  // namespace drsddp

#endif  // DRSDDP_EXACT_DP_HPP_
