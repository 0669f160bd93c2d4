#ifndef DRSDDP_MODEL_HPP_
#define DRSDDP_MODEL_HPP_

// Multistage model representation: per-stage templates with scenario-resolved
// data, finite supports, cut records, and the binary expansion rewrite for
// bounded integer states.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "drsddp/common.hpp"
#include "drsddp/lp.hpp"

namespace drsddp {

struct ScenarioSupport {
    std::vector<std::vector<double>> realizations;  // N x d_omega
    std::vector<double> reference_probs;

    int size() const { return static_cast<int>(realizations.size()); }

    void validate() const {
        if (realizations.empty()) throw ModelError("support must contain at least one realization");
        if (reference_probs.size() != realizations.size())
            throw ModelError("support probabilities do not match realizations");
        double sum = 0.0;
        for (double p : reference_probs) {
            if (p < -1e-12) throw ModelError("negative reference probability");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw ModelError("reference probabilities must sum to 1");
        for (const auto& w : realizations)
            if (w.size() != realizations.front().size())
                throw ModelError("realizations must share a dimension");
    }
};

enum class CutKind : std::uint8_t {
    benders,
    strengthened_benders,
    integer_optimality,
    drr_aggregate,
    dro_aggregate,
    dd_wasserstein,
};

// Affine minorant phi >= alpha'x + beta of a (expected) cost-to-go function.
// `stage` is the stage whose subproblem hosts the cut; `scenario` indexes the
// next stage's support for per-scenario cuts and is -1 for aggregates.
struct Cut {
    int stage = 0;
    int scenario = -1;
    CutKind kind = CutKind::benders;
    std::vector<double> alpha;
    double beta = 0.0;
    long iteration = 0;

    bool aggregate() const { return scenario < 0; }

    double value_at(const std::vector<double>& x) const { return dot(alpha, x) + beta; }
};

// One scenario's fully resolved stage data. The row convention is
//   coef_x' x_t + coef_y' y_t + coef_xprev' x_{t-1}  (rel)  rhs.
struct StageRow {
    std::vector<double> coef_x;
    std::vector<double> coef_y;
    std::vector<double> coef_xprev;
    Relation rel = Relation::ge;
    double rhs = 0.0;
};

struct StageData {
    std::vector<double> cost_x;
    std::vector<double> cost_y;
    std::vector<StageRow> rows;
};

struct Disjunct {
    std::vector<StageRow> rows;
};

struct StageTemplate {
    int t = 1;  // 1-based stage index
    int dim_x = 0, dim_y = 0, dim_xprev = 0;
    std::vector<bool> y_binary;
    std::vector<double> y_lower, y_upper;
    std::vector<StageData> data;  // one entry per scenario of this stage
    // Disjunctive alternative: per scenario, a list of disjuncts sharing the
    // stage's dimensions and costs. Empty for plain mixed-binary stages.
    std::vector<std::vector<Disjunct>> disjuncts;
    // When set, the row right-hand sides equal the scenario realization
    // (random vectors enter the RHS only).
    bool rhs_is_omega = false;

    bool disjunctive() const { return !disjuncts.empty(); }

    void validate() const {
        if (dim_x < 0 || dim_y < 0 || dim_xprev < 0) throw ModelError("negative stage dimension");
        if (static_cast<int>(y_binary.size()) != dim_y) throw ModelError("y_binary length mismatch");
        if (static_cast<int>(y_lower.size()) != dim_y || static_cast<int>(y_upper.size()) != dim_y)
            throw ModelError("y bound length mismatch");
        if (data.empty()) throw ModelError("stage has no scenario data");
        auto check_rows = [&](const std::vector<StageRow>& rows) {
            for (const auto& r : rows) {
                if (static_cast<int>(r.coef_x.size()) != dim_x ||
                    static_cast<int>(r.coef_y.size()) != dim_y ||
                    static_cast<int>(r.coef_xprev.size()) != dim_xprev)
                    throw ModelError("stage row width mismatch");
            }
        };
        for (const auto& d : data) {
            if (static_cast<int>(d.cost_x.size()) != dim_x) throw ModelError("cost_x length mismatch");
            if (static_cast<int>(d.cost_y.size()) != dim_y) throw ModelError("cost_y length mismatch");
            check_rows(d.rows);
        }
        if (disjunctive()) {
            if (disjuncts.size() != data.size()) throw ModelError("disjunct scenarios mismatch");
            for (const auto& per_scen : disjuncts) {
                if (per_scen.empty()) throw ModelError("disjunctive stage without disjuncts");
                for (const auto& h : per_scen) check_rows(h.rows);
            }
        }
    }
};

struct AmbiguitySpec {
    enum class Kind : std::uint8_t { singleton, wasserstein_finite, wasserstein_dd_continuous };
    Kind kind = Kind::singleton;
    double epsilon = 0.0;
    std::string norm = "l1";
    // Decision-dependent radius and box support (continuous kind only).
    double dd_base = 0.0;
    std::vector<double> dd_slope;
    std::vector<double> box_lower, box_upper;

    bool singleton() const { return kind == Kind::singleton || epsilon == 0.0; }

    void validate() const {
        if (epsilon < 0.0) throw ModelError("ambiguity radius must be nonnegative");
        if (norm != "l1") throw ModelError("only the l1 ground norm is supported");
        if (kind == Kind::wasserstein_dd_continuous) {
            if (box_lower.size() != box_upper.size()) throw ModelError("box bound length mismatch");
            for (std::size_t i = 0; i < box_lower.size(); ++i)
                if (box_lower[i] > box_upper[i]) throw ModelError("box bounds inverted");
        }
    }
};

struct MultistageModel {
    int horizon = 1;
    std::vector<StageTemplate> stages;      // size T, index t-1
    std::vector<ScenarioSupport> supports;  // size T; supports[0] is the singleton first stage
    std::vector<double> x0;
    AmbiguitySpec ambiguity;
    double report_sign = 1.0;  // -1 when the native formulation maximizes

    int num_scenarios(int t) const { return supports[t - 1].size(); }
    const StageTemplate& stage(int t) const { return stages[t - 1]; }
    const ScenarioSupport& support(int t) const { return supports[t - 1]; }

    void validate() const {
        if (horizon < 1) throw ModelError("horizon must be at least 1");
        if (static_cast<int>(stages.size()) != horizon) throw ModelError("stage count mismatch");
        if (static_cast<int>(supports.size()) != horizon) throw ModelError("support count mismatch");
        ambiguity.validate();
        for (int t = 1; t <= horizon; ++t) {
            const auto& st = stage(t);
            const auto& sp = support(t);
            sp.validate();
            st.validate();
            if (st.t != t) throw ModelError("stage index out of order");
            if (static_cast<int>(st.data.size()) != sp.size())
                throw ModelError("scenario data count does not match support size");
            if (t == 1) {
                if (sp.size() != 1) throw ModelError("first stage support must be a singleton");
                if (static_cast<int>(x0.size()) != st.dim_xprev)
                    throw ModelError("x0 length does not match the first stage linking width");
            } else if (st.dim_xprev != stage(t - 1).dim_x) {
                throw ModelError("linking width must equal the previous stage's state dimension");
            }
            if (st.rhs_is_omega) {
                for (int i = 0; i < sp.size(); ++i)
                    if (st.data[i].rows.size() != sp.realizations[i].size())
                        throw ModelError("rhs_is_omega stage needs one row per random coordinate");
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Binary expansion of bounded integer states.

// ranges[t][j] is the integer upper bound U of state column j at stage t;
// entry 0 describes x0. U = 1 keeps the column binary as-is.
inline int binary_expansion_width(long upper) {
    if (upper < 0) throw UnboundedInteger("integer state range missing or negative");
    int k = 0;
    while ((1L << k) <= upper) ++k;  // ceil(log2(U+1))
    return k;
}

inline double binary_expansion_decode(const std::vector<double>& bits) {
    double v = 0.0;
    for (std::size_t k = 0; k < bits.size(); ++k) v += bits[k] * static_cast<double>(1L << k);
    return v;
}

inline MultistageModel binary_expand(const MultistageModel& m,
                                     const std::vector<std::vector<long>>& ranges) {
    if (static_cast<int>(ranges.size()) != m.horizon + 1)
        throw UnboundedInteger("ranges must cover x0 plus every stage");
    MultistageModel out = m;

    // Per stage, the bit weights of every original column.
    std::vector<std::vector<std::vector<double>>> weights(m.horizon + 1);
    for (int t = 0; t <= m.horizon; ++t) {
        int dim = (t == 0) ? m.stage(1).dim_xprev : m.stage(t).dim_x;
        if (static_cast<int>(ranges[t].size()) != dim)
            throw UnboundedInteger("range width mismatch at stage " + std::to_string(t));
        weights[t].resize(dim);
        for (int j = 0; j < dim; ++j) {
            int w = binary_expansion_width(ranges[t][j]);
            for (int k = 0; k < w; ++k) weights[t][j].push_back(static_cast<double>(1L << k));
        }
    }

    auto expand_vector = [](const std::vector<double>& v,
                            const std::vector<std::vector<double>>& w) {
        std::vector<double> r;
        for (std::size_t j = 0; j < v.size(); ++j)
            for (double bit : w[j]) r.push_back(v[j] * bit);
        return r;
    };

    for (int t = 1; t <= m.horizon; ++t) {
        auto& st = out.stages[t - 1];
        const auto& wx = weights[t];
        const auto& wp = weights[t - 1];
        int new_dx = 0, new_dp = 0;
        for (const auto& w : wx) new_dx += static_cast<int>(w.size());
        for (const auto& w : wp) new_dp += static_cast<int>(w.size());
        // Ranges whose width is not 2^k - 1 need a cap row on the bit weights.
        std::vector<StageRow> caps;
        {
            int offset = 0;
            for (std::size_t j = 0; j < wx.size(); ++j) {
                int w = static_cast<int>(wx[j].size());
                long reach = w ? (1L << w) - 1 : 0;
                if (reach > ranges[t][j]) {
                    StageRow row;
                    row.coef_x.assign(new_dx, 0.0);
                    row.coef_y.assign(st.dim_y, 0.0);
                    row.coef_xprev.assign(new_dp, 0.0);
                    for (int k = 0; k < w; ++k) row.coef_x[offset + k] = wx[j][k];
                    row.rel = Relation::le;
                    row.rhs = static_cast<double>(ranges[t][j]);
                    caps.push_back(std::move(row));
                }
                offset += w;
            }
        }
        for (auto& d : st.data) {
            d.cost_x = expand_vector(d.cost_x, wx);
            for (auto& row : d.rows) {
                row.coef_x = expand_vector(row.coef_x, wx);
                row.coef_xprev = expand_vector(row.coef_xprev, wp);
            }
            d.rows.insert(d.rows.end(), caps.begin(), caps.end());
        }
        for (auto& per_scen : st.disjuncts)
            for (auto& h : per_scen)
                for (auto& row : h.rows) {
                    row.coef_x = expand_vector(row.coef_x, wx);
                    row.coef_xprev = expand_vector(row.coef_xprev, wp);
                    // cap rows are appended below, once per disjunct
                }
        for (auto& per_scen : st.disjuncts)
            for (auto& h : per_scen) h.rows.insert(h.rows.end(), caps.begin(), caps.end());
        st.dim_x = new_dx;
        st.dim_xprev = new_dp;
    }

    // Decode x0 into bits (big ranges keep positional binary digits).
    std::vector<double> x0_bits;
    for (std::size_t j = 0; j < m.x0.size(); ++j) {
        long v = std::lround(m.x0[j]);
        int w = static_cast<int>(weights[0][j].size());
        for (int k = 0; k < w; ++k) x0_bits.push_back(static_cast<double>((v >> k) & 1L));
        if (v > (w ? (1L << w) - 1 : 0)) throw UnboundedInteger("x0 exceeds declared range");
    }
    out.x0 = x0_bits;
    out.validate();
    return out;
}

}  // namespace drsddp

#endif  // DRSDDP_MODEL_HPP_
