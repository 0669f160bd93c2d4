#ifndef DRSDDP_MIP_HPP_
#define DRSDDP_MIP_HPP_

// Branch-and-bound for mixed-binary linear programs on top of the simplex
// core. Most-fractional branching, best-bound node selection, lowest-index
// tie breaks; fully deterministic for identical inputs.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <vector>

#include "drsddp/lp.hpp"

namespace drsddp {

struct MipProblem {
    LpProblem base;
    std::vector<int> binary_columns;

    void validate() const {
        base.validate();
        for (int j : binary_columns) {
            if (j < 0 || j >= base.num_cols())
                throw DimensionMismatch("binary column index out of range");
            if (base.lower[j] < -kTolFeas || base.upper[j] > 1.0 + kTolFeas)
                throw BadBound("binary column bounds must lie within [0,1]");
        }
    }
};

enum class MipStatus : std::uint8_t { optimal, infeasible, unbounded };

struct MipSolution {
    MipStatus status = MipStatus::optimal;
    double objective = 0.0;
    double incumbent_bound = 0.0;  // best tree bound; <= objective for min
    std::vector<double> primal;
    long nodes = 0;
};

struct MipOptions {
    double tol_mip = kTolMip;
    double tol_int = 1e-6;
    long node_limit = 500000;
    SimplexOptions lp;
};

inline LpProblem lp_relaxation(const MipProblem& p) {
    LpProblem r = p.base;
    for (int j : p.binary_columns) {
        r.lower[j] = std::max(r.lower[j], 0.0);
        r.upper[j] = std::min(r.upper[j], 1.0);
    }
    return r;
}

namespace detail {

struct BnbNode {
    long id = 0;
    double bound = 0.0;
    std::vector<double> primal;
    // Fixings accumulated on binary columns: -1 unfixed, 0 or 1 fixed.
    std::vector<std::int8_t> fix;
};

struct NodeOrder {
    // min-heap on bound, then FIFO on id
    bool operator()(const BnbNode& a, const BnbNode& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        return a.id > b.id;
    }
};

}  // namespace detail

inline MipSolution solve_mip(const MipProblem& p, const MipOptions& opt = {}) {
    p.validate();
    const double sgn = (p.base.sense == Sense::maximize) ? -1.0 : 1.0;
    const auto& bins = p.binary_columns;
    LpProblem relax = lp_relaxation(p);
    const std::vector<double> base_lo = relax.lower, base_hi = relax.upper;

    auto solve_node = [&](const std::vector<std::int8_t>& fix, LpSolution& sol) {
        for (std::size_t k = 0; k < bins.size(); ++k) {
            int j = bins[k];
            if (fix[k] < 0) { relax.lower[j] = base_lo[j]; relax.upper[j] = base_hi[j]; }
            else { relax.lower[j] = relax.upper[j] = static_cast<double>(fix[k]); }
        }
        sol = solve_lp(relax, opt.lp);
    };

    MipSolution out;
    std::priority_queue<detail::BnbNode, std::vector<detail::BnbNode>, detail::NodeOrder> open;
    long next_id = 0;

    detail::BnbNode root;
    root.id = next_id++;
    root.fix.assign(bins.size(), -1);
    {
        LpSolution sol;
        solve_node(root.fix, sol);
        out.nodes = 1;
        if (sol.status == LpStatus::infeasible) { out.status = MipStatus::infeasible; return out; }
        if (sol.status == LpStatus::unbounded) { out.status = MipStatus::unbounded; return out; }
        root.bound = sgn * sol.objective;
        root.primal = std::move(sol.primal);
    }
    open.push(std::move(root));

    bool have_inc = false;
    double inc_obj = kInf;  // in minimization orientation
    std::vector<double> inc_primal;
    double pruned_min = kInf;  // weakest bound ever discarded

    auto gap_abs = [&]() { return opt.tol_mip * (1.0 + std::fabs(inc_obj)); };

    while (!open.empty()) {
        detail::BnbNode node = open.top();
        open.pop();
        if (have_inc && node.bound >= inc_obj - gap_abs()) {
            // Best-bound order: everything left is at least as bad.
            pruned_min = std::min(pruned_min, node.bound);
            break;
        }
        int branch_k = -1;
        double best_frac = -1.0;
        for (std::size_t k = 0; k < bins.size(); ++k) {
            double v = node.primal[bins[k]];
            double dist = std::fabs(v - std::round(v));
            if (dist <= opt.tol_int) continue;
            double score = 0.5 - std::fabs(v - std::floor(v) - 0.5);  // closeness to 0.5
            if (score > best_frac + 1e-15) { best_frac = score; branch_k = static_cast<int>(k); }
        }
        if (branch_k < 0) {
            // Integral solution.
            if (!have_inc || node.bound < inc_obj - 1e-12) {
                have_inc = true;
                inc_obj = node.bound;
                inc_primal = node.primal;
                for (std::size_t k = 0; k < bins.size(); ++k)
                    inc_primal[bins[k]] = std::round(inc_primal[bins[k]]);
            }
            continue;
        }
        for (int val = 0; val <= 1; ++val) {
            detail::BnbNode child;
            child.fix = node.fix;
            child.fix[branch_k] = static_cast<std::int8_t>(val);
            LpSolution sol;
            solve_node(child.fix, sol);
            if (++out.nodes > opt.node_limit) throw NodeLimit("branch-and-bound node limit exceeded");
            if (sol.status == LpStatus::infeasible) continue;
            if (sol.status == LpStatus::unbounded) { out.status = MipStatus::unbounded; return out; }
            child.bound = sgn * sol.objective;
            if (have_inc && child.bound >= inc_obj - gap_abs()) {
                pruned_min = std::min(pruned_min, child.bound);
                continue;
            }
            child.id = next_id++;
            child.primal = std::move(sol.primal);
            open.push(std::move(child));
        }
    }

    if (!have_inc) { out.status = MipStatus::infeasible; return out; }
    double lower = std::min(inc_obj, pruned_min);
    out.status = MipStatus::optimal;
    out.objective = sgn * inc_obj;
    out.incumbent_bound = sgn * lower;
    out.primal = std::move(inc_primal);
    return out;
}

}  // namespace drsddp

#endif  // DRSDDP_MIP_HPP_
