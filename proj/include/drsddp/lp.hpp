#ifndef DRSDDP_LP_HPP_
#define DRSDDP_LP_HPP_

// Dense bounded-variable primal simplex with dual extraction. Every stage
// subproblem, separation problem, and reformulation in this library is solved
// through this one entry point, so correctness beats speed; problems stay at
// desk scale (a few thousand columns).

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "drsddp/common.hpp"

namespace drsddp {

enum class Relation : std::uint8_t { le, eq, ge };
enum class Sense : std::uint8_t { minimize, maximize };
enum class LpStatus : std::uint8_t { optimal, infeasible, unbounded };

struct LpRow {
    std::vector<std::pair<int, double>> coefs;  // sparse (column, coefficient)
    Relation rel = Relation::le;
    double rhs = 0.0;
};

struct LpProblem {
    Sense sense = Sense::minimize;
    std::vector<double> cost;
    std::vector<double> lower, upper;
    std::vector<LpRow> rows;

    int num_cols() const { return static_cast<int>(cost.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_column(double c, double lo, double up) {
        if (lo > up) throw BadBound("add_column: lower bound exceeds upper bound");
        cost.push_back(c);
        lower.push_back(lo);
        upper.push_back(up);
        return num_cols() - 1;
    }

    int add_row(std::vector<std::pair<int, double>> coefs, Relation rel, double rhs) {
        for (const auto& [col, coef] : coefs) {
            (void)coef;
            if (col < 0 || col >= num_cols())
                throw DimensionMismatch("add_row: coefficient references undeclared column");
        }
        rows.push_back(LpRow{std::move(coefs), rel, rhs});
        return num_rows() - 1;
    }

    void validate() const {
        for (int j = 0; j < num_cols(); ++j)
            if (lower[j] > upper[j]) throw BadBound("column bound inverted");
        for (const auto& row : rows)
            for (const auto& [col, coef] : row.coefs) {
                (void)coef;
                if (col < 0 || col >= num_cols())
                    throw DimensionMismatch("row references undeclared column");
            }
    }
};

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    std::vector<double> primal;
    std::vector<double> duals;          // one multiplier per row
    std::vector<double> reduced_costs;  // one per structural column
    long iterations = 0;

    // Dual objective under the bounded-variable dual: b'y plus reduced-cost
    // contributions of columns pinned at finite bounds. Evaluated in the
    // minimization orientation and flipped back for max problems.
    double dual_objective(const LpProblem& p) const {
        const double sgn = (p.sense == Sense::maximize) ? -1.0 : 1.0;
        double v = 0.0;
        for (int r = 0; r < p.num_rows(); ++r) v += sgn * duals[r] * p.rows[r].rhs;
        for (int j = 0; j < p.num_cols(); ++j) {
            double d = sgn * reduced_costs[j];
            if (d > 0 && p.lower[j] > -kInf) v += d * p.lower[j];
            else if (d < 0 && p.upper[j] < kInf) v += d * p.upper[j];
        }
        return sgn * v;
    }
};

struct SimplexOptions {
    double tol_feas = kTolFeas;
    double tol_pivot = kTolPivot;
    double tol_cost = 1e-9;    // reduced-cost optimality threshold
    long max_iterations = 200000;
    int refactor_every = 100;
};

namespace detail {

// Two-phase simplex over the equality form [A | I_slack | I_artificial].
// Phase 1 minimizes the artificial mass from an identity starting basis; the
// same pivot loop then continues on the true costs.
class Simplex {
  public:
    Simplex(const LpProblem& p, const SimplexOptions& opt) : p_(p), opt_(opt) {
        m_ = p.num_rows();
        n_ = p.num_cols();
        total_ = n_ + 2 * m_;
        build();
    }

    LpSolution solve() {
        LpSolution out;
        if (!phase1()) {
            out.status = LpStatus::infeasible;
            out.iterations = iters_;
            return out;
        }
        // Freeze artificials and switch to the true objective.
        for (int k = 0; k < m_; ++k) {
            int j = n_ + m_ + k;
            lb_[j] = ub_[j] = 0.0;
            cost_[j] = 0.0;
        }
        for (int j = 0; j < n_; ++j) cost_[j] = sign_ * p_.cost[j];
        for (int j = n_; j < n_ + m_; ++j) cost_[j] = 0.0;
        const bool bounded = iterate();
        out.iterations = iters_;
        if (!bounded) {
            out.status = LpStatus::unbounded;
            return out;
        }
        extract(out);
        return out;
    }

  private:
    enum class VStat : std::uint8_t { basic, at_lower, at_upper, free_zero };

    const LpProblem& p_;
    SimplexOptions opt_;
    int m_ = 0, n_ = 0, total_ = 0;
    double sign_ = 1.0;  // +1 minimize, -1 maximize (costs pre-negated)

    std::vector<std::vector<std::pair<int, double>>> cols_;  // column-wise matrix
    std::vector<double> cost_, lb_, ub_, rhs_;
    std::vector<int> basis_;        // column occupying each basis slot
    std::vector<VStat> vstat_;
    std::vector<double> xb_;        // values of basic variables
    std::vector<double> binv_;      // dense m x m basis inverse, row-major
    long iters_ = 0;
    long stall_ = 0;
    bool bland_ = false;
    double last_obj_ = kInf;

    double& binv_at(int i, int j) { return binv_[static_cast<std::size_t>(i) * m_ + j]; }
    double binv_at(int i, int j) const { return binv_[static_cast<std::size_t>(i) * m_ + j]; }

    void build() {
        sign_ = (p_.sense == Sense::maximize) ? -1.0 : 1.0;
        cols_.assign(total_, {});
        cost_.assign(total_, 0.0);
        lb_.assign(total_, 0.0);
        ub_.assign(total_, 0.0);
        rhs_.resize(m_);
        for (int j = 0; j < n_; ++j) {
            lb_[j] = p_.lower[j];
            ub_[j] = p_.upper[j];
        }
        for (int r = 0; r < m_; ++r) {
            rhs_[r] = p_.rows[r].rhs;
            for (const auto& [col, coef] : p_.rows[r].coefs)
                if (coef != 0.0) cols_[col].push_back({r, coef});
            int s = n_ + r;
            cols_[s].push_back({r, 1.0});
            switch (p_.rows[r].rel) {
                case Relation::le: lb_[s] = 0.0; ub_[s] = kInf; break;
                case Relation::ge: lb_[s] = -kInf; ub_[s] = 0.0; break;
                case Relation::eq: lb_[s] = 0.0; ub_[s] = 0.0; break;
            }
            cols_[n_ + m_ + r].push_back({r, 1.0});
        }
    }

    double nonbasic_value(int j) const {
        switch (vstat_[j]) {
            case VStat::at_lower: return lb_[j];
            case VStat::at_upper: return ub_[j];
            default: return 0.0;
        }
    }

    // Start from the all-artificial identity basis; artificial bounds and
    // phase-1 costs are oriented to absorb whatever violation remains.
    bool phase1() {
        vstat_.assign(total_, VStat::at_lower);
        for (int j = 0; j < n_; ++j) {
            if (lb_[j] > -kInf) vstat_[j] = VStat::at_lower;
            else if (ub_[j] < kInf) vstat_[j] = VStat::at_upper;
            else vstat_[j] = VStat::free_zero;
        }
        for (int r = 0; r < m_; ++r) {
            int s = n_ + r;
            vstat_[s] = (p_.rows[r].rel == Relation::ge) ? VStat::at_upper : VStat::at_lower;
        }
        basis_.resize(m_);
        xb_.assign(m_, 0.0);
        binv_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            basis_[r] = n_ + m_ + r;
            binv_at(r, r) = 1.0;
        }
        std::vector<double> resid(rhs_);
        for (int j = 0; j < n_ + m_; ++j) {
            double v = nonbasic_value(j);
            if (v != 0.0)
                for (const auto& [r, coef] : cols_[j]) resid[r] -= coef * v;
        }
        double infeas = 0.0;
        for (int r = 0; r < m_; ++r) {
            int a = n_ + m_ + r;
            xb_[r] = resid[r];
            vstat_[a] = VStat::basic;
            if (resid[r] >= 0.0) {
                lb_[a] = 0.0; ub_[a] = kInf; cost_[a] = 1.0;
            } else {
                lb_[a] = -kInf; ub_[a] = 0.0; cost_[a] = -1.0;
            }
            infeas += std::fabs(resid[r]);
        }
        for (int j = 0; j < n_; ++j) cost_[j] = 0.0;
        for (int j = n_; j < n_ + m_; ++j) cost_[j] = 0.0;
        if (infeas <= opt_.tol_feas) return true;
        if (!iterate()) throw NumericalFailure("phase-1 objective reported unbounded");
        return current_objective() <= opt_.tol_feas * (1.0 + norm_rhs());
    }

    double norm_rhs() const {
        double s = 0.0;
        for (double v : rhs_) s = std::max(s, std::fabs(v));
        return s;
    }

    double current_objective() const {
        double obj = 0.0;
        for (int r = 0; r < m_; ++r) obj += cost_[basis_[r]] * xb_[r];
        for (int j = 0; j < total_; ++j)
            if (vstat_[j] != VStat::basic && cost_[j] != 0.0) obj += cost_[j] * nonbasic_value(j);
        return obj;
    }

    std::vector<double> dual_vector() const {
        std::vector<double> y(m_, 0.0);
        for (int r = 0; r < m_; ++r) {
            double cb = cost_[basis_[r]];
            if (cb == 0.0) continue;
            for (int c = 0; c < m_; ++c) y[c] += cb * binv_at(r, c);
        }
        return y;
    }

    double reduced_cost(int j, const std::vector<double>& y) const {
        double d = cost_[j];
        for (const auto& [r, coef] : cols_[j]) d -= y[r] * coef;
        return d;
    }

    // Main pivot loop; returns false iff an unbounded descent direction is hit.
    bool iterate() {
        bland_ = false;
        stall_ = 0;
        last_obj_ = current_objective();
        const long stall_limit = 5L * (m_ + n_);
        int since_refactor = 0;
        while (true) {
            if (++iters_ > opt_.max_iterations)
                throw NumericalFailure("simplex iteration cap exceeded");
            std::vector<double> y = dual_vector();
            int enter = -1;
            double best = 0.0;
            int dir = +1;
            for (int j = 0; j < total_; ++j) {
                if (vstat_[j] == VStat::basic) continue;
                if (lb_[j] == ub_[j] && vstat_[j] != VStat::free_zero) continue;  // fixed
                double d = reduced_cost(j, y);
                double viol = 0.0;
                int cand_dir = 0;
                if (vstat_[j] == VStat::at_lower || vstat_[j] == VStat::free_zero) {
                    if (d < -opt_.tol_cost) { viol = -d; cand_dir = +1; }
                    if (vstat_[j] == VStat::free_zero && d > opt_.tol_cost) { viol = d; cand_dir = -1; }
                } else if (vstat_[j] == VStat::at_upper) {
                    if (d > opt_.tol_cost) { viol = d; cand_dir = -1; }
                }
                if (cand_dir == 0) continue;
                if (bland_) { enter = j; dir = cand_dir; break; }
                if (viol > best + 1e-15) { best = viol; enter = j; dir = cand_dir; }
            }
            if (enter < 0) return true;  // optimal for current costs

            // Column update direction w = B^-1 a_enter.
            std::vector<double> w(m_, 0.0);
            for (const auto& [r, coef] : cols_[enter])
                for (int i = 0; i < m_; ++i) w[i] += binv_at(i, r) * coef;

            double limit = kInf;
            int leave = -1;       // basis slot
            int leave_to = 0;     // -1: leaves at lower, +1: leaves at upper
            double leave_piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                double wi = dir * w[i];
                int bj = basis_[i];
                if (wi > opt_.tol_pivot) {  // basic value decreases
                    if (lb_[bj] > -kInf) {
                        double step = (xb_[i] - lb_[bj]) / wi;
                        if (step < limit - 1e-12 ||
                            (step < limit + 1e-12 && std::fabs(w[i]) > std::fabs(leave_piv))) {
                            limit = std::max(step, 0.0); leave = i; leave_to = -1; leave_piv = w[i];
                        }
                    }
                } else if (wi < -opt_.tol_pivot) {  // basic value increases
                    if (ub_[bj] < kInf) {
                        double step = (ub_[bj] - xb_[i]) / (-wi);
                        if (step < limit - 1e-12 ||
                            (step < limit + 1e-12 && std::fabs(w[i]) > std::fabs(leave_piv))) {
                            limit = std::max(step, 0.0); leave = i; leave_to = +1; leave_piv = w[i];
                        }
                    }
                }
            }
            bool bound_flip = false;
            if (lb_[enter] > -kInf && ub_[enter] < kInf) {
                double range = ub_[enter] - lb_[enter];
                if (range < limit - 1e-12) { limit = range; bound_flip = true; }
            }
            if (limit == kInf) return false;  // unbounded ray

            // Apply the step.
            for (int i = 0; i < m_; ++i) xb_[i] -= dir * limit * w[i];
            if (bound_flip) {
                vstat_[enter] = (dir > 0) ? VStat::at_upper : VStat::at_lower;
            } else {
                int out_col = basis_[leave];
                vstat_[out_col] = (leave_to < 0) ? VStat::at_lower : VStat::at_upper;
                if (lb_[out_col] == -kInf && ub_[out_col] == kInf) vstat_[out_col] = VStat::free_zero;
                double enter_val = nonbasic_value(enter) + dir * limit;
                basis_[leave] = enter;
                vstat_[enter] = VStat::basic;
                xb_[leave] = enter_val;
                pivot_binv(leave, w);
                if (++since_refactor >= opt_.refactor_every) {
                    refactorize();
                    since_refactor = 0;
                }
            }
            double obj = current_objective();
            if (obj < last_obj_ - 1e-12) {
                last_obj_ = obj;
                stall_ = 0;
                bland_ = false;
            } else if (!bland_ && ++stall_ > stall_limit) {
                bland_ = true;  // anti-cycling fallback
            }
        }
    }

    void pivot_binv(int r, const std::vector<double>& w) {
        double piv = w[r];
        if (std::fabs(piv) < opt_.tol_pivot) throw NumericalFailure("pivot element vanished");
        for (int c = 0; c < m_; ++c) binv_at(r, c) /= piv;
        for (int i = 0; i < m_; ++i) {
            if (i == r || w[i] == 0.0) continue;
            double f = w[i];
            for (int c = 0; c < m_; ++c) binv_at(i, c) -= f * binv_at(r, c);
        }
    }

    // Rebuild B^-1 from scratch (Gauss-Jordan with partial pivoting) and
    // recompute basic values against the exact right-hand side.
    void refactorize() {
        std::vector<double> b(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int k = 0; k < m_; ++k)
            for (const auto& [r, coef] : cols_[basis_[k]]) b[static_cast<std::size_t>(r) * m_ + k] = coef;
        std::vector<double> inv(static_cast<std::size_t>(m_) * m_, 0.0);
        for (int i = 0; i < m_; ++i) inv[static_cast<std::size_t>(i) * m_ + i] = 1.0;
        for (int col = 0; col < m_; ++col) {
            int piv = -1;
            double best = 1e-11;
            for (int r = col; r < m_; ++r) {
                double v = std::fabs(b[static_cast<std::size_t>(r) * m_ + col]);
                if (v > best) { best = v; piv = r; }
            }
            if (piv < 0) throw NumericalFailure("singular basis during refactorization");
            if (piv != col) {
                for (int c = 0; c < m_; ++c) {
                    std::swap(b[static_cast<std::size_t>(piv) * m_ + c], b[static_cast<std::size_t>(col) * m_ + c]);
                    std::swap(inv[static_cast<std::size_t>(piv) * m_ + c], inv[static_cast<std::size_t>(col) * m_ + c]);
                }
            }
            double pv = b[static_cast<std::size_t>(col) * m_ + col];
            for (int c = 0; c < m_; ++c) {
                b[static_cast<std::size_t>(col) * m_ + c] /= pv;
                inv[static_cast<std::size_t>(col) * m_ + c] /= pv;
            }
            for (int r = 0; r < m_; ++r) {
                if (r == col) continue;
                double f = b[static_cast<std::size_t>(r) * m_ + col];
                if (f == 0.0) continue;
                for (int c = 0; c < m_; ++c) {
                    b[static_cast<std::size_t>(r) * m_ + c] -= f * b[static_cast<std::size_t>(col) * m_ + c];
                    inv[static_cast<std::size_t>(r) * m_ + c] -= f * inv[static_cast<std::size_t>(col) * m_ + c];
                }
            }
        }
        binv_ = std::move(inv);
        std::vector<double> resid(rhs_);
        for (int j = 0; j < total_; ++j) {
            if (vstat_[j] == VStat::basic) continue;
            double v = nonbasic_value(j);
            if (v != 0.0)
                for (const auto& [r, coef] : cols_[j]) resid[r] -= coef * v;
        }
        for (int i = 0; i < m_; ++i) {
            double s = 0.0;
            for (int r = 0; r < m_; ++r) s += binv_at(i, r) * resid[r];
            xb_[i] = s;
        }
    }

    void extract(LpSolution& out) {
        out.status = LpStatus::optimal;
        out.primal.assign(n_, 0.0);
        for (int j = 0; j < n_; ++j)
            if (vstat_[j] != VStat::basic) out.primal[j] = nonbasic_value(j);
        for (int r = 0; r < m_; ++r)
            if (basis_[r] < n_) out.primal[basis_[r]] = xb_[r];
        std::vector<double> y = dual_vector();
        out.duals.assign(m_, 0.0);
        out.reduced_costs.assign(n_, 0.0);
        for (int r = 0; r < m_; ++r) out.duals[r] = sign_ * y[r];
        for (int j = 0; j < n_; ++j) out.reduced_costs[j] = sign_ * reduced_cost(j, y);
        double obj = 0.0;
        for (int j = 0; j < n_; ++j) obj += p_.cost[j] * out.primal[j];
        out.objective = obj;
    }
};

}  // namespace detail

inline LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opt = {}) {
    p.validate();
    if (p.num_rows() == 0) {
        // Pure box problem: each column sits at its cheaper finite bound.
        LpSolution out;
        out.primal.assign(p.num_cols(), 0.0);
        out.reduced_costs.assign(p.num_cols(), 0.0);
        double sgn = (p.sense == Sense::maximize) ? -1.0 : 1.0;
        for (int j = 0; j < p.num_cols(); ++j) {
            double c = sgn * p.cost[j];
            double v;
            if (c > 0) v = p.lower[j];
            else if (c < 0) v = p.upper[j];
            else v = (p.lower[j] > -kInf) ? p.lower[j] : std::min(0.0, p.upper[j]);
            if (v == -kInf || v == kInf) { out.status = LpStatus::unbounded; return out; }
            out.primal[j] = v;
            out.objective += p.cost[j] * v;
            out.reduced_costs[j] = p.cost[j];
        }
        return out;
    }
    detail::Simplex s(p, opt);
    return s.solve();
}

}  // namespace drsddp

#endif  // DRSDDP_LP_HPP_
