#ifndef DRSDDP_SDDP_HPP_
#define DRSDDP_SDDP_HPP_

// Sampling-based driver: forward simulation of the cut-augmented subproblems,
// backward refinement with per-scenario cuts aggregated per variant, and
// bound tracking until a stopping condition fires. Backward per-scenario
// solves alternate between strengthened Benders and integer optimality cuts
// by iteration parity, so a tight cut appears at least every second visit.

#include <chrono>
#include <future>
#include <string>
#include <vector>

#include "drsddp/ambiguity.hpp"
#include "drsddp/approx.hpp"
#include "drsddp/ddwass.hpp"
#include "drsddp/exact_dp.hpp"
#include "drsddp/mip.hpp"
#include "drsddp/model.hpp"
#include "drsddp/rng.hpp"
#include "drsddp/subproblem.hpp"

namespace drsddp {

enum class Variant : std::uint8_t { drr_c, drr_r, dro_c, dro_r, neutral };

inline const char* variant_name(Variant v) {
    switch (v) {
        case Variant::drr_c: return "drr-c";
        case Variant::drr_r: return "drr-r";
        case Variant::dro_c: return "dro-c";
        case Variant::dro_r: return "dro-r";
        case Variant::neutral: return "neutral";
    }
    return "?";
}

inline Variant variant_from_name(const std::string& s) {
    if (s == "drr-c" || s == "drr_c") return Variant::drr_c;
    if (s == "drr-r" || s == "drr_r") return Variant::drr_r;
    if (s == "dro-c" || s == "dro_c") return Variant::dro_c;
    if (s == "dro-r" || s == "dro_r") return Variant::dro_r;
    if (s == "neutral") return Variant::neutral;
    throw ModelError("unrecognized variant: " + s);
}

inline ApproxMode variant_mode(Variant v) {
    switch (v) {
        case Variant::drr_r: return ApproxMode::mccormick;
        case Variant::dro_r: return ApproxMode::wasserstein_dual;
        default: return ApproxMode::epigraph;
    }
}

inline RiskPosture variant_posture(Variant v) {
    switch (v) {
        case Variant::drr_c:
        case Variant::drr_r: return RiskPosture::drr;
        case Variant::dro_c:
        case Variant::dro_r: return RiskPosture::dro;
        default: return RiskPosture::neutral;
    }
}

struct SolverConfig {
    Variant variant = Variant::neutral;
    std::uint64_t seed = 1;
    long max_iters = 5000;
    double time_limit_secs = kInf;
    int stall_iters = 100;
    int paths_per_iter = 1;
    double tol_mip = kTolMip;
    double stall_tol = 1e-6;
    int threads = 1;

    void validate() const {
        if (stall_iters < 1) throw ModelError("stall_iters must be at least 1");
        if (paths_per_iter < 1) throw ModelError("paths_per_iter must be at least 1");
    }
};

enum class StopReason : std::uint8_t { converged_stall, iter_limit, time_limit };

inline const char* stop_reason_name(StopReason s) {
    switch (s) {
        case StopReason::converged_stall: return "converged_stall";
        case StopReason::iter_limit: return "iter_limit";
        case StopReason::time_limit: return "time_limit";
    }
    return "?";
}

struct IterRecord {
    long iter = 0;
    std::vector<int> path;
    double fwd_obj = 0.0;
    double lb = 0.0;
    double time_s = 0.0;
    int cuts_added = 0;
};

struct SolveLog {
    std::vector<IterRecord> records;
    StopReason status = StopReason::iter_limit;
    double final_lb = 0.0;
    double wall_secs = 0.0;
};

struct Policy {
    MultistageModel model;
    Variant variant = Variant::neutral;
    ApproxMode mode = ApproxMode::epigraph;
    std::vector<std::vector<Cut>> cuts;  // index t: cuts hosted by stage t (1..T-1)
    std::vector<double> floors;          // valid lower bounds M_t, index 1..T+1

    double phi_floor(int t) const { return floors[t + 1]; }
    const std::vector<Cut>& stage_cuts(int t) const { return cuts[t]; }

    long total_cuts() const {
        long n = 0;
        for (const auto& c : cuts) n += static_cast<long>(c.size());
        return n;
    }
};

inline Policy make_policy(const MultistageModel& m, Variant v) {
    m.validate();
    Policy pol;
    pol.model = m;
    pol.variant = v;
    pol.mode = variant_mode(v);
    pol.cuts.assign(m.horizon + 1, {});
    pol.floors = compute_value_floors(m);
    const bool dd = m.ambiguity.kind == AmbiguitySpec::Kind::wasserstein_dd_continuous;
    if (dd && v != Variant::drr_c && v != Variant::neutral)
        throw ModelError("decision-dependent ambiguity supports the drr-c and neutral variants");
    return pol;
}

// One outcome index per stage; the first stage is always its singleton.
inline std::vector<int> sample_path(Rng& rng, const MultistageModel& m) {
    std::vector<int> path(m.horizon, 0);
    for (int t = 2; t <= m.horizon; ++t)
        path[t - 1] = rng.categorical(m.support(t).reference_probs);
    return path;
}

struct Trajectory {
    std::vector<std::vector<double>> states;  // x_t, t = 1..T
    std::vector<double> stage_costs;          // f_t contributions along the path
    double total_cost = 0.0;
    double first_stage_value = 0.0;  // stage-1 objective including phi
};

namespace detail {

inline std::vector<double> rounded_state(const MipSolution& s, const SubproblemLayout& lay) {
    std::vector<double> x;
    x.reserve(lay.x_cols.size());
    for (int c : lay.x_cols) x.push_back(std::round(s.primal[c]));
    return x;
}

}  // namespace detail

// Runs the policy forward along `path`. When `data_override` is nonempty it
// supplies each stage's data instead of the sampled support entry (used for
// out-of-sample simulation with fresh draws); cut collections are untouched.
inline Trajectory forward_pass(const Policy& pol, const std::vector<int>& path,
                               const MipOptions& mopt = {},
                               const std::vector<StageData>* data_override = nullptr) {
    const MultistageModel& m = pol.model;
    Trajectory traj;
    std::vector<double> x_prev = m.x0;
    for (int t = 1; t <= m.horizon; ++t) {
        SubproblemLayout lay;
        const StageData* ov = data_override ? &(*data_override)[t - 1] : nullptr;
        MipProblem sub = build_subproblem(m, t, x_prev, ov ? 0 : path[t - 1], pol.stage_cuts(t),
                                          pol.mode, pol.phi_floor(t), &lay, true, ov);
        MipSolution sol = solve_mip(sub, mopt);
        if (sol.status != MipStatus::optimal)
            throw ModelError("stage subproblem not solvable; recourse assumption violated");
        std::vector<double> x = detail::rounded_state(sol, lay);
        const StageData& d = ov ? *ov : m.stage(t).data[path[t - 1]];
        double cost = dot(d.cost_x, x);
        for (std::size_t j = 0; j < lay.y_cols.size(); ++j)
            cost += d.cost_y[j] * sol.primal[lay.y_cols[j]];
        traj.states.push_back(x);
        traj.stage_costs.push_back(cost);
        traj.total_cost += cost;
        if (t == 1) traj.first_stage_value = sol.objective;
        x_prev = std::move(x);
    }
    return traj;
}

namespace detail {

// Per-scenario cut for the stage-t value function at x_hat, hosted by stage
// t-1. Odd iterations: strengthened Benders; even: integer optimality.
inline Cut scenario_cut(const Policy& pol, int t, const std::vector<double>& x_hat, int scenario,
                        long iteration, const MipOptions& mopt) {
    const MultistageModel& m = pol.model;
    if (iteration % 2 == 1) {
        return strengthened_benders_cut(m, t, x_hat, scenario, pol.stage_cuts(t), pol.mode,
                                        pol.phi_floor(t), mopt, iteration);
    }
    MipProblem sub =
        build_subproblem(m, t, x_hat, scenario, pol.stage_cuts(t), pol.mode, pol.phi_floor(t));
    MipSolution sol = solve_mip(sub, mopt);
    if (sol.status != MipStatus::optimal)
        throw ModelError("stage subproblem not solvable; recourse assumption violated");
    double q_hat = std::max(sol.incumbent_bound, pol.floors[t]);
    return integer_optimality_cut(q_hat, x_hat, pol.floors[t], t - 1, scenario, iteration);
}

}  // namespace detail

// Backward refinement along the trajectory; returns cuts appended.
inline int backward_pass(Policy& pol, const Trajectory& traj, long iteration,
                         const MipOptions& mopt = {}, int threads = 1) {
    const MultistageModel& m = pol.model;
    const bool dd = m.ambiguity.kind == AmbiguitySpec::Kind::wasserstein_dd_continuous &&
                    pol.variant == Variant::drr_c;
    int added = 0;
    for (int t = m.horizon; t >= 2; --t) {
        const std::vector<double>& x_hat = traj.states[t - 2];
        if (dd) {
            std::vector<Cut> next;
            for (const Cut& c : pol.stage_cuts(t))
                if (c.aggregate()) next.push_back(c);
            if (next.empty()) {
                Cut zero;
                zero.stage = t;
                zero.scenario = -1;
                zero.alpha.assign(m.stage(t).dim_x, 0.0);
                zero.beta = std::min(0.0, pol.floors[t + 1]);
                next.push_back(zero);
            }
            pol.cuts[t - 1].push_back(dd_cut_generate(m, t, x_hat, next, iteration));
            ++added;
            continue;
        }
        const int n = m.num_scenarios(t);
        std::vector<Cut> scen(n);
        if (threads > 1 && n > 1) {
            std::vector<std::future<Cut>> futs;
            futs.reserve(n);
            for (int i = 0; i < n; ++i)
                futs.push_back(std::async(std::launch::async, [&, i] {
                    return detail::scenario_cut(pol, t, x_hat, i, iteration, mopt);
                }));
            for (int i = 0; i < n; ++i) scen[i] = futs[i].get();
        } else {
            for (int i = 0; i < n; ++i)
                scen[i] = detail::scenario_cut(pol, t, x_hat, i, iteration, mopt);
        }
        const ScenarioSupport& sup = m.support(t);
        const double eps = m.ambiguity.singleton() ? 0.0 : m.ambiguity.epsilon;
        switch (pol.variant) {
            case Variant::neutral:
                pol.cuts[t - 1].push_back(expectation_cut(scen, sup, iteration));
                ++added;
                break;
            case Variant::dro_c:
                pol.cuts[t - 1].push_back(dro_separation_cut(scen, x_hat, sup, eps, iteration));
                ++added;
                break;
            case Variant::drr_c:
                pol.cuts[t - 1].push_back(drr_cut_coefficients(scen, x_hat, sup, eps, iteration));
                ++added;
                break;
            case Variant::drr_r:
            case Variant::dro_r:
                for (Cut& c : scen) pol.cuts[t - 1].push_back(std::move(c));
                added += n;
                break;
        }
    }
    return added;
}

// Stage-1 bound under the current approximation.
inline double stage_one_bound(const Policy& pol, const MipOptions& mopt = {}) {
    MipProblem sub = build_subproblem(pol.model, 1, pol.model.x0, 0, pol.stage_cuts(1), pol.mode,
                                      pol.phi_floor(1));
    MipSolution sol = solve_mip(sub, mopt);
    if (sol.status != MipStatus::optimal)
        throw ModelError("first-stage subproblem not solvable");
    return sol.objective;
}

inline std::pair<Policy, SolveLog> run(const MultistageModel& m, const SolverConfig& cfg) {
    cfg.validate();
    Policy pol = make_policy(m, cfg.variant);
    SolveLog log;
    Rng rng(cfg.seed);
    MipOptions mopt;
    mopt.tol_mip = cfg.tol_mip;

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
        rec.cuts_added = 0;
        for (int p = 0; p < cfg.paths_per_iter; ++p) {
            rec.path = sample_path(rng, m);
            Trajectory traj = forward_pass(pol, rec.path, mopt);
            rec.fwd_obj = traj.total_cost;
            rec.cuts_added += backward_pass(pol, traj, l, mopt, cfg.threads);
        }
        rec.lb = stage_one_bound(pol, mopt);
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

// Realized objective of the policy along one support path (no cut changes).
inline double evaluate_policy_path(const Policy& pol, const std::vector<int>& path,
                                   const MipOptions& mopt = {}) {
    return forward_pass(pol, path, mopt).total_cost;
}

// Same, but with explicit per-stage data (fresh out-of-sample draws).
inline double evaluate_policy_on_data(const Policy& pol, const std::vector<StageData>& data,
                                      const MipOptions& mopt = {}) {
    std::vector<int> path(pol.model.horizon, 0);
    return forward_pass(pol, path, mopt, &data).total_cost;
}

}  // namespace drsddp

#endif  // DRSDDP_SDDP_HPP_
