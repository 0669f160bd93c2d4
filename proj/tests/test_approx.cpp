#include <catch2/catch_amalgamated.hpp>

#include "drsddp/approx.hpp"
#include "drsddp/exact_dp.hpp"
#include "drsddp/subproblem.hpp"
#include "toy_models.hpp"

using namespace drsddp;

namespace {

Cut scen_cut(int stage, int i, std::vector<double> a, double b) {
    Cut c;
    c.stage = stage;
    c.scenario = i;
    c.alpha = std::move(a);
    c.beta = b;
    return c;
}

// Evaluates a reformulation fragment at a fixed binary state by hosting it in
// a bare LP: min phi subject to the fragment rows only.
double fragment_value(ApproxMode mode, const std::vector<double>& x,
                      const std::vector<Cut>& cuts, const ScenarioSupport& s, double eps,
                      double floor) {
    LpProblem lp;
    std::vector<int> x_cols;
    for (double v : x) x_cols.push_back(lp.add_column(0.0, v, v));
    int phi = lp.add_column(1.0, -kInf, kInf);
    if (mode == ApproxMode::mccormick)
        add_drr_mccormick_fragment(lp, x_cols, phi, cuts, s, eps, floor);
    else
        add_dro_dual_fragment(lp, x_cols, phi, cuts, s, eps, floor);
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    return sol.objective;
}

double min_cut_value_floor(const std::vector<Cut>& cuts) {
    double lo = 0.0;
    for (const auto& c : cuts) {
        double v = c.beta;
        for (double a : c.alpha) v += std::min(0.0, a);
        lo = std::min(lo, v);
    }
    return lo - 1.0;
}

}  // namespace

TEST_CASE("benders cut has zero gradient without linking columns") {
    auto m = toys::two_stage_toy();
    // Stage 1 has no linking columns at all (dim_xprev = 0).
    Cut c = benders_cut(m, 1, {}, 0, {}, ApproxMode::epigraph, 0.0);
    REQUIRE(c.alpha.empty());
    REQUIRE_THAT(c.beta, Catch::Matchers::WithinAbs(0.0, 1e-9));  // relaxation optimum
}

TEST_CASE("benders cut reproduces the lp value at the expansion point") {
    Rng rng(42u);
    toys::RandomMsipParams prm;
    auto m = toys::random_msip(rng, prm);
    std::vector<double> x_hat = {1.0, 0.0};
    Cut c = benders_cut(m, 2, x_hat, 0, {}, ApproxMode::epigraph, 0.0);
    SubproblemLayout lay;
    MipProblem sub = build_subproblem(m, 2, x_hat, 0, {}, ApproxMode::epigraph, 0.0, &lay);
    auto lp = solve_lp(lp_relaxation(sub));
    REQUIRE_THAT(c.value_at(x_hat), Catch::Matchers::WithinAbs(lp.objective, 1e-7));
}

TEST_CASE("benders cut bounds the mip value at both binary points") {
    Rng rng(43u);
    toys::RandomMsipParams prm;
    prm.dim_x = 1;
    auto m = toys::random_msip(rng, prm);
    Cut c = benders_cut(m, 2, {0.0}, 0, {}, ApproxMode::epigraph, 0.0);
    for (double x : {0.0, 1.0}) {
        MipProblem sub = build_subproblem(m, 2, {x}, 0, {}, ApproxMode::epigraph, 0.0);
        auto s = solve_mip(sub);
        REQUIRE(c.value_at({x}) <= s.objective + 1e-6);
    }
}

TEST_CASE("integer optimality cut formula") {
    Cut c = integer_optimality_cut(10.0, {1.0, 0.0}, 0.0, 1, 0, 0);
    REQUIRE_THAT(c.alpha[0], Catch::Matchers::WithinAbs(10.0, 1e-12));
    REQUIRE_THAT(c.alpha[1], Catch::Matchers::WithinAbs(-10.0, 1e-12));
    REQUIRE_THAT(c.value_at({1.0, 0.0}), Catch::Matchers::WithinAbs(10.0, 1e-12));
    REQUIRE_THAT(c.value_at({0.0, 0.0}), Catch::Matchers::WithinAbs(0.0, 1e-12));
    // q_hat == L degenerates to the constant cut.
    Cut flat = integer_optimality_cut(3.0, {1.0}, 3.0, 1, 0, 0);
    REQUIRE_THAT(flat.value_at({0.0}), Catch::Matchers::WithinAbs(3.0, 1e-12));
    REQUIRE_THAT(flat.value_at({1.0}), Catch::Matchers::WithinAbs(3.0, 1e-12));
    REQUIRE_THROWS_AS(integer_optimality_cut(1.0, {0.0}, 2.0, 1, 0, 0), BadBound);
}

TEST_CASE("integer optimality cut valid and tight on random stage values") {
    Rng rng(44u);
    toys::RandomMsipParams prm;
    prm.dim_x = 3;
    auto m = toys::random_msip(rng, prm);
    auto floors = compute_value_floors(m);
    MipOptions mo;
    mo.tol_mip = 1e-7;
    // True stage-2 values at every binary state.
    std::vector<double> truth(8);
    for (unsigned long mask = 0; mask < 8; ++mask) {
        std::vector<double> x(3);
        for (int j = 0; j < 3; ++j) x[j] = (mask >> j) & 1ul ? 1.0 : 0.0;
        auto s = solve_mip(build_subproblem(m, 2, x, 0, {}, ApproxMode::epigraph, 0.0), mo);
        truth[mask] = s.objective;
    }
    for (unsigned long hat = 0; hat < 8; ++hat) {
        std::vector<double> x_hat(3);
        for (int j = 0; j < 3; ++j) x_hat[j] = (hat >> j) & 1ul ? 1.0 : 0.0;
        Cut c = integer_optimality_cut(truth[hat], x_hat, floors[2], 1, 0, 0);
        for (unsigned long mask = 0; mask < 8; ++mask) {
            std::vector<double> x(3);
            for (int j = 0; j < 3; ++j) x[j] = (mask >> j) & 1ul ? 1.0 : 0.0;
            REQUIRE(c.value_at(x) <= truth[mask] + 1e-6);
        }
        REQUIRE_THAT(c.value_at(x_hat), Catch::Matchers::WithinAbs(truth[hat], 1e-9));
    }
}

TEST_CASE("strengthened benders dominates the plain intercept") {
    Rng rng(45u);
    int dominated = 0;
    for (int trial = 0; trial < 50; ++trial) {
        toys::RandomMsipParams prm;
        prm.dim_x = rng.uniform_int(1, 3);
        auto m = toys::random_msip(rng, prm);
        // Add a cheap binary local that covers two units of the first row, so
        // the LP relaxation splits it and an integrality gap exists.
        auto& st = m.stages[1];
        st.dim_y += 1;
        st.y_binary.push_back(true);
        st.y_lower.push_back(0.0);
        st.y_upper.push_back(1.0);
        for (auto& d : st.data) {
            d.cost_y.push_back(1.5);
            for (std::size_t r = 0; r < d.rows.size(); ++r)
                d.rows[r].coef_y.push_back(r == 0 ? 2.0 : 0.0);
        }
        std::vector<double> x_hat(m.stage(2).dim_xprev, 0.0);
        for (double& v : x_hat) v = rng.uniform01() < 0.5 ? 0.0 : 1.0;
        Cut plain = benders_cut(m, 2, x_hat, 0, {}, ApproxMode::epigraph, 0.0);
        Cut strong = strengthened_benders_cut(m, 2, x_hat, 0, {}, ApproxMode::epigraph, 0.0);
        REQUIRE(strong.beta >= plain.beta - 1e-7);
        if (strong.beta > plain.beta + 1e-7) ++dominated;
        REQUIRE(strong.alpha == plain.alpha);
        // Validity at all binary states.
        int dxp = m.stage(2).dim_xprev;
        MipOptions mo;
        mo.tol_mip = 1e-7;
        for (unsigned long mask = 0; mask < (1ul << dxp); ++mask) {
            std::vector<double> x(dxp);
            for (int j = 0; j < dxp; ++j) x[j] = (mask >> j) & 1ul ? 1.0 : 0.0;
            auto s = solve_mip(build_subproblem(m, 2, x, 0, {}, ApproxMode::epigraph, 0.0), mo);
            REQUIRE(strong.value_at(x) <= s.objective + 1e-6);
        }
    }
    (void)dominated;  // domination is weak; strictness depends on the draw
}

TEST_CASE("dro separation cut weights and validity") {
    auto s = toys::two_point_support(0.0, 1.0);
    std::vector<Cut> cuts = {scen_cut(1, 0, {0.0}, 1.0), scen_cut(1, 1, {0.0}, 2.0)};
    SECTION("singleton gives the expectation") {
        Cut c = dro_separation_cut(cuts, {0.0}, s, 0.0);
        REQUIRE_THAT(c.beta, Catch::Matchers::WithinAbs(1.5, 1e-9));
    }
    SECTION("ball of 0.2 puts 0.7 on the worse scenario") {
        Cut c = dro_separation_cut(cuts, {0.0}, s, 0.2);
        REQUIRE_THAT(c.beta, Catch::Matchers::WithinAbs(1.7, 1e-7));
    }
}

TEST_CASE("dro separation cut under-approximates the worst case everywhere") {
    Rng rng(46u);
    for (int trial = 0; trial < 40; ++trial) {
        int n = rng.uniform_int(2, 4);
        int dx = rng.uniform_int(1, 5);
        ScenarioSupport s;
        for (int i = 0; i < n; ++i) s.realizations.push_back({rng.uniform(0.0, 3.0)});
        s.reference_probs.assign(n, 1.0 / n);
        double eps = rng.uniform(0.0, 1.0);
        std::vector<Cut> cuts;
        for (int i = 0; i < n; ++i) {
            std::vector<double> a(dx);
            for (double& v : a) v = rng.uniform(-3.0, 3.0);
            cuts.push_back(scen_cut(1, i, std::move(a), rng.uniform(-1.0, 1.0)));
        }
        std::vector<double> x_hat(dx);
        for (double& v : x_hat) v = rng.uniform01() < 0.5 ? 0.0 : 1.0;
        Cut agg = dro_separation_cut(cuts, x_hat, s, eps);
        std::vector<double> vals(n);
        for (unsigned long mask = 0; mask < (1ul << dx); ++mask) {
            std::vector<double> x(dx);
            for (int j = 0; j < dx; ++j) x[j] = (mask >> j) & 1ul ? 1.0 : 0.0;
            for (int i = 0; i < n; ++i) vals[i] = cuts[i].value_at(x);
            double worst = worst_case_distribution(vals, s, eps).second;
            REQUIRE(agg.value_at(x) <= worst + 1e-7);
        }
        // Tight at the expansion point.
        for (int i = 0; i < n; ++i) vals[i] = cuts[i].value_at(x_hat);
        REQUIRE_THAT(agg.value_at(x_hat),
                     Catch::Matchers::WithinAbs(worst_case_distribution(vals, s, eps).second, 1e-7));
    }
}

TEST_CASE("wasserstein dual fragment examples") {
    auto s = toys::two_point_support(0.0, 1.0);
    std::vector<Cut> cuts = {scen_cut(1, 0, {1.0, 0.0}, 0.5), scen_cut(1, 1, {-1.0, 2.0}, 1.5)};
    double floor = min_cut_value_floor(cuts);
    SECTION("zero radius reduces to the reference expectation of per-scenario epigraphs") {
        for (unsigned long mask = 0; mask < 4; ++mask) {
            std::vector<double> x = {(double)(mask & 1ul), (double)((mask >> 1) & 1ul)};
            double got = fragment_value(ApproxMode::wasserstein_dual, x, cuts, s, 0.0, floor);
            double want = 0.5 * cuts[0].value_at(x) + 0.5 * cuts[1].value_at(x);
            REQUIRE_THAT(got, Catch::Matchers::WithinAbs(want, 1e-7));
        }
    }
    SECTION("dual value equals the separation value at the expansion point") {
        double eps = 0.2;
        for (unsigned long mask = 0; mask < 4; ++mask) {
            std::vector<double> x = {(double)(mask & 1ul), (double)((mask >> 1) & 1ul)};
            std::vector<double> vals = {cuts[0].value_at(x), cuts[1].value_at(x)};
            double sep = worst_case_distribution(vals, s, eps).second;
            double dual = fragment_value(ApproxMode::wasserstein_dual, x, cuts, s, eps, floor);
            REQUIRE_THAT(dual, Catch::Matchers::WithinAbs(sep, 1e-7));
        }
    }
    SECTION("single scenario support") {
        ScenarioSupport one;
        one.realizations = {{0.0}};
        one.reference_probs = {1.0};
        std::vector<Cut> c1 = {scen_cut(1, 0, {2.0}, -0.5)};
        double got = fragment_value(ApproxMode::wasserstein_dual, {1.0}, c1, one, 0.7,
                                    min_cut_value_floor(c1));
        REQUIRE_THAT(got, Catch::Matchers::WithinAbs(1.5, 1e-7));
    }
}

TEST_CASE("mccormick fragment equals the polytope minimum at binary states") {
    Rng rng(47u);
    for (int trial = 0; trial < 40; ++trial) {
        int n = rng.uniform_int(2, 3);
        int dx = rng.uniform_int(1, 4);
        ScenarioSupport s;
        for (int i = 0; i < n; ++i) s.realizations.push_back({rng.uniform(0.0, 2.0)});
        s.reference_probs.assign(n, 1.0 / n);
        double eps = rng.uniform(0.0, 1.2);
        std::vector<Cut> cuts;
        for (int i = 0; i < n; ++i) {
            std::vector<double> a(dx);
            for (double& v : a) v = rng.uniform(-3.0, 3.0);
            cuts.push_back(scen_cut(1, i, std::move(a), rng.uniform(-1.0, 1.0)));
        }
        double floor = min_cut_value_floor(cuts);
        std::vector<double> vals(n);
        for (unsigned long mask = 0; mask < (1ul << dx); ++mask) {
            std::vector<double> x(dx);
            for (int j = 0; j < dx; ++j) x[j] = (mask >> j) & 1ul ? 1.0 : 0.0;
            for (int i = 0; i < n; ++i) vals[i] = cuts[i].value_at(x);
            double direct = best_case_distribution(vals, s, eps).second;
            double reform = fragment_value(ApproxMode::mccormick, x, cuts, s, eps, floor);
            REQUIRE_THAT(reform, Catch::Matchers::WithinAbs(direct, 1e-7));
        }
    }
}

TEST_CASE("mccormick fragment with constant cuts ignores the state") {
    auto s = toys::two_point_support(0.0, 1.0);
    std::vector<Cut> cuts = {scen_cut(1, 0, {0.0}, 2.0), scen_cut(1, 1, {0.0}, 5.0)};
    double floor = min_cut_value_floor(cuts);
    double v0 = fragment_value(ApproxMode::mccormick, {0.0}, cuts, s, 0.4, floor);
    double v1 = fragment_value(ApproxMode::mccormick, {1.0}, cuts, s, 0.4, floor);
    REQUIRE_THAT(v0, Catch::Matchers::WithinAbs(v1, 1e-8));
    // min over the ball of 2 p1 + 5 p2 with p1 in [0.1, 0.9]: p = (0.9, 0.1).
    REQUIRE_THAT(v0, Catch::Matchers::WithinAbs(2.0 * 0.9 + 5.0 * 0.1, 1e-7));
}
