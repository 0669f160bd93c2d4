#include <catch2/catch_amalgamated.hpp>

#include "drsddp/lp.hpp"
#include "drsddp/rng.hpp"
#include "test_util.hpp"

using namespace drsddp;

namespace {

void check_optimal_certificates(const LpProblem& p, const LpSolution& s) {
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE(testutil::feasible_point(p, s.primal, 1e-6));
    double gap = std::fabs(s.objective - s.dual_objective(p));
    REQUIRE(gap <= kTolGap * (1.0 + std::fabs(s.objective)));
    // Complementary slackness on rows.
    for (int r = 0; r < p.num_rows(); ++r) {
        double lhs = 0.0;
        for (auto [c, v] : p.rows[r].coefs) lhs += v * s.primal[c];
        double slack = lhs - p.rows[r].rhs;
        REQUIRE(std::fabs(slack * s.duals[r]) <= 1e-5 * (1.0 + std::fabs(s.objective)));
    }
}

LpProblem random_lp(Rng& rng, int n, int m, bool ensure_bounded = true) {
    LpProblem p;
    for (int j = 0; j < n; ++j) {
        double lo = rng.uniform(-2.0, 0.0);
        double hi = lo + rng.uniform(0.5, 3.0);
        if (!ensure_bounded && rng.uniform01() < 0.2) hi = kInf;
        p.add_column(rng.uniform(-3.0, 3.0), lo, hi);
    }
    for (int r = 0; r < m; ++r) {
        std::vector<std::pair<int, double>> coefs;
        for (int j = 0; j < n; ++j)
            if (rng.uniform01() < 0.7) coefs.push_back({j, rng.uniform(-2.0, 2.0)});
        if (coefs.empty()) coefs.push_back({0, 1.0});
        Relation rel = rng.uniform01() < 0.5 ? Relation::le : Relation::ge;
        p.add_row(coefs, rel, rng.uniform(-2.0, 2.0));
    }
    return p;
}

}  // namespace

TEST_CASE("single constraint lp") {
    LpProblem p;
    p.add_column(1.0, 0.0, 10.0);
    p.add_row({{0, 1.0}}, Relation::ge, 3.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE_THAT(s.objective, Catch::Matchers::WithinAbs(3.0, 1e-9));
    REQUIRE_THAT(s.duals[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
    check_optimal_certificates(p, s);
}

TEST_CASE("contradictory bounds infeasible") {
    LpProblem p;
    p.add_column(0.0, 0.0, kInf);
    p.add_row({{0, 1.0}}, Relation::ge, 1.0);
    p.add_row({{0, 1.0}}, Relation::le, 0.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::infeasible);
}

TEST_CASE("two variable knapsack face") {
    LpProblem p;
    p.add_column(-1.0, 0.0, 1.0);
    p.add_column(-1.0, 0.0, 1.0);
    p.add_row({{0, 1.0}, {1, 1.0}}, Relation::le, 1.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE_THAT(s.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
    auto oracle = testutil::enumerate_vertices_optimum(p);
    REQUIRE(oracle.has_value());
    REQUIRE_THAT(*oracle, Catch::Matchers::WithinAbs(s.objective, 1e-8));
    check_optimal_certificates(p, s);
}

TEST_CASE("unbounded detection") {
    LpProblem p;
    p.add_column(-1.0, 0.0, kInf);
    p.add_row({{0, 1.0}}, Relation::ge, 0.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::unbounded);
}

TEST_CASE("equality rows and free variables") {
    LpProblem p;
    p.add_column(1.0, -kInf, kInf);
    p.add_column(2.0, -kInf, kInf);
    p.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 4.0);
    p.add_row({{0, 1.0}, {1, -1.0}}, Relation::eq, 0.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE_THAT(s.primal[0], Catch::Matchers::WithinAbs(2.0, 1e-8));
    REQUIRE_THAT(s.primal[1], Catch::Matchers::WithinAbs(2.0, 1e-8));
    check_optimal_certificates(p, s);
}

TEST_CASE("redundant equality row tolerated") {
    LpProblem p;
    p.add_column(1.0, 0.0, 5.0);
    p.add_column(1.0, 0.0, 5.0);
    p.add_row({{0, 1.0}, {1, 1.0}}, Relation::eq, 4.0);
    p.add_row({{0, 2.0}, {1, 2.0}}, Relation::eq, 8.0);  // same hyperplane
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE_THAT(s.objective, Catch::Matchers::WithinAbs(4.0, 1e-8));
}

TEST_CASE("maximization sense") {
    LpProblem p;
    p.sense = Sense::maximize;
    p.add_column(3.0, 0.0, 2.0);
    p.add_column(1.0, 0.0, 2.0);
    p.add_row({{0, 1.0}, {1, 1.0}}, Relation::le, 3.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    REQUIRE_THAT(s.objective, Catch::Matchers::WithinAbs(7.0, 1e-8));
    check_optimal_certificates(p, s);
}

TEST_CASE("random lps agree with vertex enumeration") {
    Rng rng(20240811u);
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        int n = rng.uniform_int(2, 4);
        int m = rng.uniform_int(1, 4);
        LpProblem p = random_lp(rng, n, m);
        auto s = solve_lp(p);
        auto oracle = testutil::enumerate_vertices_optimum(p);
        if (!oracle.has_value()) {
            REQUIRE(s.status == LpStatus::infeasible);
            continue;
        }
        REQUIRE(s.status == LpStatus::optimal);
        REQUIRE_THAT(s.objective, Catch::Matchers::WithinAbs(*oracle, 1e-6));
        check_optimal_certificates(p, s);
        ++solved;
    }
    REQUIRE(solved > 40);  // the generator must produce plenty of feasible cases
}

TEST_CASE("strong duality on random feasible lps") {
    Rng rng(7u);
    for (int trial = 0; trial < 200; ++trial) {
        int n = rng.uniform_int(2, 8);
        int m = rng.uniform_int(1, 6);
        LpProblem p = random_lp(rng, n, m);
        auto s = solve_lp(p);
        if (s.status != LpStatus::optimal) continue;
        check_optimal_certificates(p, s);
    }
}

TEST_CASE("determinism: identical input gives identical solution bits") {
    Rng rng(99u);
    LpProblem p = random_lp(rng, 6, 5);
    auto a = solve_lp(p);
    auto b = solve_lp(p);
    REQUIRE(a.status == b.status);
    if (a.status == LpStatus::optimal) {
        REQUIRE(a.objective == b.objective);
        REQUIRE(a.primal == b.primal);
        REQUIRE(a.duals == b.duals);
    }
}

TEST_CASE("wide problem with few rows") {
    // Transport-style shape: thousands of columns, three rows.
    LpProblem p;
    const int g = 4000;
    for (int j = 0; j < g; ++j) p.add_column(std::sin(0.1 * j) + 1.5, 0.0, kInf);
    std::vector<std::pair<int, double>> r1, r2, budget;
    for (int j = 0; j < g; ++j) {
        (j % 2 == 0 ? r1 : r2).push_back({j, 1.0});
        budget.push_back({j, 0.25 + 0.001 * (j % 7)});
    }
    p.add_row(r1, Relation::eq, 0.5);
    p.add_row(r2, Relation::eq, 0.5);
    p.add_row(budget, Relation::le, 10.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::optimal);
    check_optimal_certificates(p, s);
}
