#include "doctest.h"

#include "rvi/lp.hpp"
#include "rvi/rng.hpp"

#include <array>
#include <cmath>

using namespace rvi;

namespace {
LinearProgram make(std::size_t m, std::size_t n, std::initializer_list<double> a, Vec b, Vec c) {
    LinearProgram lp{Matrix(m, n), std::move(b), std::move(c)};
    auto it = a.begin();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.constraints(i, j) = *it++;
    return lp;
}
} // namespace

TEST_CASE("textbook LP") {
    // max 5x + 4y + 3z ; 2x+3y+z<=5, 4x+y+2z<=11, 3x+4y+2z<=8 -> 13 at (2,0,1)
    auto lp = make(3, 3, {2, 3, 1, 4, 1, 2, 3, 4, 2}, {5, 11, 8}, {5, 4, 3});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == doctest::Approx(13.0));
    CHECK(sol.x[0] == doctest::Approx(2.0));
    CHECK(sol.x[1] == doctest::Approx(0.0));
    CHECK(sol.x[2] == doctest::Approx(1.0));
    // Strong duality: b . y equals the optimum.
    double dual_obj = 5 * sol.duals[0] + 11 * sol.duals[1] + 8 * sol.duals[2];
    CHECK(dual_obj == doctest::Approx(13.0));
}

TEST_CASE("phase one with negative bounds") {
    // max -x - y ; x + y >= 2 (as -x - y <= -2), x <= 3 -> -2
    auto lp = make(2, 2, {-1, -1, 1, 0}, {-2, 3}, {-1, -1});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == doctest::Approx(-2.0));
    CHECK(sol.x[0] + sol.x[1] == doctest::Approx(2.0));
}

TEST_CASE("infeasible and unbounded") {
    // x <= 1 and x >= 2
    auto infeasible = make(2, 1, {1, -1}, {1, -2}, {1});
    CHECK(solve_lp(infeasible).status == LpStatus::infeasible);
    // max x ; -x <= 1
    auto unbounded = make(1, 1, {-1}, {1}, {1});
    CHECK(solve_lp(unbounded).status == LpStatus::unbounded);
}

TEST_CASE("equality pair with redundant rows") {
    // x + y = 1 written twice as inequality pairs; max x -> 1
    auto lp = make(4, 2, {1, 1, -1, -1, 1, 1, -1, -1}, {1, -1, 1, -1}, {1, 0});
    auto sol = solve_lp(lp);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.value == doctest::Approx(1.0));
}

TEST_CASE("random LPs agree with vertex enumeration in two variables") {
    Rng rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 3 + static_cast<std::size_t>(rng.index(5));
        LinearProgram lp{Matrix(m, 2), Vec(m), Vec{rng.uniform() * 2 - 1, rng.uniform() * 2 - 1}};
        for (std::size_t i = 0; i < m; ++i) {
            lp.constraints(i, 0) = rng.uniform() * 2 - 0.5;
            lp.constraints(i, 1) = rng.uniform() * 2 - 0.5;
            lp.bounds[i] = rng.uniform() * 2 - 0.3;
        }
        // Add a bounding box so the optimum is finite when feasible.
        LinearProgram boxed = lp;
        boxed.constraints = Matrix(m + 2, 2);
        boxed.bounds.resize(m + 2);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < 2; ++j) boxed.constraints(i, j) = lp.constraints(i, j);
        boxed.constraints(m, 0) = 1;
        boxed.bounds[m] = 10;
        boxed.constraints(m + 1, 1) = 1;
        boxed.bounds[m + 1] = 10;

        // Vertex enumeration over all pairs of tight constraints (including x>=0, y>=0).
        std::vector<std::array<double, 3>> lines;
        for (std::size_t i = 0; i < m + 2; ++i)
            lines.push_back({boxed.constraints(i, 0), boxed.constraints(i, 1), boxed.bounds[i]});
        lines.push_back({-1, 0, 0});
        lines.push_back({0, -1, 0});
        double best = -1e300;
        bool feasible = false;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                double det = lines[i][0] * lines[j][1] - lines[i][1] * lines[j][0];
                if (std::abs(det) < 1e-12) continue;
                double x = (lines[i][2] * lines[j][1] - lines[i][1] * lines[j][2]) / det;
                double y = (lines[i][0] * lines[j][2] - lines[i][2] * lines[j][0]) / det;
                bool ok = x >= -1e-9 && y >= -1e-9;
                for (const auto& l : lines) ok = ok && l[0] * x + l[1] * y <= l[2] + 1e-9;
                if (!ok) continue;
                feasible = true;
                best = std::max(best, lp.objective[0] * x + lp.objective[1] * y);
            }
        }
        auto sol = solve_lp(boxed);
        if (!feasible) {
            CHECK(sol.status == LpStatus::infeasible);
        } else {
            REQUIRE(sol.status == LpStatus::optimal);
            CHECK(sol.value == doctest::Approx(best).epsilon(1e-9));
        }
    }
}
