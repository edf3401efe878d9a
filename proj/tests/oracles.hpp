#pragma once

// Brute-force reference computations shared by the test binaries.

#include "rvi/dp.hpp"
#include "rvi/geometry.hpp"
#include "rvi/model.hpp"
#include "rvi/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

namespace rvi::oracle {

/// Every point of the unit simplex in `dims` coordinates whose entries are multiples of 1/steps.
inline std::vector<Vec> simplex_grid(int dims, int steps) {
    std::vector<Vec> out;
    Vec cur(static_cast<std::size_t>(dims), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(dims), 0);
    auto rec = [&](auto&& self, int d, int left) -> void {
        if (d == dims - 1) {
            counts[static_cast<std::size_t>(d)] = left;
            Vec p(static_cast<std::size_t>(dims));
            for (int i = 0; i < dims; ++i) p[static_cast<std::size_t>(i)] = static_cast<double>(counts[static_cast<std::size_t>(i)]) / steps;
            out.push_back(std::move(p));
            return;
        }
        for (int c = 0; c <= left; ++c) {
            counts[static_cast<std::size_t>(d)] = c;
            self(self, d + 1, left - c);
        }
    };
    rec(rec, 0, steps);
    return out;
}

/// Convex combination of basis points.
inline Belief combine(const SimplexBasis& basis, const Vec& weights) {
    Vec b(basis.points.front().size(), 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i)
        for (std::size_t s = 0; s < b.size(); ++s) b[s] += weights[i] * basis.points[i][s];
    return Belief(std::move(b));
}

inline Belief random_point(Rng& rng, const SimplexBasis& basis) {
    return combine(basis, rng.dirichlet(static_cast<int>(basis.points.size())));
}

inline Belief random_belief(Rng& rng, int n) { return Belief(rng.dirichlet(n)); }

inline VectorSet random_set(Rng& rng, int dims, int count, double lo = -1.0, double hi = 1.0) {
    VectorSet set;
    for (int i = 0; i < count; ++i) {
        AlphaVector v;
        v.action = 0;
        for (int s = 0; s < dims; ++s) v.values.push_back(lo + (hi - lo) * rng.uniform());
        set.vectors.push_back(std::move(v));
    }
    return set;
}

/// Largest |V1(b) - V2(b)| over the given points.
inline double max_difference(const VectorSet& a, const VectorSet& b, const std::vector<Belief>& points) {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, std::abs(induced_value(a, p).value - induced_value(b, p).value));
    return worst;
}

/// Grid points of a simplex basis hull.
inline std::vector<Belief> hull_grid(const SimplexBasis& basis, int steps) {
    std::vector<Belief> out;
    for (const auto& w : simplex_grid(static_cast<int>(basis.points.size()), steps)) out.push_back(combine(basis, w));
    return out;
}

/// Exact Bellman backup at a single belief by enumeration over actions and observations.
inline double backup_value(const PomdpModel& model, const VectorSet& v, const Belief& b) {
    double best = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < model.num_actions(); ++a) {
        double q = belief_reward(model, b, a);
        for (int z = 0; z < model.num_observations(); ++z) {
            const double pz = observation_prob(model, b, a, z);
            if (pz <= 0.0) continue;
            auto next = belief_update(model, b, a, z);
            if (next) q += model.discount() * pz * induced_value(v, *next).value;
        }
        best = std::max(best, q);
    }
    return best;
}

/**
 * Exact max |V1(b) - V2(b)| over the 3-state belief simplex. The maximum of a
 * difference of piecewise-linear functions sits at a vertex of their common
 * refinement, so it suffices to check every point where two of the planes
 * (u - v) . b = 0 or b_s = 0 cross inside the simplex.
 */
inline double exact_max_difference3(const VectorSet& a, const VectorSet& b) {
    std::vector<std::array<double, 3>> planes;
    std::vector<Vec> all;
    for (const auto& v : a.vectors) all.push_back(v.values);
    for (const auto& v : b.vectors) all.push_back(v.values);
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j)
            planes.push_back({all[i][0] - all[j][0], all[i][1] - all[j][1], all[i][2] - all[j][2]});
    planes.push_back({1, 0, 0});
    planes.push_back({0, 1, 0});
    planes.push_back({0, 0, 1});
    double worst = 0.0;
    for (std::size_t i = 0; i < planes.size(); ++i) {
        for (std::size_t j = i + 1; j < planes.size(); ++j) {
            // Solve [p_i; p_j; 1 1 1] b = [0; 0; 1] by Cramer's rule.
            const auto& p = planes[i];
            const auto& q = planes[j];
            auto det3 = [](std::array<double, 3> r0, std::array<double, 3> r1, std::array<double, 3> r2) {
                return r0[0] * (r1[1] * r2[2] - r1[2] * r2[1]) - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0]) +
                       r0[2] * (r1[0] * r2[1] - r1[1] * r2[0]);
            };
            const std::array<double, 3> ones{1, 1, 1};
            const double d = det3(p, q, ones);
            if (std::abs(d) < 1e-12) continue;
            Vec x(3);
            for (int c = 0; c < 3; ++c) {
                auto r0 = p, r1 = q, r2 = ones;
                r0[static_cast<std::size_t>(c)] = 0;
                r1[static_cast<std::size_t>(c)] = 0;
                r2[static_cast<std::size_t>(c)] = 1;
                x[static_cast<std::size_t>(c)] = det3(r0, r1, r2) / d;
            }
            if (x[0] < -1e-12 || x[1] < -1e-12 || x[2] < -1e-12) continue;
            for (double& e : x) e = std::max(e, 0.0);
            Belief bel(x);
            worst = std::max(worst, std::abs(induced_value(a, bel).value - induced_value(b, bel).value));
        }
    }
    return worst;
}

} // namespace rvi::oracle
