#include "doctest.h"

#include "oracles.hpp"
#include "rvi/dp.hpp"
#include "rvi/generators.hpp"

#include <cmath>

using namespace rvi;
using doctest::Approx;

namespace {

VectorSet zero_set(int n) {
    VectorSet v;
    v.vectors.push_back({Vec(static_cast<std::size_t>(n), 0.0), -1, {}, std::nullopt});
    return v;
}

PomdpModel one_state(double reward, double discount) {
    PomdpModel m(1, 1, 1, discount);
    m.set_transition(0, 0, 0, 1.0);
    m.set_observation(0, 0, 0, 1.0);
    m.set_reward(0, 0, reward);
    return m;
}

PomdpModel random_model(std::uint64_t seed, int states, double sparsity = 0.3) {
    RandomModelParams p;
    p.seed = seed;
    p.states = states;
    p.actions = 2;
    p.observations = 2;
    p.sparsity = sparsity;
    return make_random_model(p);
}

std::vector<Belief> points_in(Rng& rng, std::span<const SimplexBasis> bases, int per_basis) {
    std::vector<Belief> out;
    for (const auto& b : bases) {
        for (const auto& p : b.points) out.push_back(p);
        for (int i = 0; i < per_basis; ++i) out.push_back(oracle::random_point(rng, b));
    }
    return out;
}

} // namespace

TEST_CASE("build_vector") {
    const auto m = make_example3();
    AlphaVector zero{Vec(3, 0.0), -1, {}, std::nullopt};
    const AlphaVector* delta[2] = {&zero, &zero};
    auto beta = build_vector(m, 1, delta);
    for (int s = 0; s < 3; ++s) CHECK(beta.values[static_cast<std::size_t>(s)] == m.reward(s, 1));

    const auto one = one_state(1.0, 0.95);
    AlphaVector unit{Vec{1.0}, -1, {}, std::nullopt};
    const AlphaVector* d1[1] = {&unit};
    CHECK(build_vector(one, 0, d1).values[0] == Approx(1.95));

    // An impossible observation's predecessor does not matter.
    PomdpModel two(2, 1, 2, 0.9);
    for (int s = 0; s < 2; ++s) {
        two.set_transition(s, 0, s, 1.0);
        two.set_observation(0, s, 0, 1.0);
    }
    AlphaVector x{Vec{1, 2}, -1, {}, std::nullopt}, y{Vec{5, -7}, -1, {}, std::nullopt};
    const AlphaVector* da[2] = {&x, &x};
    const AlphaVector* db[2] = {&x, &y};
    CHECK(build_vector(two, 0, da).values == build_vector(two, 0, db).values);
}

TEST_CASE("space update from zero gives pruned reward columns") {
    const auto m = random_model(3, 3);
    DpUpdateStats stats;
    auto v1 = dp_update_space(m, zero_set(3), {}, &stats);
    CHECK(stats.enumerated == 2);
    CHECK(stats.kept == static_cast<long>(v1.size()));
    for (const auto& v : v1.vectors)
        for (int s = 0; s < 3; ++s) CHECK(v.values[static_cast<std::size_t>(s)] == Approx(m.reward(s, v.action)));
}

TEST_CASE("one-state model follows the geometric series") {
    const auto m = one_state(1.0, 0.95);
    auto v = zero_set(1);
    double expected = 0.0;
    for (int n = 0; n < 20; ++n) {
        v = dp_update_space(m, v);
        expected += std::pow(0.95, n);
        CHECK(v.vectors[0].values[0] == Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("space update agrees with an exact point backup") {
    Rng rng(5);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto m = random_model(seed, 3);
        auto v = zero_set(3);
        for (int it = 0; it < 4; ++it) {
            DpUpdateStats stats;
            auto next = dp_update_space(m, v, {}, &stats);
            CHECK(stats.enumerated <= 2 * static_cast<long>(std::pow(static_cast<double>(v.size()), 2)));
            CHECK(stats.kept <= stats.enumerated);
            for (int i = 0; i < 100; ++i) {
                auto b = oracle::random_belief(rng, 3);
                CHECK(induced_value(next, b).value == Approx(oracle::backup_value(m, v, b)).epsilon(1e-10));
            }
            v = next;
        }
    }
}

TEST_CASE("incremental pruning is value-equivalent to enumeration") {
    Rng rng(8);
    for (std::uint64_t seed = 10; seed <= 14; ++seed) {
        const auto m = random_model(seed, 4);
        DpOptions inc;
        inc.incremental = true;
        auto a = zero_set(4), b = zero_set(4);
        for (int it = 0; it < 4; ++it) {
            a = dp_update_space(m, a);
            b = dp_update_space(m, b, inc);
            std::vector<Belief> pts;
            for (int i = 0; i < 300; ++i) pts.push_back(oracle::random_belief(rng, 4));
            CHECK(oracle::max_difference(a, b, pts) < 1e-8);
        }
        auto bases = tau_bases(m);
        auto c = zero_set(4), d = zero_set(4);
        for (int it = 0; it < 4; ++it) {
            c = dp_update_subset_collective(m, c, bases);
            d = dp_update_subset_collective(m, d, bases, inc);
            CHECK(oracle::max_difference(c, d, points_in(rng, bases, 100)) < 1e-8);
        }
    }
}

TEST_CASE("enumeration cap raises a resource error") {
    const auto m = make_maze1();
    DpOptions opts;
    opts.enumeration_cap = 10;
    VectorSet v = zero_set(10);
    v.vectors.push_back({Vec(10, 1.0), -1, {}, std::nullopt});
    CHECK_THROWS_AS(dp_update_space(m, v, opts), ResourceError);
}

TEST_CASE("collective update equals space update when some simplex is the whole space") {
    const auto m = make_maze2();
    auto bases = tau_bases(m);
    Rng rng(3);
    DpOptions inc;
    inc.incremental = true;
    auto a = zero_set(10), b = zero_set(10);
    for (int it = 0; it < 2; ++it) {
        a = dp_update_space(m, a, inc);
        b = dp_update_subset_collective(m, b, bases, inc);
    }
    std::vector<Belief> pts;
    for (int i = 0; i < 1000; ++i) pts.push_back(oracle::random_belief(rng, 10));
    CHECK(oracle::max_difference(a, b, pts) < 1e-8);
}

TEST_CASE("subset updates on the three-state example") {
    const auto m = make_example3();
    auto bases = tau_bases(m);
    CHECK(bases.size() == 4);
    auto v = dp_update_subset_collective(m, zero_set(3), bases);
    // Zero rewards: everything collapses to the zero vector.
    CHECK(v.size() == 1);
    auto family = make_tau_family(m, zero_set(3));
    auto next = dp_update_subset_individual(m, family);
    // Identical simplices for z1 and z2 carry equal value functions.
    Rng rng(1);
    for (int a = 0; a < 2; ++a) {
        const auto* e1 = next.find(a, 0);
        const auto* e2 = next.find(a, 1);
        for (int i = 0; i < 50; ++i) {
            auto b = oracle::random_point(rng, e1->basis);
            CHECK(induced_value(e1->vectors, b).value == Approx(induced_value(e2->vectors, b).value));
        }
    }
}

TEST_CASE("collective and individual agree on every simplex; subset agrees with space on tau(B)") {
    Rng rng(21);
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        const auto m = random_model(seed, 3 + static_cast<int>(seed % 2), 0.4);
        auto bases = tau_bases(m);
        auto space = zero_set(m.num_states());
        auto collective = space;
        auto family = make_tau_family(m, space);
        for (int it = 0; it < 4; ++it) {
            space = dp_update_space(m, space);
            collective = dp_update_subset_collective(m, collective, bases);
            family = dp_update_subset_individual(m, family);
            CHECK(oracle::max_difference(space, collective, points_in(rng, bases, 100)) < 1e-8);
            for (const auto& e : family.entries) {
                std::vector<Belief> pts = e.basis.points;
                for (int i = 0; i < 200; ++i) pts.push_back(oracle::random_point(rng, e.basis));
                CHECK(oracle::max_difference(e.vectors, collective, pts) < 1e-8);
            }
        }
    }
}

TEST_CASE("bellman residual") {
    VectorSet a = zero_set(2);
    CHECK(bellman_residual(a, a, 2) == 0.0);
    VectorSet c;
    c.vectors.push_back({Vec{2.5, 2.5}, 0, {}, std::nullopt});
    CHECK(bellman_residual(c, a, 2) == Approx(2.5));
    CHECK(bellman_residual(a, c, 2) == Approx(2.5));

    Rng rng(4);
    std::vector<Belief> grid;
    for (const auto& w : oracle::simplex_grid(3, 200)) grid.push_back(Belief(w));
    for (int trial = 0; trial < 20; ++trial) {
        auto x = oracle::random_set(rng, 3, 1 + rng.index(5));
        auto y = oracle::random_set(rng, 3, 1 + rng.index(5));
        const double r = bellman_residual(x, y, 3);
        CHECK(std::abs(r - oracle::exact_max_difference3(x, y)) < 1e-9);
        // A grid only sees part of the simplex, so it bounds the residual from below.
        CHECK(r >= oracle::max_difference(x, y, grid) - 1e-12);
        CHECK(r - oracle::max_difference(x, y, grid) < 5e-3);
    }
}

TEST_CASE("low-dimension updates on maze1") {
    const auto m = make_maze1();
    auto family = make_phi_family(m, true);
    CHECK(family.keyed_by_observation);
    CHECK(family.entries.size() == 6);
    DpOptions inc;
    inc.incremental = true;
    for (int it = 0; it < 3; ++it) family = dp_update_phi(m, family, inc);
    for (const auto& e : family.entries)
        for (const auto& v : e.vectors.vectors) CHECK(v.values.size() <= 2);
}

TEST_CASE("elevator phi family has 32 three-state simplices") {
    const auto m = make_elevator();
    CHECK(m.num_states() == 96);
    CHECK(m.num_observations() == 32);
    auto family = make_phi_family(m, true);
    CHECK(family.entries.size() == 32);
    for (const auto& e : family.entries) CHECK(e.vectors.support->states.size() == 3);
}

TEST_CASE("low-dimension fidelity against full-dimension phi updates") {
    Rng rng(31);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomModelParams p;
        p.seed = seed;
        p.states = 4;
        p.observations = 3;
        p.sparsity = 0.5;
        const auto m = make_random_model(p);
        auto low = make_phi_family(m, true);
        auto full = make_phi_family(m, false);
        for (int it = 0; it < 3; ++it) {
            low = dp_update_phi(m, low);
            full = dp_update_phi(m, full);
            REQUIRE(low.entries.size() == full.entries.size());
            for (std::size_t i = 0; i < low.entries.size(); ++i) {
                auto embedded = embed_full(low.entries[i].vectors, 4);
                std::vector<Belief> pts = low.entries[i].basis.points;
                for (int k = 0; k < 200; ++k) pts.push_back(oracle::random_point(rng, low.entries[i].basis));
                CHECK(oracle::max_difference(embedded, full.entries[i].vectors, pts) < 1e-8);
            }
        }
    }
}

TEST_CASE("phi family with full supports matches the individual tau update in value") {
    Rng rng(9);
    const auto m = random_model(77, 3, 0.0);
    auto phi = make_phi_family(m, false);
    auto space = zero_set(3);
    for (int it = 0; it < 3; ++it) {
        phi = dp_update_phi(m, phi);
        space = dp_update_space(m, space);
        for (const auto& e : phi.entries) {
            std::vector<Belief> pts;
            for (int k = 0; k < 200; ++k) pts.push_back(oracle::random_point(rng, e.basis));
            CHECK(oracle::max_difference(e.vectors, space, pts) < 1e-8);
        }
    }
}
