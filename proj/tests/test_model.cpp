#include "doctest.h"

#include "oracles.hpp"
#include "rvi/generators.hpp"
#include "rvi/model.hpp"

#include <cmath>

using namespace rvi;
using doctest::Approx;

namespace {

void check_belief(const Belief& b, std::initializer_list<double> expected, double tol = 1e-12) {
    REQUIRE(b.size() == expected.size());
    std::size_t i = 0;
    for (double e : expected) CHECK(std::abs(b[i++] - e) <= tol);
}

PomdpModel identity_model(int n) {
    PomdpModel m(n, 1, 1, 0.9);
    for (int s = 0; s < n; ++s) {
        m.set_transition(s, 0, s, 1.0);
        m.set_observation(0, s, 0, 1.0);
    }
    return m;
}

} // namespace

TEST_CASE("validation catches broken rows and discount") {
    PomdpModel m(2, 1, 1, 0.95);
    CHECK_THROWS_AS(m.validate(), ModelError);
    m = identity_model(2);
    CHECK_NOTHROW(m.validate());
    m.set_discount(1.0);
    CHECK_THROWS_AS(m.validate(), ModelError);
    CHECK_THROWS_AS(m.set_transition(5, 0, 0, 1.0), UsageError);
}

TEST_CASE("belief update on the three-state example") {
    const auto m = make_example3();
    auto b = belief_update(m, Belief::unit(3, 0), 0, 0);
    REQUIRE(b);
    check_belief(*b, {0.5, 0.5, 0.0});
    auto mid = belief_update(m, Belief(Vec{0.5, 0.0, 0.5}), 0, 0);
    REQUIRE(mid);
    check_belief(*mid, {0.3, 0.3, 0.4});
    CHECK(observation_prob(m, Belief(Vec{0.2, 0.3, 0.5}), 0, 0) == Approx(0.5));
    CHECK_THROWS_AS(belief_update(m, Belief::unit(3, 0), 2, 0), UsageError);
}

TEST_CASE("identity dynamics leave beliefs unchanged") {
    const auto m = identity_model(3);
    Belief b(Vec{0.2, 0.3, 0.5});
    auto next = belief_update(m, b, 0, 0);
    REQUIRE(next);
    check_belief(*next, {0.2, 0.3, 0.5});
    CHECK(observation_prob(m, b, 0, 0) == Approx(1.0));
}

TEST_CASE("impossible observation gives no update") {
    PomdpModel m(2, 1, 2, 0.9);
    for (int s = 0; s < 2; ++s) {
        m.set_transition(s, 0, s, 1.0);
        m.set_observation(0, s, 0, 1.0);
    }
    CHECK_FALSE(belief_update(m, Belief::uniform(2), 0, 1).has_value());
    CHECK(observation_prob(m, Belief::uniform(2), 0, 1) == 0.0);
    CHECK(tau_simplex_basis(m, 0, 1).empty());
}

TEST_CASE("belief reward") {
    PomdpModel m(2, 1, 1, 0.9);
    m.set_reward(0, 0, 1.0);
    m.set_reward(1, 0, 3.0);
    CHECK(belief_reward(m, Belief::uniform(2), 0) == Approx(2.0));
    CHECK(belief_reward(m, Belief::unit(2, 1), 0) == Approx(3.0));
}

TEST_CASE("transformational matrices and properness of the three-state example") {
    const auto m = make_example3();
    auto t = transformational_matrix(m, 0, 0);
    // Column s holds P(s', z | s, a): first two rows equal.
    for (std::size_t s = 0; s < 3; ++s) CHECK(t.entries(0, s) == t.entries(1, s));
    CHECK(t.entries(0, 0) == Approx(0.25));
    CHECK(t.entries(2, 2) == Approx(0.4));
    auto d = is_degenerate(t);
    CHECK(d.degenerate);
    CHECK(d.rank == 2);
    auto report = analyze_properness(m);
    CHECK(report.pairs.size() == 4);
    for (const auto& p : report.pairs) CHECK(p.degenerate);
    CHECK(report.proper);
}

TEST_CASE("identity matrix is invertible") {
    auto t = transformational_matrix(identity_model(4), 0, 0);
    auto d = is_degenerate(t);
    CHECK_FALSE(d.degenerate);
    CHECK(d.rank == 4);
    CHECK_FALSE(analyze_properness(identity_model(4)).proper);
}

TEST_CASE("tau basis of the three-state example and its minimal basis") {
    const auto m = make_example3();
    auto basis = tau_simplex_basis(m, 0, 0);
    REQUIRE(basis.size() == 3);
    check_belief(basis.points[0], {0.5, 0.5, 0.0});
    check_belief(basis.points[1], {0.4, 0.4, 0.2});
    check_belief(basis.points[2], {0.1, 0.1, 0.8});

    auto w = hull_coefficients(basis.points[1], std::vector<Belief>{basis.points[0], basis.points[2]});
    REQUIRE(w);
    CHECK(std::abs((*w)[0] - 0.75) < 1e-9);
    CHECK(std::abs((*w)[1] - 0.25) < 1e-9);

    auto minimal = minimal_basis(basis);
    REQUIRE(minimal.size() == 2);
    check_belief(minimal.points[0], {0.5, 0.5, 0.0});
    check_belief(minimal.points[1], {0.1, 0.1, 0.8});
    CHECK(minimal_basis(minimal).size() == 2);
}

TEST_CASE("minimal basis keeps independent units and drops duplicates") {
    auto units = full_space_basis(3);
    CHECK(minimal_basis(units).size() == 3);
    units.points.push_back(Belief::unit(3, 1));
    CHECK(minimal_basis(units).size() == 3);
}

TEST_CASE("history basis folds single-step updates") {
    const auto m = make_example3();
    auto single = history_simplex_basis(m, History{{{0, 0}}});
    auto direct = tau_simplex_basis(m, 0, 0);
    REQUIRE(single.size() == direct.size());
    for (std::size_t i = 0; i < single.size(); ++i) CHECK(single.points[i] == direct.points[i]);

    // Two-state model: h = [a,z] twice gives normalized P^2 e_i.
    PomdpModel two(2, 1, 2, 0.9);
    two.set_transition(0, 0, 0, 0.7);
    two.set_transition(0, 0, 1, 0.3);
    two.set_transition(1, 0, 0, 0.2);
    two.set_transition(1, 0, 1, 0.8);
    two.set_observation(0, 0, 0, 0.6);
    two.set_observation(0, 0, 1, 0.4);
    two.set_observation(0, 1, 0, 0.1);
    two.set_observation(0, 1, 1, 0.9);
    auto twice = history_simplex_basis(two, History{{{0, 0}, {0, 0}}});
    auto p = transformational_matrix(two, 0, 0).entries;
    for (int i = 0; i < 2; ++i) {
        double v0 = p(0, static_cast<std::size_t>(i)), v1 = p(1, static_cast<std::size_t>(i));
        double w0 = p(0, 0) * v0 + p(0, 1) * v1;
        double w1 = p(1, 0) * v0 + p(1, 1) * v1;
        CHECK(twice.points[static_cast<std::size_t>(i)][0] == Approx(w0 / (w0 + w1)).epsilon(1e-12));
        CHECK(twice.points[static_cast<std::size_t>(i)][1] == Approx(w1 / (w0 + w1)).epsilon(1e-12));
    }
}

TEST_CASE("observation supports and phi bases") {
    const auto maze = make_maze1();
    auto owow = observation_support(maze, 0, 1);
    CHECK(owow.states == std::vector<int>{1, 4});
    auto phi = phi_simplex_basis(maze, 3, 1);
    REQUIRE(phi.size() == 2);
    CHECK(phi.points[0] == Belief::unit(10, 1));
    CHECK(informativeness_report(maze).max_support_size == 2);

    const auto ex3 = make_example3();
    CHECK(phi_simplex_basis(ex3, 0, 0).size() == 3);
    CHECK(minimal_basis(tau_simplex_basis(ex3, 0, 0)).size() == 2);
}

TEST_CASE("random models: normalization, consistency, containment, corollary") {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        RandomModelParams params;
        params.seed = seed;
        params.states = 3 + static_cast<int>(seed % 3);
        params.observations = 2 + static_cast<int>(seed % 2);
        params.sparsity = 0.3;
        const auto m = make_random_model(params);
        Rng rng(seed * 7);
        for (int a = 0; a < m.num_actions(); ++a) {
            double total = 0.0;
            const Belief b = oracle::random_belief(rng, m.num_states());
            for (int z = 0; z < m.num_observations(); ++z) total += observation_prob(m, b, a, z);
            CHECK(total == Approx(1.0).epsilon(1e-9));
            for (int z = 0; z < m.num_observations(); ++z) {
                auto t = transformational_matrix(m, a, z);
                auto support = observation_support(m, a, z);
                // Decomposition.
                for (int sn = 0; sn < m.num_states(); ++sn)
                    for (int s = 0; s < m.num_states(); ++s)
                        CHECK(t.entries(static_cast<std::size_t>(sn), static_cast<std::size_t>(s)) ==
                              m.observation(a, sn, z) * m.transition(s, a, sn));
                if (static_cast<int>(support.states.size()) < m.num_states()) CHECK(is_degenerate(t).degenerate);

                auto basis = tau_simplex_basis(m, a, z);
                for (const auto& p : basis.points) {
                    CHECK(p.is_valid());
                    double outside = 1.0;
                    for (int s : support.states) outside -= p[static_cast<std::size_t>(s)];
                    CHECK(std::abs(outside) < 1e-12);
                }
                auto next = belief_update(m, b, a, z);
                if (!next) continue;
                CHECK(next->is_valid());
                // b' = sum_i lambda_i tau(e_i) with lambda_i proportional to b(s_i) P(z|e_i,a).
                Vec mix(static_cast<std::size_t>(m.num_states()), 0.0);
                double norm = observation_prob(m, b, a, z);
                for (int s = 0; s < m.num_states(); ++s) {
                    const Belief unit = Belief::unit(m.num_states(), s);
                    double c = b[static_cast<std::size_t>(s)] * observation_prob(m, unit, a, z);
                    if (c <= 0.0) continue;
                    auto ts = belief_update(m, unit, a, z);
                    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] += c / norm * (*ts)[k];
                }
                for (std::size_t k = 0; k < mix.size(); ++k) CHECK(std::abs(mix[k] - (*next)[k]) < 1e-8);

                auto minimal = minimal_basis(basis);
                auto again = minimal_basis(minimal);
                CHECK(again.size() == minimal.size());
            }
        }
    }
}
