#include "doctest.h"

#include "oracles.hpp"
#include "rvi/generators.hpp"
#include "rvi/solvers.hpp"

#include <cmath>

using namespace rvi;
using doctest::Approx;

namespace {

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
    p.sparsity = sparsity;
    return make_random_model(p);
}

AlphaVector tagged(int n, int action, History h) {
    AlphaVector v;
    v.values = Vec(static_cast<std::size_t>(n), 0.0);
    v.action = action;
    v.history = std::move(h);
    return v;
}

} // namespace

TEST_CASE("stopping thresholds") {
    CHECK(std::abs(loose_threshold(0.01, 0.95) - 2.6316e-4) < 1e-8);
    CHECK(std::abs(strict_threshold(0.01, 0.95, 2) - 1.3850e-4) < 1e-8);
    CHECK(loose_threshold(0.01, 0.0) == 0.0);
    for (double lambda : {0.5, 0.9, 0.99})
        for (int z : {2, 3, 10}) CHECK(strict_threshold(0.01, lambda, z) <= loose_threshold(0.01, lambda));
}

TEST_CASE("config validation") {
    SolveConfig cfg;
    cfg.epsilon = 0.0;
    CHECK_THROWS_AS(solve_vi(one_state(1, 0.9), cfg), UsageError);
    cfg.epsilon = 0.01;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(solve_vi(one_state(1, 0.9), cfg), UsageError);
}

TEST_CASE("vi on the one-state model converges to the geometric limit") {
    const auto m = one_state(1.0, 0.95);
    SolveConfig cfg;
    auto res = solve_vi(m, cfg);
    REQUIRE(res.termination == Termination::residual_met);
    const double thr = loose_threshold(0.01, 0.95);
    CHECK(res.residual <= thr);
    // Closed form: after k updates the value is 20 (1 - 0.95^k) and the residual 0.95^(k-1).
    int k = 1;
    while (std::pow(0.95, k - 1) > thr) ++k;
    CHECK(res.iterations() == static_cast<std::size_t>(k));
    const double v = res.vectors.vectors[0].values[0];
    CHECK(v == Approx(20.0 * (1.0 - std::pow(0.95, k - 1))).epsilon(1e-10));
    CHECK(std::abs(v - 20.0) <= 0.01);
}

TEST_CASE("myopic discount stops after the second update") {
    auto m = random_model(4, 3);
    m.set_discount(0.0);
    auto res = solve_vi(m, {});
    CHECK(res.termination == Termination::residual_met);
    CHECK(res.iterations() == 2);
    CHECK(res.residual == 0.0);
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        auto b = oracle::random_belief(rng, 3);
        double best = -1e9;
        for (int a = 0; a < m.num_actions(); ++a) best = std::max(best, belief_reward(m, b, a));
        CHECK(induced_value(res.vectors, b).value == Approx(best));
    }
}

TEST_CASE("vi terminates on random models with eventually decreasing residuals") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto m = random_model(seed, 3);
        SolveConfig cfg;
        cfg.epsilon = 0.05;
        auto res = solve_vi(m, cfg);
        REQUIRE(res.termination == Termination::residual_met);
        const auto& st = res.stats;
        REQUIRE(st.size() >= 4);
        for (std::size_t i = st.size() - 3; i < st.size(); ++i) CHECK(st[i].residual < st[i - 1].residual);
        Rng rng(seed);
        for (int i = 0; i < 100; ++i) {
            double v = induced_value(res.vectors, oracle::random_belief(rng, 3)).value;
            CHECK(v <= m.max_reward() / (1 - m.discount()) + 1e-6);
            CHECK(v >= m.min_reward() / (1 - m.discount()) - 1e-6);
        }
    }
}

TEST_CASE("deadline and iteration caps report iteration-cap") {
    const auto m = random_model(9, 3);
    SolveConfig cfg;
    cfg.max_iterations = 2;
    auto res = solve_vi(m, cfg);
    CHECK(res.termination == Termination::iteration_cap);
    CHECK(res.iterations() == 2);
}

TEST_CASE("resource abort keeps the last completed set") {
    const auto m = make_maze1();
    SolveConfig cfg;
    cfg.dp.enumeration_cap = 50;
    auto res = solve_vi(m, cfg);
    CHECK(res.termination == Termination::resource_abort);
    CHECK_FALSE(res.vectors.empty());
}

TEST_CASE("ssvi agrees with vi on tau(B) at every common iteration") {
    Rng rng(17);
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const auto m = random_model(seed, 3 + static_cast<int>(seed % 2));
        const auto bases = tau_bases(m);
        for (int n = 1; n <= 4; ++n) {
            SolveConfig cfg;
            cfg.max_iterations = n;
            cfg.epsilon = 1e-9;
            auto vi = solve_vi(m, cfg);
            auto ss = solve_ssvi(m, cfg);
            REQUIRE(vi.iterations() == static_cast<std::size_t>(n));
            std::vector<Belief> pts;
            for (const auto& b : bases)
                for (int i = 0; i < 40; ++i) pts.push_back(oracle::random_point(rng, b));
            CHECK(oracle::max_difference(vi.vectors, ss.vectors, pts) < 1e-8);
        }
    }
}

TEST_CASE("ssvi individual mode returns a family and the strict threshold") {
    const auto m = random_model(5, 3);
    SolveConfig cfg;
    cfg.mode = UpdateMode::individual;
    auto res = solve_ssvi(m, cfg);
    REQUIRE(res.family);
    CHECK(res.threshold == Approx(strict_threshold(0.01, m.discount(), m.num_observations())));
    CHECK(res.termination == Termination::residual_met);
    CHECK(res.residual <= res.threshold);
}

TEST_CASE("example3 ssvi kept counts never exceed vi counts") {
    auto m = make_example3();
    Rng rng(3);
    for (int s = 0; s < 3; ++s)
        for (int a = 0; a < 2; ++a) m.set_reward(s, a, rng.uniform() - 0.5);
    SolveConfig cfg;
    cfg.max_iterations = 12;
    auto vi = solve_vi(m, cfg);
    auto ss = solve_ssvi(m, cfg);
    const std::size_t common = std::min(vi.iterations(), ss.iterations());
    for (std::size_t i = 0; i < common; ++i) CHECK(ss.stats[i].kept <= vi.stats[i].kept);
}

TEST_CASE("infovi with full supports matches vi") {
    const auto m = random_model(12, 3, 0.0);
    Rng rng(12);
    for (int n = 1; n <= 4; ++n) {
        SolveConfig cfg;
        cfg.max_iterations = n;
        cfg.epsilon = 1e-9;
        auto vi = solve_vi(m, cfg);
        auto info = solve_infovi(m, cfg);
        REQUIRE(info.family);
        for (const auto& e : info.family->entries) {
            std::vector<Belief> pts;
            for (int i = 0; i < 100; ++i) pts.push_back(oracle::random_belief(rng, 3));
            CHECK(oracle::max_difference(e.vectors, vi.vectors, pts) < 1e-8);
        }
    }
}

TEST_CASE("infovi on maze1 keeps vectors of length at most two") {
    SolveConfig cfg;
    cfg.max_iterations = 4;
    cfg.dp.incremental = true;
    auto res = solve_infovi(make_maze1(), cfg);
    REQUIRE(res.family);
    CHECK(res.family->keyed_by_observation);
    for (const auto& e : res.family->entries)
        for (const auto& v : e.vectors.vectors) CHECK(v.values.size() <= 2);
}

TEST_CASE("action classification heuristic") {
    auto maze = make_maze2();
    auto c = classify_actions_heuristic(maze);
    // Moves and stay read wall strings; declare only sees null.
    CHECK(c.information_rich == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(c.information_poor == std::vector<int>{5});
    CHECK(c.poor_observations.back() == 6);

    auto all = classify_actions_heuristic(make_maze1());
    CHECK(all.information_poor.empty());

    GridParams gp;
    auto grid = make_near_discernible_grid(gp);
    auto g = classify_actions_heuristic(grid);
    CHECK(g.information_rich == std::vector<int>{4, 5});
    CHECK(g.poor_observations.size() == 1);
}

TEST_CASE("history sets: maximality and expansion") {
    GridParams gp;
    const auto m = make_near_discernible_grid(gp);
    auto classes = make_classification(m, {4, 5});
    REQUIRE(classes.information_poor.size() == 4);
    REQUIRE(classes.poor_observations.size() == 1);
    const History h{{{4, 0}}};
    HistorySet H;
    H.insert(h);
    CHECK(H.is_maximal(h));

    VectorSet v;
    v.vectors.push_back(tagged(m.num_states(), 0, h));
    auto expanded = expand_subset(m, v, H, classes);
    CHECK(expanded.size() == 5);
    CHECK(expanded.generation == 1);
    CHECK_FALSE(expanded.is_maximal(h));
    // h is no longer maximal, so nothing more comes from it.
    CHECK(expand_subset(m, v, expanded, classes).size() == 5);
    // The exhaustive variant ignores maximality but never duplicates.
    CHECK(expand_subset(m, v, expanded, classes, true).size() == 5);

    VectorSet rich;
    rich.vectors.push_back(tagged(m.num_states(), 4, h));
    CHECK(expand_subset(m, rich, H, classes).size() == 1);
    CHECK(spvi_should_stop(rich, H, classes));
    CHECK_FALSE(spvi_should_stop(v, H, classes));
    CHECK(spvi_should_stop(v, expanded, classes));
}

TEST_CASE("subset_vi values rise monotonically and stay bounded") {
    GridParams gp;
    const auto m = make_near_discernible_grid(gp);
    const auto classes = classify_actions_heuristic(m);
    const auto H = initial_histories(m, classes);
    const auto bases = history_bases(m, H);
    std::vector<Belief> pts;
    Rng rng(5);
    for (const auto& b : bases) {
        for (const auto& p : b.points) pts.push_back(p);
        for (int i = 0; i < 10; ++i) pts.push_back(oracle::random_point(rng, b));
    }
    VectorSet u;
    u.vectors.push_back({Vec(static_cast<std::size_t>(m.num_states()), m.min_reward()), -1, {}, std::nullopt});
    SolveConfig one;
    one.max_iterations = 1;
    one.dp.incremental = true;
    for (int j = 0; j < 10; ++j) {
        SubsetViTrace trace;
        VectorSet next = subset_vi(m, u, bases, 0.0, one, &trace);
        CHECK(trace.stats.size() == 1);
        for (const auto& p : pts) {
            const double before = induced_value(u, p).value, after = induced_value(next, p).value;
            CHECK(after >= before - 1e-9);
            CHECK(after <= m.max_reward() / (1 - m.discount()) + 1e-6);
        }
        for (const auto& v : next.vectors) CHECK(v.history.has_value());
        u = std::move(next);
    }
}

TEST_CASE("spvi stops at once when the information-rich action is best everywhere") {
    // Two states, look reveals the state and pays 1; the other action pays 0.
    PomdpModel m(2, 2, 3, 0.9);
    for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 2; ++a) m.set_transition(s, a, s, 1.0);
        m.set_observation(0, s, s, 1.0);
        m.set_observation(1, s, 2, 1.0);
        m.set_reward(s, 0, 1.0);
    }
    const auto classes = classify_actions_heuristic(m);
    REQUIRE(classes.information_rich == std::vector<int>{0});
    auto res = solve_spvi(m, {}, classes);
    CHECK(res.termination == Termination::all_information_rich);
    CHECK(res.expansions.size() == 1);
    CHECK(res.histories.size() == 2);
    for (const auto& v : res.vectors.vectors) CHECK(v.action == 0);
}

TEST_CASE("spvi rejects models without information-rich actions") {
    const auto m = make_example3();
    CHECK_THROWS_AS(solve_spvi(m, {}, make_classification(m, {})), UsageError);
}

TEST_CASE("spvi on the grid: monotone across expansions, growth bounds, caps") {
    GridParams gp;
    const auto m = make_near_discernible_grid(gp);
    const auto classes = classify_actions_heuristic(m);
    SolveConfig cfg;
    cfg.dp.incremental = true;
    cfg.max_expansions = 3;
    auto res = solve_spvi(m, cfg, classes);
    CHECK((res.termination == Termination::all_information_rich || res.termination == Termination::iteration_cap));
    CHECK(res.history_bound_held);
    REQUIRE(res.expansions.size() >= 2);
    std::size_t total = 0;
    for (std::size_t i = 0; i < res.expansions.size(); ++i) {
        total += static_cast<std::size_t>(res.expansions[i].iterations);
        if (i == 0) continue;
        const auto& prev = res.expansions[i - 1];
        const auto& cur = res.expansions[i];
        CHECK(cur.histories >= prev.histories);
        for (const auto& b : history_bases(m, prev.history_set))
            for (const auto& p : b.points) CHECK(induced_value(cur.value, p).value >= induced_value(prev.value, p).value - 1e-9);
    }
    CHECK(total == res.iterations());

    SolveConfig capped = cfg;
    capped.max_iterations = 20;
    auto short_run = solve_spvi(m, capped, classes);
    CHECK(short_run.termination == Termination::iteration_cap);
    CHECK(short_run.iterations() == 20);
}

TEST_CASE("the literal history bound ignores the union with H") {
    // Look (rich) reveals the state. Two poor actions see null; each pays 1 in
    // its own state, so after each look a different poor action is best. Both
    // initial histories get two extensions: 2 + 4 > 2 * 2.
    PomdpModel m(2, 3, 3, 0.9);
    for (int s = 0; s < 2; ++s) {
        for (int a = 0; a < 3; ++a) m.set_transition(s, a, s, 1.0);
        m.set_observation(0, s, s, 1.0);
        m.set_observation(1, s, 2, 1.0);
        m.set_observation(2, s, 2, 1.0);
        m.set_reward(s, 1 + s, 1.0);
    }
    const auto classes = make_classification(m, {0});
    SolveConfig cfg;
    cfg.max_expansions = 1;
    auto res = solve_spvi(m, cfg, classes);
    REQUIRE(res.expansions.size() == 2);
    CHECK(res.expansions[0].histories == 2);
    CHECK(res.expansions[1].histories == 6);
    CHECK_FALSE(res.history_bound_held);
}

TEST_CASE("termination names") {
    CHECK(to_string(Termination::residual_met) == "residual-met");
    CHECK(to_string(Termination::all_information_rich) == "spvi-all-information-rich");
    CHECK(to_string(Termination::resource_abort) == "resource-abort");
    CHECK(to_string(Termination::iteration_cap) == "iteration-cap");
}
