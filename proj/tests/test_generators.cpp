#include "doctest.h"

#include "rvi/generators.hpp"

#include <set>

using namespace rvi;

TEST_CASE("office layout") {
    const auto m = make_office();
    CHECK(m.num_states() == 35);
    CHECK(m.num_actions() == 6);
    CHECK(m.num_observations() == 23);
    CHECK_NOTHROW(m.validate(1e-9));
    std::set<std::string> strings(m.observation_names.begin(), m.observation_names.end() - 1);
    CHECK(strings.size() == 22);
    CHECK(m.observation_names.back() == "null");
    // Only beeping at the goal pays off.
    int paying = 0;
    for (int s = 0; s < m.num_states(); ++s)
        if (m.reward(s, 5) > 0) ++paying;
    CHECK(paying == 1);
    CHECK(m.max_reward() == 50.0);
}

TEST_CASE("near-discernible grid") {
    GridParams gp;
    const auto a = make_near_discernible_grid(gp);
    const auto b = make_near_discernible_grid(gp);
    CHECK_NOTHROW(a.validate(1e-9));
    CHECK(a.num_states() == gp.width * gp.height + 2);
    for (int s = 0; s < a.num_states(); ++s)
        for (int act = 0; act < a.num_actions(); ++act) {
            CHECK(a.reward(s, act) == b.reward(s, act));
            for (int sn = 0; sn < a.num_states(); ++sn) CHECK(a.transition(s, act, sn) == b.transition(s, act, sn));
        }

    gp.look_noise = 0.1;
    CHECK_NOTHROW(make_near_discernible_grid(gp).validate(1e-9));
    gp.look_noise = 1.0;
    CHECK_THROWS_AS(make_near_discernible_grid(gp), UsageError);
}

TEST_CASE("random models are valid and seeded") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RandomModelParams p;
        p.seed = seed;
        p.states = 4;
        p.sparsity = 0.4;
        const auto m = make_random_model(p);
        CHECK_NOTHROW(m.validate(1e-9));
        CHECK(make_random_model(p).reward(0, 0) == m.reward(0, 0));
    }
}
