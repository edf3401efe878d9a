#pragma once

#include "rvi/model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rvi {

/// The three-state, two-action, two-observation model with line-segment tau-simplices.
PomdpModel make_example3();

/// Ten-location maze, four moves plus declare, deterministic wall strings.
PomdpModel make_maze1(double discount = 0.95);

/// maze1 plus stay and a null observation, sensor misreads and move costs.
PomdpModel make_maze2(double discount = 0.95);

struct ElevatorParams {
    int patterns = 3;      ///< arrival patterns, 1..3
    int request_bits = 4;  ///< first n of pickup1, dropoff1, pickup2, dropoff2
    double discount = 0.95;
};

/// Two-floor elevator with a hidden arrival pattern.
PomdpModel make_elevator(const ElevatorParams& params = {});

/// 34-location office with a terminal state; look reads d/w/b/o strings.
PomdpModel make_office(double discount = 0.95);

struct RandomModelParams {
    std::uint64_t seed = 1;
    int states = 3;
    int actions = 2;
    int observations = 2;
    /// Probability that a transition or observation entry is forced to zero.
    double sparsity = 0.0;
    double discount = 0.95;
};

/// Random dense-ish model; every row stays stochastic.
PomdpModel make_random_model(const RandomModelParams& params);

struct GridParams {
    std::uint64_t seed = 7;
    int width = 3;
    int height = 2;
    double discount = 0.95;
    /// Probability that look reports a string one character off (when one exists).
    double look_noise = 0.0;
};

/**
 * Near-discernible grid: moves yield only a null observation, look reads the
 * string of local walls (optionally noisy), declare pays at the goal cell,
 * costs elsewhere, and ends the episode with a success or failure
 * observation. The seed places interior walls and the goal.
 */
PomdpModel make_near_discernible_grid(const GridParams& params);

} // namespace rvi
