#include "rvi/generators.hpp"

#include "rvi/rng.hpp"

#include <array>
#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>

namespace rvi {

PomdpModel make_example3() {
    PomdpModel m(3, 2, 2, 0.95);
    m.state_names = {"s1", "s2", "s3"};
    m.action_names = {"a1", "a2"};
    m.observation_names = {"z1", "z2"};
    // Every state moves to s1 or s2 with the same probability (p_i1 = p_i2), so the
    // first two rows of every transformational matrix coincide.
    const std::array<std::array<double, 3>, 2> p = {{{0.5, 0.4, 0.1}, {0.45, 0.3, 0.2}}};
    for (int a = 0; a < 2; ++a) {
        for (int s = 0; s < 3; ++s) {
            const double q = p[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)];
            m.set_transition(s, a, 0, q);
            m.set_transition(s, a, 1, q);
            m.set_transition(s, a, 2, 1.0 - 2.0 * q);
        }
        for (int sn = 0; sn < 3; ++sn) {
            m.set_observation(a, sn, 0, 0.5);
            m.set_observation(a, sn, 1, 0.5);
        }
    }
    m.validate();
    return m;
}

namespace {

// Canonical ten-location maze. Bottom row 1..6 left to right; 7 and 9 stack
// above 3, 8 and 10 above 4; walls separate 7|8 and 9|10.
enum Direction { east = 0, south = 1, west = 2, north = 3 };

struct Maze {
    std::vector<std::array<int, 4>> neighbor; // -1 when blocked
};

Maze canonical_maze() {
    const std::array<std::pair<int, int>, 10> cell = {
        {{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}, {5, 0}, {2, 1}, {3, 1}, {2, 2}, {3, 2}}};
    std::map<std::pair<int, int>, int> at;
    for (int i = 0; i < 10; ++i) at[cell[static_cast<std::size_t>(i)]] = i;
    auto walled = [](int a, int b) {
        auto is = [&](int x, int y) { return (a == x && b == y) || (a == y && b == x); };
        return is(6, 7) || is(8, 9);
    };
    Maze maze;
    const std::array<std::pair<int, int>, 4> step = {{{1, 0}, {0, -1}, {-1, 0}, {0, 1}}};
    for (int i = 0; i < 10; ++i) {
        std::array<int, 4> n{};
        for (int d = 0; d < 4; ++d) {
            auto [x, y] = cell[static_cast<std::size_t>(i)];
            auto it = at.find({x + step[static_cast<std::size_t>(d)].first, y + step[static_cast<std::size_t>(d)].second});
            int j = it == at.end() ? -1 : it->second;
            n[static_cast<std::size_t>(d)] = (j >= 0 && !walled(i, j)) ? j : -1;
        }
        maze.neighbor.push_back(n);
    }
    return maze;
}

// Intended 0.8, no effect 0.1, overshoot by two cells 0.1. A blocked first
// step leaves the agent in place; a blocked second step stops after one.
template <class Neighbors>
void set_move(PomdpModel& m, const Neighbors& neighbor, int s, int a, int d) {
    const int first = neighbor[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
    if (first < 0) {
        m.set_transition(s, a, s, 1.0);
        return;
    }
    const int second = neighbor[static_cast<std::size_t>(first)][static_cast<std::size_t>(d)];
    m.set_transition(s, a, s, 0.1);
    if (second < 0) {
        m.set_transition(s, a, first, 0.9);
    } else {
        m.set_transition(s, a, first, 0.8);
        m.set_transition(s, a, second, 0.1);
    }
}

const std::vector<std::string> kMazeStrings = {"owww", "owow", "owoo", "wwow", "wowo", "woww"};

int maze_string_index(const Maze& maze, int s) {
    std::string str;
    for (int d = 0; d < 4; ++d) str += maze.neighbor[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] >= 0 ? 'o' : 'w';
    for (std::size_t i = 0; i < kMazeStrings.size(); ++i)
        if (kMazeStrings[i] == str) return static_cast<int>(i);
    throw std::logic_error("maze layout produced unexpected string " + str);
}

std::vector<std::string> maze_state_names() {
    std::vector<std::string> names;
    for (int i = 1; i <= 10; ++i) names.push_back("loc" + std::to_string(i));
    return names;
}

} // namespace

PomdpModel make_maze1(double discount) {
    const Maze maze = canonical_maze();
    PomdpModel m(10, 5, 6, discount);
    m.state_names = maze_state_names();
    m.action_names = {"east", "south", "west", "north", "declare"};
    m.observation_names = kMazeStrings;
    for (int s = 0; s < 10; ++s) {
        for (int d = 0; d < 4; ++d) set_move(m, maze.neighbor, s, d, d);
        m.set_transition(s, 4, s, 1.0);
    }
    for (int a = 0; a < 5; ++a)
        for (int s = 0; s < 10; ++s) m.set_observation(a, s, maze_string_index(maze, s), 1.0);
    m.set_reward(8, 4, 1.0);
    m.set_reward(9, 4, -1.0);
    m.validate();
    return m;
}

PomdpModel make_maze2(double discount) {
    const Maze maze = canonical_maze();
    PomdpModel m(10, 6, 7, discount);
    m.state_names = maze_state_names();
    m.action_names = {"east", "south", "west", "north", "stay", "declare"};
    m.observation_names = kMazeStrings;
    m.observation_names.push_back("null");
    const int null_obs = 6;
    const int owow = 1, owww = 0, woww = 5, wowo = 4;
    for (int s = 0; s < 10; ++s) {
        for (int d = 0; d < 4; ++d) set_move(m, maze.neighbor, s, d, d);
        m.set_transition(s, 4, s, 1.0);
        m.set_transition(s, 5, s, 1.0);
    }
    for (int sn = 0; sn < 10; ++sn) {
        const int ideal = maze_string_index(maze, sn);
        for (int a = 0; a < 4; ++a) {
            if (ideal == owow) {
                m.set_observation(a, sn, owow, 0.9);
                m.set_observation(a, sn, owww, 0.1);
            } else if (ideal == woww) {
                m.set_observation(a, sn, woww, 0.9);
                m.set_observation(a, sn, wowo, 0.1);
            } else {
                m.set_observation(a, sn, ideal, 1.0);
            }
            m.set_reward(sn, a, -2.0);
        }
        m.set_observation(4, sn, null_obs, 0.9);
        m.set_observation(4, sn, ideal, 0.1);
        m.set_observation(5, sn, null_obs, 1.0);
    }
    m.set_reward(8, 5, 1.0);
    m.set_reward(9, 5, -1.0);
    m.validate();
    return m;
}

PomdpModel make_elevator(const ElevatorParams& params) {
    if (params.patterns < 1 || params.patterns > 3) throw UsageError("elevator: patterns must be 1..3");
    if (params.request_bits < 0 || params.request_bits > 4) throw UsageError("elevator: request_bits must be 0..4");
    const int P = params.patterns;
    const int R = params.request_bits;
    const int requests = 1 << R;
    const int S = P * requests * 2;
    const int Z = requests * 2;
    enum { up = 0, down = 1, stay = 2 };
    PomdpModel m(S, 3, Z, params.discount);
    m.action_names = {"go.up", "go.down", "stay"};

    // Request bit layout: 0 pickup floor 1, 1 dropoff floor 1, 2 pickup floor 2, 3 dropoff floor 2.
    auto has = [&](int bit) { return bit < R; };
    auto pickup_bit = [](int floor) { return floor == 0 ? 0 : 2; };
    auto dropoff_bit = [](int floor) { return floor == 0 ? 1 : 3; };
    // Pick-up arrival probability per pattern and floor: high/low, low/high, equal.
    const double arrival[3][2] = {{0.6, 0.1}, {0.1, 0.6}, {0.3, 0.3}};
    auto state_index = [&](int p, int req, int pos) { return (p * requests + req) * 2 + pos; };
    static const char* pattern_names[3] = {"A1", "A2", "A3"};
    m.state_names.resize(static_cast<std::size_t>(S));
    for (int p = 0; p < P; ++p)
        for (int req = 0; req < requests; ++req)
            for (int pos = 0; pos < 2; ++pos) {
                std::string name = std::string(pattern_names[p]) + "_r";
                for (int b = 0; b < R; ++b) name += ((req >> b) & 1) ? '1' : '0';
                name += pos == 0 ? "_f1" : "_f2";
                m.state_names[static_cast<std::size_t>(state_index(p, req, pos))] = name;
            }
    for (int z = 0; z < Z; ++z) {
        std::string name = "r";
        for (int b = 0; b < R; ++b) name += ((z >> 1 >> b) & 1) ? '1' : '0';
        name += (z & 1) ? "_f2" : "_f1";
        m.observation_names.push_back(name);
    }

    for (int p = 0; p < P; ++p) {
        for (int req = 0; req < requests; ++req) {
            for (int pos = 0; pos < 2; ++pos) {
                const int s = state_index(p, req, pos);
                for (int a = 0; a < 3; ++a) {
                    int next_req = req;
                    int next_pos = pos;
                    int unfulfilled = 0;
                    for (int b = 0; b < R; ++b) unfulfilled += (req >> b) & 1;
                    if (a == up && pos == 0) next_pos = 1;
                    if (a == down && pos == 1) next_pos = 0;
                    if (a == stay) {
                        const int pb = pickup_bit(pos);
                        const int db = dropoff_bit(pos);
                        if (has(pb) && ((req >> pb) & 1)) {
                            next_req &= ~(1 << pb);
                            --unfulfilled;
                            // Boarding passengers ride to the other floor.
                            const int other_drop = dropoff_bit(1 - pos);
                            if (has(other_drop)) next_req |= 1 << other_drop;
                        }
                        if (has(db) && ((req >> db) & 1)) {
                            next_req &= ~(1 << db);
                            --unfulfilled;
                        }
                    }
                    m.set_reward(s, a, -0.25 * unfulfilled);

                    // New pick-up requests arrive according to the current pattern.
                    std::vector<std::pair<int, double>> outcomes = {{next_req, 1.0}};
                    for (int floor = 0; floor < 2; ++floor) {
                        const int pb = pickup_bit(floor);
                        if (!has(pb)) continue;
                        const double q = arrival[p][floor];
                        std::vector<std::pair<int, double>> grown;
                        for (auto [r, w] : outcomes) {
                            if ((r >> pb) & 1) {
                                grown.push_back({r, w});
                            } else {
                                grown.push_back({r, w * (1.0 - q)});
                                grown.push_back({r | (1 << pb), w * q});
                            }
                        }
                        outcomes = std::move(grown);
                    }
                    for (int pn = 0; pn < P; ++pn) {
                        const double stay_p = P == 1 ? 1.0 : 0.90;
                        const double move_p = P == 1 ? 0.0 : 0.10 / (P - 1);
                        const double pp = pn == p ? stay_p : move_p;
                        for (auto [r, w] : outcomes) {
                            const int sn = state_index(pn, r, next_pos);
                            m.set_transition(s, a, sn, m.transition(s, a, sn) + pp * w);
                        }
                    }
                }
            }
        }
    }
    for (int a = 0; a < 3; ++a)
        for (int p = 0; p < P; ++p)
            for (int req = 0; req < requests; ++req)
                for (int pos = 0; pos < 2; ++pos) m.set_observation(a, state_index(p, req, pos), req * 2 + pos, 1.0);
    m.validate();
    return m;
}

namespace {

// Ring corridor of 34 cells around a 12 x 7 block, numbered clockwise from the
// top-left corner: 1..12 along the top, 13..18 down the right side, 19..29
// along the bottom, 30..34 up the left side. Each string gives, for east,
// south, west, north, a door (d), plain wall (w), display board (b) or open
// corridor (o).
const std::array<const char*, 34> kOfficeStrings = {
    "ooww", "obow", "odow", "owob", "obod", "owod", "owob", "owod", "owow", "owow", "obod", "woob",
    "bowo", "bobo", "dodo", "wobo", "dobo", "wdoo", "obow", "odod", "obob", "owod", "owob", "owod",
    "obow", "odob", "obow", "obob", "oddo", "wodo", "wowo", "dowo", "wodo", "bodo"};

std::vector<std::pair<int, int>> office_cells() {
    std::vector<std::pair<int, int>> cells;
    for (int x = 0; x < 12; ++x) cells.emplace_back(x, 6);
    for (int y = 5; y >= 0; --y) cells.emplace_back(11, y);
    for (int x = 10; x >= 0; --x) cells.emplace_back(x, 0);
    for (int y = 1; y <= 5; ++y) cells.emplace_back(0, y);
    return cells;
}

std::vector<std::array<int, 4>> grid_neighbors(const std::vector<std::pair<int, int>>& cells,
                                               const std::vector<std::pair<int, int>>& walls = {}) {
    const std::array<std::pair<int, int>, 4> step = {{{1, 0}, {0, -1}, {-1, 0}, {0, 1}}};
    std::map<std::pair<int, int>, int> at;
    for (std::size_t i = 0; i < cells.size(); ++i) at[cells[i]] = static_cast<int>(i);
    auto walled = [&](int a, int b) {
        return std::find(walls.begin(), walls.end(), std::pair{std::min(a, b), std::max(a, b)}) != walls.end();
    };
    std::vector<std::array<int, 4>> out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        std::array<int, 4> n{};
        for (std::size_t d = 0; d < 4; ++d) {
            auto it = at.find({cells[i].first + step[d].first, cells[i].second + step[d].second});
            const int j = it == at.end() ? -1 : it->second;
            n[d] = (j >= 0 && !walled(static_cast<int>(i), j)) ? j : -1;
        }
        out.push_back(n);
    }
    return out;
}

/**
 * Look observations: the ideal string with p_ideal, null with p_null, and
 * p_off split evenly over strings ideal elsewhere that differ from this one in
 * exactly one character. Mass with nowhere to go stays on the ideal string.
 */
void set_look(PomdpModel& m, int look, const std::vector<std::string>& ideal, const std::vector<std::string>& names,
              int null_obs, double p_null, double p_off) {
    auto index_of = [&](const std::string& str) {
        return static_cast<int>(std::find(names.begin(), names.end(), str) - names.begin());
    };
    for (std::size_t s = 0; s < ideal.size(); ++s) {
        std::vector<int> near;
        for (std::size_t z = 0; z < names.size(); ++z) {
            if (static_cast<int>(z) == null_obs || names[z].size() != ideal[s].size()) continue;
            int diff = 0;
            for (std::size_t c = 0; c < ideal[s].size(); ++c) diff += names[z][c] != ideal[s][c];
            if (diff == 1) near.push_back(static_cast<int>(z));
        }
        double rest = 1.0;
        if (p_null > 0.0) {
            m.set_observation(look, static_cast<int>(s), null_obs, p_null);
            rest -= p_null;
        }
        for (int z : near) {
            m.set_observation(look, static_cast<int>(s), z, p_off / static_cast<double>(near.size()));
            rest -= p_off / static_cast<double>(near.size());
        }
        m.set_observation(look, static_cast<int>(s), index_of(ideal[s]), rest);
    }
}

std::vector<std::string> distinct_in_order(const std::vector<std::string>& strings) {
    std::vector<std::string> out;
    for (const auto& s : strings)
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
    return out;
}

} // namespace

PomdpModel make_office(double discount) {
    const auto cells = office_cells();
    const auto neighbor = grid_neighbors(cells);
    const int locations = 34, terminal = 34, goal = 21;
    std::vector<std::string> ideal(kOfficeStrings.begin(), kOfficeStrings.end());
    for (int s = 0; s < locations; ++s)
        for (std::size_t d = 0; d < 4; ++d)
            if ((neighbor[static_cast<std::size_t>(s)][d] >= 0) != (ideal[static_cast<std::size_t>(s)][d] == 'o'))
                throw std::logic_error("office strings disagree with the corridor layout");
    auto names = distinct_in_order(ideal);
    const int null_obs = static_cast<int>(names.size());
    names.push_back("null");

    PomdpModel m(35, 6, static_cast<int>(names.size()), discount);
    for (int s = 1; s <= locations; ++s) m.state_names.push_back("loc" + std::to_string(s));
    m.state_names.push_back("terminal");
    m.action_names = {"east", "south", "west", "north", "look", "beep"};
    m.observation_names = names;
    const int look = 4, beep = 5;
    for (int s = 0; s < locations; ++s) {
        for (int d = 0; d < 4; ++d) {
            set_move(m, neighbor, s, d, d);
            if (neighbor[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] < 0) m.set_reward(s, d, -2.0);
        }
        m.set_transition(s, look, s, 1.0);
        m.set_transition(s, beep, terminal, 1.0);
        m.set_reward(s, look, -1.0);
        m.set_reward(s, beep, s == goal ? 50.0 : -10.0);
    }
    for (int a = 0; a < 6; ++a) {
        m.set_transition(terminal, a, terminal, 1.0);
        for (int s = 0; s <= terminal; ++s)
            if (a != look || s == terminal) m.set_observation(a, s, null_obs, 1.0);
    }
    set_look(m, look, ideal, names, null_obs, 0.05, 0.05);
    m.validate();
    return m;
}

PomdpModel make_near_discernible_grid(const GridParams& params) {
    if (params.width < 1 || params.height < 1 || params.width * params.height < 2)
        throw UsageError("grid needs at least two cells");
    if (params.look_noise < 0.0 || params.look_noise >= 1.0) throw UsageError("look noise must be in [0, 1)");
    Rng rng(params.seed);
    std::vector<std::pair<int, int>> cells;
    for (int y = params.height - 1; y >= 0; --y)
        for (int x = 0; x < params.width; ++x) cells.emplace_back(x, y);
    const int n = static_cast<int>(cells.size());

    // Interior walls: each adjacency is walled with probability 1/4, as long as
    // the cells stay connected.
    std::vector<std::pair<int, int>> walls;
    const auto open = grid_neighbors(cells);
    for (int i = 0; i < n; ++i)
        for (int d : {0, 1}) {
            const int j = open[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
            if (j < 0 || rng.uniform() >= 0.25) continue;
            walls.emplace_back(std::min(i, j), std::max(i, j));
            const auto trial = grid_neighbors(cells, walls);
            std::vector<char> seen(static_cast<std::size_t>(n), 0);
            std::queue<int> q;
            q.push(0);
            seen[0] = 1;
            int reached = 1;
            while (!q.empty()) {
                const int c = q.front();
                q.pop();
                for (int k : trial[static_cast<std::size_t>(c)])
                    if (k >= 0 && !seen[static_cast<std::size_t>(k)]) {
                        seen[static_cast<std::size_t>(k)] = 1;
                        ++reached;
                        q.push(k);
                    }
            }
            if (reached < n) walls.pop_back();
        }
    const auto neighbor = grid_neighbors(cells, walls);
    const int goal = rng.index(n);
    // Declaring ends the episode in one of two absorbing states, so the
    // outcome is observed.
    const int won = n, lost = n + 1;

    std::vector<std::string> ideal;
    for (const auto& nb : neighbor) {
        std::string str;
        for (int k : nb) str += k >= 0 ? 'o' : 'w';
        ideal.push_back(str);
    }
    auto names = distinct_in_order(ideal);
    const int null_obs = static_cast<int>(names.size());
    const int success = null_obs + 1, failure = null_obs + 2;
    names.insert(names.end(), {"null", "success", "failure"});

    PomdpModel m(n + 2, 6, static_cast<int>(names.size()), params.discount);
    for (int s = 0; s < n; ++s)
        m.state_names.push_back("c" + std::to_string(cells[static_cast<std::size_t>(s)].first) + "_" +
                                std::to_string(cells[static_cast<std::size_t>(s)].second));
    m.state_names.insert(m.state_names.end(), {"won", "lost"});
    m.action_names = {"east", "south", "west", "north", "look", "declare"};
    m.observation_names = names;
    const int look = 4, declare = 5;
    for (int s = 0; s < n; ++s) {
        for (int d = 0; d < 4; ++d) {
            set_move(m, neighbor, s, d, d);
            if (neighbor[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)] < 0) m.set_reward(s, d, -1.0);
        }
        m.set_transition(s, look, s, 1.0);
        m.set_transition(s, declare, s == goal ? won : lost, 1.0);
        m.set_reward(s, look, -0.5);
        m.set_reward(s, declare, s == goal ? 10.0 : -10.0);
    }
    for (int a = 0; a < 6; ++a) {
        for (int end : {won, lost}) {
            m.set_transition(end, a, end, 1.0);
            m.set_observation(a, end, a == declare ? (end == won ? success : failure) : null_obs, 1.0);
        }
        if (a != look)
            for (int s = 0; s < n; ++s) m.set_observation(a, s, null_obs, 1.0);
    }
    set_look(m, look, ideal, names, null_obs, 0.0, params.look_noise);
    m.validate();
    return m;
}

PomdpModel make_random_model(const RandomModelParams& params) {
    Rng rng(params.seed);
    PomdpModel m(params.states, params.actions, params.observations, params.discount);
    auto fill_row = [&](int size, auto&& set) {
        std::vector<double> w(static_cast<std::size_t>(size));
        double total = 0.0;
        for (double& x : w) {
            x = rng.uniform() < params.sparsity ? 0.0 : rng.exponential();
            total += x;
        }
        if (total == 0.0) {
            w[static_cast<std::size_t>(rng.index(size))] = 1.0;
            total = 1.0;
        }
        double assigned = 0.0;
        int last = -1;
        for (int i = 0; i < size; ++i)
            if (w[static_cast<std::size_t>(i)] > 0.0) last = i;
        for (int i = 0; i < size; ++i) {
            double p = w[static_cast<std::size_t>(i)] / total;
            if (i == last) p = 1.0 - assigned;
            assigned += p;
            set(i, p);
        }
    };
    for (int a = 0; a < params.actions; ++a)
        for (int s = 0; s < params.states; ++s)
            fill_row(params.states, [&](int sn, double p) { m.set_transition(s, a, sn, p); });
    for (int a = 0; a < params.actions; ++a)
        for (int sn = 0; sn < params.states; ++sn)
            fill_row(params.observations, [&](int z, double p) { m.set_observation(a, sn, z, p); });
    for (int s = 0; s < params.states; ++s)
        for (int a = 0; a < params.actions; ++a) m.set_reward(s, a, rng.uniform() * 2.0 - 1.0);
    m.validate();
    return m;
}

} // namespace rvi
