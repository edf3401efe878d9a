#pragma once

#include "rvi/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rvi {

/**
 * Finite POMDP: states, actions, observations, transition P(s'|s,a),
 * observation P(z|s',a), reward r(s,a) and discount in [0, 1).
 *
 * Tables are filled through the setters and checked with validate(). Once a
 * model is handed to the analysis and solver functions it is only read.
 */
class PomdpModel {
public:
    PomdpModel() = default;
    PomdpModel(int num_states, int num_actions, int num_observations, double discount);

    int num_states() const noexcept { return num_states_; }
    int num_actions() const noexcept { return num_actions_; }
    int num_observations() const noexcept { return num_observations_; }
    double discount() const noexcept { return discount_; }
    void set_discount(double discount) { discount_ = discount; }

    double transition(int s, int a, int s_next) const {
        return transition_[(static_cast<std::size_t>(a) * num_states_ + s) * num_states_ + s_next];
    }
    double observation(int a, int s_next, int z) const {
        return observation_[(static_cast<std::size_t>(a) * num_states_ + s_next) * num_observations_ + z];
    }
    double reward(int s, int a) const { return reward_[static_cast<std::size_t>(s) * num_actions_ + a]; }

    void set_transition(int s, int a, int s_next, double p);
    void set_observation(int a, int s_next, int z, double p);
    void set_reward(int s, int a, double r);

    /// Row of P(.|s,a) over next states.
    std::span<const double> transition_row(int s, int a) const {
        return {transition_.data() + (static_cast<std::size_t>(a) * num_states_ + s) * num_states_,
                static_cast<std::size_t>(num_states_)};
    }
    /// Row of P(.|s',a) over observations.
    std::span<const double> observation_row(int a, int s_next) const {
        return {observation_.data() +
                    (static_cast<std::size_t>(a) * num_states_ + s_next) * num_observations_,
                static_cast<std::size_t>(num_observations_)};
    }

    /// Throws ModelError listing every offending row when an invariant fails.
    void validate(double tolerance = 1e-9) const;

    double min_reward() const;
    double max_reward() const;

    /// True when P(z|s',a) does not depend on a.
    bool observations_action_independent() const;

    // Optional symbolic names; empty vectors mean "use indices".
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::vector<std::string> observation_names;

    std::string state_name(int s) const;
    std::string action_name(int a) const;
    std::string observation_name(int z) const;

    bool operator==(const PomdpModel&) const = default;

private:
    void check_indices(int s, int a, int z) const;

    int num_states_ = 0;
    int num_actions_ = 0;
    int num_observations_ = 0;
    double discount_ = 0.0;
    std::vector<double> transition_;  // [a][s][s']
    std::vector<double> observation_; // [a][s'][z]
    std::vector<double> reward_;      // [s][a]
};

/// A probability distribution over states.
class Belief {
public:
    Belief() = default;
    explicit Belief(Vec probs) : probs_(std::move(probs)) {}

    static Belief unit(int num_states, int s);
    static Belief uniform(int num_states);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    const Vec& probs() const noexcept { return probs_; }
    std::span<const double> values() const noexcept { return probs_; }

    /// Entries >= -tolerance and sum within tolerance of 1.
    bool is_valid(double tolerance = 1e-9) const;

    bool operator==(const Belief&) const = default;

private:
    Vec probs_;
};

double dot(std::span<const double> a, std::span<const double> b);

/// Ordered sequence of (action, observation) pairs, length >= 1.
struct History {
    std::vector<ActionObservation> pairs;

    std::size_t length() const noexcept { return pairs.size(); }
    /// This history followed by one more pair.
    History extended(ActionObservation pair) const;
    /// True when `other` is this history plus exactly one pair.
    bool is_one_step_prefix_of(const History& other) const;

    auto operator<=>(const History&) const = default;
};

std::string to_string(const History& h);

/// States that can emit z after action a: {s' : P(z|s',a) > 0}.
struct ObservationSupport {
    ActionObservation pair;
    std::vector<int> states;
};

/// What generated a simplex basis.
using SimplexTag = std::variant<std::monostate, ActionObservation, History, ObservationSupport>;

/// A finite list of beliefs whose convex hull is a belief simplex.
struct SimplexBasis {
    std::vector<Belief> points;
    SimplexTag tag;

    bool empty() const noexcept { return points.empty(); }
    std::size_t size() const noexcept { return points.size(); }
};

/// Unit vectors of the whole state space; the hull is the belief space.
SimplexBasis full_space_basis(int num_states);

/// P(s',z|s,a) as a square matrix with entry (s', s).
struct TransformationalMatrix {
    ActionObservation pair;
    Matrix entries;
};

struct DegeneracyResult {
    bool degenerate = false;
    int rank = 0;
};

struct PairProperness {
    ActionObservation pair;
    bool degenerate = false;
    int rank = 0;
};

/// Per-pair degeneracy plus the overall verdict. `proper` is true iff every
/// transformational matrix is degenerate (the operational criterion for the
/// reachable set being a strict subset of the belief space).
struct PropernessReport {
    std::vector<PairProperness> pairs;
    bool proper = false;
};

struct PairInformativeness {
    ActionObservation pair;
    int support_size = 0;
};

struct InformativenessReport {
    std::vector<PairInformativeness> pairs;
    int max_support_size = 0;
    int num_states = 0;
};

// Belief calculus

double observation_prob(const PomdpModel& model, const Belief& b, int a, int z);
double belief_reward(const PomdpModel& model, const Belief& b, int a);
/// Bayes update; std::nullopt when P(z|b,a) = 0.
std::optional<Belief> belief_update(const PomdpModel& model, const Belief& b, int a, int z);

// Structure analysis

TransformationalMatrix transformational_matrix(const PomdpModel& model, int a, int z);
/// Rank by row-echelon elimination with pivots below rel_tol * max|entry| treated as zero.
DegeneracyResult is_degenerate(const TransformationalMatrix& m, double rel_tol = 1e-9);
PropernessReport analyze_properness(const PomdpModel& model, double rel_tol = 1e-9);

SimplexBasis tau_simplex_basis(const PomdpModel& model, int a, int z);
SimplexBasis history_simplex_basis(const PomdpModel& model, const History& h);

ObservationSupport observation_support(const PomdpModel& model, int a, int z);
InformativenessReport informativeness_report(const PomdpModel& model);
SimplexBasis phi_simplex_basis(const PomdpModel& model, int a, int z);

/**
 * Convex-combination weights expressing `point` over `points`, found with a
 * feasibility LP. std::nullopt when the point lies outside their hull.
 */
std::optional<Vec> hull_coefficients(const Belief& point, std::span<const Belief> points,
                                     double tolerance = 1e-9);

/// Drops every point that is a convex combination of the remaining ones.
SimplexBasis minimal_basis(const SimplexBasis& basis, double tolerance = 1e-9);

} // namespace rvi
