#pragma once

#include "rvi/dp.hpp"
#include "rvi/rng.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

namespace rvi {

struct Lookahead {
    int action = -1;
    double value = 0.0; ///< r(b,a) + discount * sum_z P(z|b,a) V(tau(b,a,z)) for the chosen action
};

/// Greedy one-step lookahead against a vector set; ties go to the lowest action index.
Lookahead improving_action(const PomdpModel& model, const VectorSet& value, const Belief& b);
/// Same, reading each next belief from the family entry for (a, z).
Lookahead improving_action(const PomdpModel& model, const SimplexFamily& value, const Belief& b);

/// Q(s, a) of the fully observable MDP, from value iteration to a residual of `tolerance`.
Matrix mdp_q_values(const PomdpModel& model, double tolerance = 1e-8, int max_iterations = 100000);

/// Deterministic action selector over beliefs.
class Policy {
public:
    static Policy improving(std::shared_ptr<const PomdpModel> model, VectorSet value);
    static Policy improving(std::shared_ptr<const PomdpModel> model, SimplexFamily value);
    static Policy qmdp(const PomdpModel& model);

    int action(const Belief& b) const;
    std::string kind() const;

private:
    struct Improving {
        std::shared_ptr<const PomdpModel> model;
        std::variant<VectorSet, SimplexFamily> value;
    };
    struct Qmdp {
        Matrix q;
    };
    explicit Policy(std::variant<Improving, Qmdp> impl) : impl_(std::move(impl)) {}
    std::variant<Improving, Qmdp> impl_;
};

Policy qmdp_policy(const PomdpModel& model);

struct SimulationOptions {
    int trials = 1000;
    int horizon = 100;
    std::uint64_t seed = 1;
};

struct SimulationReport {
    int trials = 0;
    int horizon = 0;
    double mean = 0.0;
    double standard_error = 0.0;
    std::uint64_t seed = 0;
    double min_return = 0.0;
    double max_return = 0.0;
};

/**
 * Monte-Carlo discounted return from t = 0. Each trial draws its initial
 * belief from a flat Dirichlet and the hidden state from that belief, and
 * uses its own generator derived from (seed, trial).
 */
SimulationReport simulate(const PomdpModel& model, const Policy& policy, const SimulationOptions& options = {});

/// Fixed column order for the CSV form of a report.
std::string simulation_csv_header();
std::string simulation_csv_row(const SimulationReport& report);
std::string simulation_summary(const SimulationReport& report);

} // namespace rvi
