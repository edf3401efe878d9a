#include "rvi/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace rvi {

namespace {

constexpr double kNormalizerFloor = 1e-12;

/// sum_s b(s) T(s, a, .)
Vec predict(const PomdpModel& model, const Belief& b, int a) {
    const int n = model.num_states();
    Vec out(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
        const double w = b[static_cast<std::size_t>(s)];
        if (w == 0.0) continue;
        auto row = model.transition_row(s, a);
        for (int sn = 0; sn < n; ++sn) out[static_cast<std::size_t>(sn)] += w * row[static_cast<std::size_t>(sn)];
    }
    return out;
}

/// Unnormalized next belief for z and its total mass.
double condition(const PomdpModel& model, const Vec& predicted, int a, int z, Vec& out) {
    double total = 0.0;
    for (std::size_t sn = 0; sn < predicted.size(); ++sn) {
        out[sn] = predicted[sn] * model.observation(a, static_cast<int>(sn), z);
        total += out[sn];
    }
    return total;
}

template <class Evaluate>
Lookahead lookahead(const PomdpModel& model, const Belief& b, Evaluate evaluate) {
    if (!b.is_valid(1e-6)) throw UsageError("improving_action: invalid belief");
    Lookahead best{-1, -std::numeric_limits<double>::infinity()};
    Vec next(b.size());
    for (int a = 0; a < model.num_actions(); ++a) {
        double q = belief_reward(model, b, a);
        const Vec predicted = predict(model, b, a);
        for (int z = 0; z < model.num_observations(); ++z) {
            const double pz = condition(model, predicted, a, z, next);
            if (pz <= kNormalizerFloor) continue;
            Vec normalized = next;
            for (double& x : normalized) x /= pz;
            q += model.discount() * pz * evaluate(a, z, Belief(std::move(normalized)));
        }
        if (q > best.value) best = {a, q};
    }
    return best;
}

} // namespace

Lookahead improving_action(const PomdpModel& model, const VectorSet& value, const Belief& b) {
    if (value.empty()) throw UsageError("improving_action: empty value function");
    return lookahead(model, b, [&](int, int, const Belief& next) { return induced_value(value, next).value; });
}

Lookahead improving_action(const PomdpModel& model, const SimplexFamily& value, const Belief& b) {
    return lookahead(model, b, [&](int a, int z, const Belief& next) {
        const FamilyEntry* e = value.find(a, z);
        if (!e || e->vectors.empty())
            throw ModelError("next belief after (" + model.action_name(a) + ", " + model.observation_name(z) +
                             ") lies outside every simplex of the value function");
        return induced_value(e->vectors, next).value;
    });
}

Matrix mdp_q_values(const PomdpModel& model, double tolerance, int max_iterations) {
    const int n = model.num_states();
    const int m = model.num_actions();
    Matrix q(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
    Vec v(static_cast<std::size_t>(n), 0.0);
    for (int it = 0; it < max_iterations; ++it) {
        double change = 0.0;
        for (int s = 0; s < n; ++s)
            for (int a = 0; a < m; ++a) {
                auto row = model.transition_row(s, a);
                double future = 0.0;
                for (int sn = 0; sn < n; ++sn) future += row[static_cast<std::size_t>(sn)] * v[static_cast<std::size_t>(sn)];
                q(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) = model.reward(s, a) + model.discount() * future;
            }
        for (int s = 0; s < n; ++s) {
            const double* r = q.row(static_cast<std::size_t>(s));
            const double best = *std::max_element(r, r + m);
            change = std::max(change, std::abs(best - v[static_cast<std::size_t>(s)]));
            v[static_cast<std::size_t>(s)] = best;
        }
        if (change <= tolerance) break;
    }
    return q;
}

Policy Policy::improving(std::shared_ptr<const PomdpModel> model, VectorSet value) {
    if (value.empty()) throw UsageError("improving policy needs at least one vector");
    return Policy(Improving{std::move(model), std::move(value)});
}

Policy Policy::improving(std::shared_ptr<const PomdpModel> model, SimplexFamily value) {
    return Policy(Improving{std::move(model), std::move(value)});
}

Policy Policy::qmdp(const PomdpModel& model) { return Policy(Qmdp{mdp_q_values(model)}); }

Policy qmdp_policy(const PomdpModel& model) { return Policy::qmdp(model); }

int Policy::action(const Belief& b) const {
    if (const auto* imp = std::get_if<Improving>(&impl_))
        return std::visit([&](const auto& v) { return improving_action(*imp->model, v, b).action; }, imp->value);
    const Matrix& q = std::get<Qmdp>(impl_).q;
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < q.cols(); ++a) {
        double v = 0.0;
        for (std::size_t s = 0; s < q.rows(); ++s) v += b[s] * q(s, a);
        if (v > best_value) {
            best_value = v;
            best = static_cast<int>(a);
        }
    }
    return best;
}

std::string Policy::kind() const { return std::holds_alternative<Improving>(impl_) ? "improving" : "qmdp"; }

SimulationReport simulate(const PomdpModel& model, const Policy& policy, const SimulationOptions& options) {
    if (options.trials <= 0 || options.horizon <= 0) throw UsageError("trials and horizon must be positive");
    const int n = model.num_states();
    SimulationReport report;
    report.trials = options.trials;
    report.horizon = options.horizon;
    report.seed = options.seed;
    report.min_return = std::numeric_limits<double>::infinity();
    report.max_return = -std::numeric_limits<double>::infinity();
    std::vector<double> returns;
    returns.reserve(static_cast<std::size_t>(options.trials));
    Vec next(static_cast<std::size_t>(n));
    for (int trial = 0; trial < options.trials; ++trial) {
        Rng rng(options.seed, static_cast<std::uint64_t>(trial));
        Belief b(rng.dirichlet(n));
        int s = rng.categorical(b.probs());
        double ret = 0.0, weight = 1.0;
        for (int t = 0; t < options.horizon; ++t) {
            const int a = policy.action(b);
            ret += weight * model.reward(s, a);
            weight *= model.discount();
            const int sn = rng.categorical(model.transition_row(s, a));
            const int z = rng.categorical(model.observation_row(a, sn));
            const Vec predicted = predict(model, b, a);
            const double pz = condition(model, predicted, a, z, next);
            if (pz > kNormalizerFloor) {
                for (double& x : next) x /= pz;
                b = Belief(next);
            } else {
                // The sampled observation had (numerically) zero probability under the belief.
                b = Belief(predicted);
            }
            s = sn;
        }
        returns.push_back(ret);
        report.min_return = std::min(report.min_return, ret);
        report.max_return = std::max(report.max_return, ret);
    }
    const double k = options.trials;
    for (double r : returns) report.mean += r;
    report.mean /= k;
    double var = 0.0;
    for (double r : returns) var += (r - report.mean) * (r - report.mean);
    var = options.trials > 1 ? var / (k - 1.0) : 0.0;
    report.standard_error = std::sqrt(var / k);
    return report;
}

std::string simulation_csv_header() { return "trials,horizon,mean,standard_error,seed,min_return,max_return"; }

std::string simulation_csv_row(const SimulationReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%llu,%.10g,%.10g", r.trials, r.horizon, r.mean, r.standard_error,
                  static_cast<unsigned long long>(r.seed), r.min_return, r.max_return);
    return buf;
}

std::string simulation_summary(const SimulationReport& r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "mean discounted return %.6f +/- %.6f (s.e.) over %d trials of %d steps, seed %llu",
                  r.mean, r.standard_error, r.trials, r.horizon, static_cast<unsigned long long>(r.seed));
    return buf;
}

} // namespace rvi
