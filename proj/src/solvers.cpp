#include "rvi/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace rvi {

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
public:
    double seconds() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

private:
    Clock::time_point start_ = Clock::now();
};

VectorSet constant_set(int num_states, double value) {
    VectorSet v;
    v.vectors.push_back({Vec(static_cast<std::size_t>(num_states), value), -1, {}, std::nullopt});
    return v;
}

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

bool pair_realizable(const PomdpModel& model, int a, int z) {
    for (int sn = 0; sn < model.num_states(); ++sn) {
        if (model.observation(a, sn, z) <= 0.0) continue;
        for (int s = 0; s < model.num_states(); ++s)
            if (model.transition(s, a, sn) > 0.0) return true;
    }
    return false;
}

double threshold_for(const PomdpModel& model, const SolveConfig& config, StoppingCriterion fallback) {
    const double loose = loose_threshold(config.epsilon, model.discount());
    const double strict = strict_threshold(config.epsilon, model.discount(), model.num_observations());
    if (model.discount() * model.num_observations() >= 1.0 && strict > loose)
        throw std::logic_error("strict stopping threshold exceeds the loose one");
    const auto c = config.criterion == StoppingCriterion::automatic ? fallback : config.criterion;
    return c == StoppingCriterion::strict ? strict : loose;
}

IterationStats make_row(int iteration, const DpUpdateStats& dp, const PruneStats& residual_lps, double residual,
                        double seconds) {
    return {iteration, dp.region, dp.enumerated, dp.kept, dp.lp_count + residual_lps.lp_count, residual, seconds};
}

bool past_deadline(const SolveConfig& config, const Stopwatch& clock) {
    return config.deadline_seconds > 0.0 && clock.seconds() >= config.deadline_seconds;
}

/**
 * Shared loop for vi/ssvi/infovi. `State` is a VectorSet or a SimplexFamily;
 * `step` computes the next state and fills the stats, `residual` compares two
 * states. On convergence the previous state is returned.
 */
template <class State, class Step, class Residual>
std::pair<State, Termination> iterate(const SolveConfig& config, double threshold, State current, Step step,
                                      Residual residual, SolveResult& result) {
    Stopwatch clock;
    for (int it = 1; it <= config.max_iterations; ++it) {
        DpUpdateStats dp;
        State next;
        try {
            next = step(current, dp);
        } catch (const ResourceError&) {
            return {std::move(current), Termination::resource_abort};
        }
        PruneStats ps;
        const double r = residual(next, current, ps);
        result.stats.push_back(make_row(it, dp, ps, r, clock.seconds()));
        result.residual = r;
        if (r <= threshold) return {std::move(current), Termination::residual_met};
        current = std::move(next);
        if (past_deadline(config, clock)) break;
    }
    return {std::move(current), Termination::iteration_cap};
}

} // namespace

std::string to_string(Termination t) {
    switch (t) {
    case Termination::residual_met: return "residual-met";
    case Termination::iteration_cap: return "iteration-cap";
    case Termination::all_information_rich: return "spvi-all-information-rich";
    case Termination::resource_abort: return "resource-abort";
    case Termination::no_expansion: return "spvi-no-expansion";
    }
    return "unknown";
}

void SolveConfig::validate() const {
    if (!(epsilon > 0.0)) throw UsageError("epsilon must be positive");
    if (max_iterations <= 0) throw UsageError("max_iterations must be positive");
    if (dp.enumeration_cap <= 0) throw UsageError("enumeration cap must be positive");
    if (deadline_seconds < 0.0) throw UsageError("deadline must be non-negative");
}

double loose_threshold(double epsilon, double discount) {
    if (discount < 1e-9) return 0.0;
    return epsilon * (1.0 - discount) / (2.0 * discount);
}

double strict_threshold(double epsilon, double discount, int num_observations) {
    if (discount < 1e-9) return 0.0;
    return epsilon * (1.0 - discount) / (2.0 * discount * discount * num_observations);
}

SolveResult solve_vi(const PomdpModel& model, const SolveConfig& config) {
    config.validate();
    SolveResult result;
    result.threshold = threshold_for(model, config, StoppingCriterion::loose);
    const int n = model.num_states();
    auto [v, why] = iterate(
        config, result.threshold, constant_set(n, 0.0),
        [&](const VectorSet& cur, DpUpdateStats& st) { return dp_update_space(model, cur, config.dp, &st); },
        [&](const VectorSet& a, const VectorSet& b, PruneStats& ps) { return bellman_residual(a, b, n, &ps); },
        result);
    result.vectors = std::move(v);
    result.termination = why;
    return result;
}

SolveResult solve_ssvi(const PomdpModel& model, const SolveConfig& config) {
    config.validate();
    SolveResult result;
    result.threshold = threshold_for(model, config, StoppingCriterion::strict);
    const VectorSet zero = constant_set(model.num_states(), 0.0);
    if (config.mode == UpdateMode::collective) {
        const auto bases = tau_bases(model, config.minimize_bases);
        if (bases.empty()) throw ModelError("no realizable action-observation pair");
        auto [v, why] = iterate(
            config, result.threshold, zero,
            [&](const VectorSet& cur, DpUpdateStats& st) {
                return dp_update_subset_collective(model, cur, bases, config.dp, &st);
            },
            [&](const VectorSet& a, const VectorSet& b, PruneStats& ps) { return bellman_residual(a, b, bases, &ps); },
            result);
        result.vectors = std::move(v);
        result.termination = why;
        return result;
    }
    auto [f, why] = iterate(
        config, result.threshold, make_tau_family(model, zero, config.minimize_bases),
        [&](const SimplexFamily& cur, DpUpdateStats& st) {
            return dp_update_subset_individual(model, cur, config.dp, &st);
        },
        [&](const SimplexFamily& a, const SimplexFamily& b, PruneStats& ps) { return bellman_residual(a, b, &ps); },
        result);
    result.family = std::move(f);
    result.termination = why;
    return result;
}

SolveResult solve_infovi(const PomdpModel& model, const SolveConfig& config) {
    config.validate();
    SolveResult result;
    result.threshold = threshold_for(model, config, StoppingCriterion::strict);
    auto [f, why] = iterate(
        config, result.threshold, make_phi_family(model, config.low_dimension, 0.0),
        [&](const SimplexFamily& cur, DpUpdateStats& st) { return dp_update_phi(model, cur, config.dp, &st); },
        [&](const SimplexFamily& a, const SimplexFamily& b, PruneStats& ps) { return bellman_residual(a, b, &ps); },
        result);
    result.family = std::move(f);
    result.termination = why;
    return result;
}

// History sets

bool HistorySet::contains(const History& h) const {
    return std::find(histories.begin(), histories.end(), h) != histories.end();
}

bool HistorySet::insert(History h) {
    if (contains(h)) return false;
    histories.push_back(std::move(h));
    return true;
}

bool HistorySet::is_maximal(const History& h) const {
    return std::none_of(histories.begin(), histories.end(), [&](const History& o) { return h.is_one_step_prefix_of(o); });
}

bool ActionClassification::is_rich(int action) const { return contains(information_rich, action); }

ActionClassification make_classification(const PomdpModel& model, std::vector<int> rich) {
    ActionClassification c;
    std::sort(rich.begin(), rich.end());
    rich.erase(std::unique(rich.begin(), rich.end()), rich.end());
    for (int a : rich)
        if (a < 0 || a >= model.num_actions()) throw UsageError("action index out of range in classification");
    c.information_rich = std::move(rich);
    for (int a = 0; a < model.num_actions(); ++a)
        if (!c.is_rich(a)) c.information_poor.push_back(a);
    auto observations_of = [&](const std::vector<int>& actions) {
        std::vector<int> out;
        for (int z = 0; z < model.num_observations(); ++z)
            for (int a : actions)
                if (pair_realizable(model, a, z)) {
                    out.push_back(z);
                    break;
                }
        return out;
    };
    c.rich_observations = observations_of(c.information_rich);
    c.poor_observations = observations_of(c.information_poor);
    return c;
}

ActionClassification classify_actions_heuristic(const PomdpModel& model, double threshold) {
    std::vector<int> rich;
    for (int a = 0; a < model.num_actions(); ++a) {
        double sum = 0.0;
        int count = 0;
        for (int z = 0; z < model.num_observations(); ++z) {
            if (!pair_realizable(model, a, z)) continue;
            sum += static_cast<double>(observation_support(model, a, z).states.size()) / model.num_states();
            ++count;
        }
        if (count > 0 && sum / count <= threshold) rich.push_back(a);
    }
    return make_classification(model, std::move(rich));
}

std::vector<SimplexBasis> history_bases(const PomdpModel& model, const HistorySet& histories, bool minimize_bases) {
    std::vector<SimplexBasis> out;
    for (const auto& h : histories.histories) {
        SimplexBasis b = history_simplex_basis(model, h);
        if (b.empty()) continue;
        if (minimize_bases) b = minimal_basis(b);
        b.tag = h;
        out.push_back(std::move(b));
    }
    return out;
}

VectorSet subset_vi(const PomdpModel& model, const VectorSet& start, std::span<const SimplexBasis> bases, double eta,
                    const SolveConfig& config, SubsetViTrace* trace) {
    if (start.empty()) throw UsageError("subset_vi: empty value function");
    if (bases.empty()) throw UsageError("subset_vi: no realizable history");
    Stopwatch clock;
    SubsetViTrace local;
    VectorSet current = start;
    for (int j = 1;; ++j) {
        if (j > config.max_iterations || past_deadline(config, clock)) {
            local.capped = true;
            break;
        }
        DpUpdateStats dp;
        dp.region = Region::histories;
        VectorSet candidates = enumerate_backups(
            model, [&](int, int) { return &current; }, bases, config.dp, dp);
        // The union with U_j keeps the induced values monotone.
        for (const auto& v : current.vectors) candidates.vectors.push_back(v);
        PruneStats ps;
        VectorSet next = union_prune(dedupe(candidates), bases, config.dp.prune, &ps);
        next.region = Region::histories;
        dp.kept = static_cast<long>(next.size());
        dp.lp_count += ps.lp_count;
        PruneStats rs;
        const double r = bellman_residual(next, current, bases, &rs);
        local.stats.push_back(make_row(j, dp, rs, r, clock.seconds()));
        local.residual = r;
        current = std::move(next);
        if (r <= eta) break;
    }
    if (trace) *trace = std::move(local);
    return current;
}

VectorSet subset_vi(const PomdpModel& model, const VectorSet& start, const HistorySet& histories, double eta,
                    const SolveConfig& config, SubsetViTrace* trace) {
    const auto bases = history_bases(model, histories, config.minimize_bases);
    return subset_vi(model, start, bases, eta, config, trace);
}

HistorySet initial_histories(const PomdpModel& model, const ActionClassification& classes) {
    HistorySet h;
    for (int a : classes.information_rich)
        for (int z : classes.rich_observations)
            if (pair_realizable(model, a, z)) h.insert(History{{{a, z}}});
    return h;
}

HistorySet expand_subset(const PomdpModel& model, const VectorSet& vectors, const HistorySet& histories,
                         const ActionClassification& classes, bool exhaustive) {
    HistorySet out = histories;
    out.generation = histories.generation + 1;
    std::vector<History> done;
    for (const auto& v : vectors.vectors) {
        if (!v.history || !contains(classes.information_poor, v.action)) continue;
        const History& h = *v.history;
        if (std::find(done.begin(), done.end(), h) != done.end()) continue;
        if (!exhaustive && !histories.is_maximal(h)) continue;
        done.push_back(h);
        for (int a : classes.information_poor)
            for (int z : classes.poor_observations) {
                History ext = h.extended({a, z});
                if (out.contains(ext)) continue;
                if (!history_simplex_basis(model, ext).empty()) out.insert(std::move(ext));
            }
    }
    return out;
}

bool spvi_should_stop(const VectorSet& vectors, const HistorySet& histories, const ActionClassification& classes) {
    for (const auto& v : vectors.vectors) {
        if (!v.history || !histories.is_maximal(*v.history)) continue;
        if (contains(classes.information_poor, v.action)) return false;
    }
    return true;
}

SolveResult solve_spvi(const PomdpModel& model, const SolveConfig& config, const ActionClassification& classes) {
    config.validate();
    if (classes.information_rich.empty()) throw UsageError("SPVI requires information-rich actions");
    SolveResult result;
    result.threshold = threshold_for(model, config, StoppingCriterion::loose);
    HistorySet histories = initial_histories(model, classes);
    if (histories.size() == 0) throw UsageError("SPVI: no realizable information-rich action-observation pair");

    const double base = static_cast<double>(classes.information_rich.size() * classes.rich_observations.size());
    const double growth = static_cast<double>(classes.information_poor.size() * classes.poor_observations.size());
    // Each history has at most |A_IP||Z_IP| extensions, and old histories are kept.
    double worst_case = static_cast<double>(histories.size());

    Stopwatch clock;
    VectorSet value = constant_set(model.num_states(), model.min_reward());
    for (int i = 0;; ++i) {
        if (static_cast<double>(histories.size()) > base * std::pow(growth, i)) result.history_bound_held = false;
        if (static_cast<double>(histories.size()) > worst_case) throw std::logic_error("spvi history set outgrew its worst case");

        SolveConfig inner = config;
        inner.max_iterations = config.max_iterations - static_cast<int>(result.stats.size());
        if (config.deadline_seconds > 0.0) {
            inner.deadline_seconds = config.deadline_seconds - clock.seconds();
            if (inner.deadline_seconds <= 0.0) inner.max_iterations = 0;
        }
        if (inner.max_iterations <= 0) {
            result.termination = Termination::iteration_cap;
            break;
        }
        const auto bases = history_bases(model, histories, config.minimize_bases);
        SubsetViTrace trace;
        const double offset = clock.seconds();
        try {
            value = subset_vi(model, value, bases, result.threshold, inner, &trace);
        } catch (const ResourceError&) {
            result.termination = Termination::resource_abort;
            break;
        }
        for (auto row : trace.stats) {
            row.iteration = static_cast<int>(result.stats.size()) + 1;
            row.seconds += offset;
            result.stats.push_back(row);
        }
        result.residual = trace.residual;
        result.histories = histories;
        result.expansions.push_back({i, histories.size(), static_cast<int>(trace.stats.size()), value.size(),
                                     trace.residual, value, histories});
        if (trace.capped) {
            result.termination = Termination::iteration_cap;
            break;
        }
        if (spvi_should_stop(value, histories, classes)) {
            result.termination = Termination::all_information_rich;
            break;
        }
        if (config.max_expansions >= 0 && i >= config.max_expansions) {
            result.termination = Termination::iteration_cap;
            break;
        }
        HistorySet next = expand_subset(model, value, histories, classes, config.exhaustive_expansion);
        if (next.size() == histories.size()) {
            result.termination = Termination::no_expansion;
            break;
        }
        worst_case = static_cast<double>(histories.size()) * (1.0 + growth);
        histories = std::move(next);
    }
    result.vectors = std::move(value);
    return result;
}

} // namespace rvi
