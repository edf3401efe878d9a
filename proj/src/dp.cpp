#include "rvi/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rvi {

const FamilyEntry* SimplexFamily::find(int a, int z) const {
    for (const auto& e : entries) {
        if (e.key.observation != z) continue;
        if (keyed_by_observation || e.key.action == a) return &e;
    }
    return nullptr;
}

std::size_t SimplexFamily::total_vectors() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.vectors.size();
    return n;
}

std::vector<SimplexBasis> tau_bases(const PomdpModel& model, bool minimize_bases) {
    std::vector<SimplexBasis> out;
    for (int a = 0; a < model.num_actions(); ++a) {
        for (int z = 0; z < model.num_observations(); ++z) {
            SimplexBasis basis = tau_simplex_basis(model, a, z);
            if (basis.empty()) continue;
            out.push_back(minimize_bases ? minimal_basis(basis) : std::move(basis));
        }
    }
    return out;
}

SimplexFamily make_tau_family(const PomdpModel& model, const VectorSet& init, bool minimize_bases) {
    SimplexFamily family;
    for (auto& basis : tau_bases(model, minimize_bases)) {
        auto key = std::get<ActionObservation>(basis.tag);
        VectorSet vs = init;
        vs.region = Region::family_pair;
        family.entries.push_back({key, std::move(basis), std::move(vs)});
    }
    return family;
}

SimplexFamily make_phi_family(const PomdpModel& model, bool low_dimension, double init_value) {
    SimplexFamily family;
    family.keyed_by_observation = model.observations_action_independent();
    family.low_dimension = low_dimension;
    const int actions = family.keyed_by_observation ? 1 : model.num_actions();
    for (int a = 0; a < actions; ++a) {
        for (int z = 0; z < model.num_observations(); ++z) {
            SimplexBasis basis = phi_simplex_basis(model, a, z);
            if (basis.empty()) continue;
            const auto support = std::get<ObservationSupport>(basis.tag);
            FamilyEntry entry{{family.keyed_by_observation ? -1 : a, z}, std::move(basis), {}};
            entry.vectors.region = family.keyed_by_observation ? Region::family_observation : Region::family_pair;
            AlphaVector init;
            if (low_dimension) {
                entry.vectors.support = support;
                init.values.assign(support.states.size(), init_value);
            } else {
                init.values.assign(static_cast<std::size_t>(model.num_states()), init_value);
            }
            entry.vectors.vectors.push_back(std::move(init));
            family.entries.push_back(std::move(entry));
        }
    }
    return family;
}

namespace {

// g(s) = sum_s' T(s,a,s') O(a,s',z) alpha(s'), alpha read through its support if any.
Vec observation_term(const PomdpModel& model, int a, int z, const Vec& alpha,
                     const std::optional<ObservationSupport>& support) {
    const int S = model.num_states();
    Vec next_value(static_cast<std::size_t>(S), 0.0);
    if (support) {
        for (std::size_t j = 0; j < support->states.size(); ++j) {
            int sn = support->states[j];
            next_value[static_cast<std::size_t>(sn)] = model.observation(a, sn, z) * alpha[j];
        }
    } else {
        for (int sn = 0; sn < S; ++sn)
            next_value[static_cast<std::size_t>(sn)] = model.observation(a, sn, z) * alpha[static_cast<std::size_t>(sn)];
    }
    Vec g(static_cast<std::size_t>(S), 0.0);
    for (int s = 0; s < S; ++s) g[static_cast<std::size_t>(s)] = dot(model.transition_row(s, a), next_value);
    return g;
}

bool observation_possible(const PomdpModel& model, int a, int z) {
    for (int s = 0; s < model.num_states(); ++s) {
        double reach = 0.0;
        for (int sn = 0; sn < model.num_states(); ++sn)
            reach += model.transition(s, a, sn) * model.observation(a, sn, z);
        if (reach > 0.0) return true;
    }
    return false;
}

void check_cap(double count, const DpOptions& options) {
    if (count > static_cast<double>(options.enumeration_cap))
        throw ResourceError("enumeration of " + std::to_string(static_cast<long long>(count)) +
                            " vectors exceeds the cap of " + std::to_string(options.enumeration_cap));
}

VectorSet prune_region(const VectorSet& set, std::span<const SimplexBasis> region, const DpOptions& options,
                       DpUpdateStats& stats) {
    PruneStats ps;
    VectorSet out = union_prune(set, region, options.prune, &ps);
    stats.lp_count += ps.lp_count;
    for (auto& v : out.vectors) v.history.reset();
    return out;
}

} // namespace

AlphaVector build_vector(const PomdpModel& model, int action, std::span<const AlphaVector* const> delta,
                         std::span<const std::optional<ObservationSupport>> supports) {
    if (delta.size() != static_cast<std::size_t>(model.num_observations()))
        throw UsageError("build_vector: one predecessor per observation required");
    AlphaVector beta;
    beta.action = action;
    beta.obs_map.assign(delta.size(), 0);
    beta.values.resize(static_cast<std::size_t>(model.num_states()));
    for (int s = 0; s < model.num_states(); ++s) beta.values[static_cast<std::size_t>(s)] = model.reward(s, action);
    for (int z = 0; z < model.num_observations(); ++z) {
        const AlphaVector* d = delta[static_cast<std::size_t>(z)];
        if (!d) continue;
        std::optional<ObservationSupport> support;
        if (!supports.empty()) support = supports[static_cast<std::size_t>(z)];
        const std::size_t expected = support ? support->states.size() : static_cast<std::size_t>(model.num_states());
        if (d->values.size() != expected) throw UsageError("build_vector: predecessor dimension mismatch");
        Vec g = observation_term(model, action, z, d->values, support);
        for (std::size_t s = 0; s < g.size(); ++s) beta.values[s] += model.discount() * g[s];
    }
    return beta;
}

VectorSet enumerate_backups(const PomdpModel& model, const PredecessorLookup& predecessors,
                            std::span<const SimplexBasis> region, const DpOptions& options, DpUpdateStats& stats) {
    const int S = model.num_states();
    const int Z = model.num_observations();
    const double discount = model.discount();
    VectorSet out;

    // Terms per action and observation: discount * g for every predecessor vector.
    struct Terms {
        int z;
        std::vector<AlphaVector> terms; // obs_map[0] holds the predecessor index
    };
    std::vector<std::vector<Terms>> per_action(static_cast<std::size_t>(model.num_actions()));
    double total = 0.0;
    for (int a = 0; a < model.num_actions(); ++a) {
        double count = 1.0;
        for (int z = 0; z < Z; ++z) {
            const VectorSet* pred = predecessors(a, z);
            if (!pred || pred->empty() || !observation_possible(model, a, z)) continue;
            Terms t{z, {}};
            for (std::size_t j = 0; j < pred->vectors.size(); ++j) {
                Vec g = observation_term(model, a, z, pred->vectors[j].values, pred->support);
                for (double& x : g) x *= discount;
                t.terms.push_back({std::move(g), a, {static_cast<int>(j)}, std::nullopt});
            }
            count *= static_cast<double>(t.terms.size());
            per_action[static_cast<std::size_t>(a)].push_back(std::move(t));
        }
        total += count;
    }
    stats.enumerated += static_cast<long>(std::min(total, 9.0e18));
    if (!options.incremental) check_cap(total, options);

    for (int a = 0; a < model.num_actions(); ++a) {
        const auto& terms = per_action[static_cast<std::size_t>(a)];
        AlphaVector base;
        base.action = a;
        base.obs_map.assign(static_cast<std::size_t>(Z), 0);
        base.values.resize(static_cast<std::size_t>(S));
        for (int s = 0; s < S; ++s) base.values[static_cast<std::size_t>(s)] = model.reward(s, a);

        if (!options.incremental) {
            std::vector<std::size_t> odometer(terms.size(), 0);
            for (;;) {
                AlphaVector beta = base;
                for (std::size_t t = 0; t < terms.size(); ++t) {
                    const AlphaVector& term = terms[t].terms[odometer[t]];
                    for (int s = 0; s < S; ++s) beta.values[static_cast<std::size_t>(s)] += term.values[static_cast<std::size_t>(s)];
                    beta.obs_map[static_cast<std::size_t>(terms[t].z)] = term.obs_map[0];
                }
                out.vectors.push_back(std::move(beta));
                std::size_t t = 0;
                while (t < terms.size() && ++odometer[t] == terms[t].terms.size()) odometer[t++] = 0;
                if (t == terms.size()) break;
            }
            continue;
        }

        VectorSet partial{{base}, std::nullopt, Region::union_of_simplices};
        for (const auto& t : terms) {
            VectorSet term_set{t.terms, std::nullopt, Region::union_of_simplices};
            term_set = prune_region(term_set, region, options, stats);
            check_cap(static_cast<double>(partial.size()) * static_cast<double>(term_set.size()), options);
            VectorSet sum{{}, std::nullopt, Region::union_of_simplices};
            sum.vectors.reserve(partial.size() * term_set.size());
            for (const auto& p : partial.vectors) {
                for (const auto& q : term_set.vectors) {
                    AlphaVector v = p;
                    for (int s = 0; s < S; ++s) v.values[static_cast<std::size_t>(s)] += q.values[static_cast<std::size_t>(s)];
                    v.obs_map[static_cast<std::size_t>(t.z)] = q.obs_map[0];
                    sum.vectors.push_back(std::move(v));
                }
            }
            partial = prune_region(sum, region, options, stats);
        }
        for (auto& v : partial.vectors) out.vectors.push_back(std::move(v));
    }
    return out;
}

VectorSet dp_update_space(const PomdpModel& model, const VectorSet& current, const DpOptions& options,
                          DpUpdateStats* stats) {
    if (current.empty()) throw UsageError("dp_update_space: empty value function");
    DpUpdateStats local;
    local.region = Region::space;
    const SimplexBasis full = full_space_basis(model.num_states());
    std::span<const SimplexBasis> region(&full, 1);
    VectorSet candidates = enumerate_backups(
        model, [&](int, int) { return &current; }, region, options, local);
    PruneStats ps;
    VectorSet out = simplex_prune(candidates, full, options.prune, &ps);
    out.region = Region::space;
    local.lp_count += ps.lp_count;
    local.kept = static_cast<long>(out.size());
    if (stats) *stats = local;
    return out;
}

VectorSet dp_update_subset_collective(const PomdpModel& model, const VectorSet& current,
                                      std::span<const SimplexBasis> bases, const DpOptions& options,
                                      DpUpdateStats* stats) {
    if (current.empty()) throw UsageError("dp_update_subset_collective: empty value function");
    if (bases.empty()) throw UsageError("dp_update_subset_collective: no simplices");
    DpUpdateStats local;
    local.region = Region::union_of_simplices;
    VectorSet candidates = enumerate_backups(
        model, [&](int, int) { return &current; }, bases, options, local);
    PruneStats ps;
    VectorSet out = union_prune(candidates, bases, options.prune, &ps);
    out.region = Region::union_of_simplices;
    local.lp_count += ps.lp_count;
    local.kept = static_cast<long>(out.size());
    if (stats) *stats = local;
    return out;
}

namespace {

SimplexFamily family_update(const PomdpModel& model, const SimplexFamily& family, const DpOptions& options,
                            DpUpdateStats* stats) {
    if (family.entries.empty()) throw UsageError("DP update over an empty family");
    DpUpdateStats local;
    local.region = family.keyed_by_observation ? Region::family_observation : Region::family_pair;
    std::vector<SimplexBasis> region;
    for (const auto& e : family.entries) region.push_back(e.basis);
    VectorSet candidates = enumerate_backups(
        model,
        [&](int a, int z) -> const VectorSet* {
            const FamilyEntry* e = family.find(a, z);
            return e ? &e->vectors : nullptr;
        },
        region, options, local);
    const long per_target = local.enumerated;
    local.enumerated = per_target * static_cast<long>(family.entries.size());

    SimplexFamily out;
    out.keyed_by_observation = family.keyed_by_observation;
    out.low_dimension = family.low_dimension;
    for (const auto& e : family.entries) {
        VectorSet target{{}, e.vectors.support, e.vectors.region};
        target.vectors.reserve(candidates.size());
        for (const auto& c : candidates.vectors) {
            AlphaVector v = c;
            if (e.vectors.support) {
                v.values.resize(e.vectors.support->states.size());
                for (std::size_t j = 0; j < e.vectors.support->states.size(); ++j)
                    v.values[j] = c.values[static_cast<std::size_t>(e.vectors.support->states[j])];
            }
            target.vectors.push_back(std::move(v));
        }
        PruneStats ps;
        VectorSet pruned = simplex_prune(target, e.basis, options.prune, &ps);
        local.lp_count += ps.lp_count;
        local.kept += static_cast<long>(pruned.size());
        out.entries.push_back({e.key, e.basis, std::move(pruned)});
    }
    if (stats) *stats = local;
    return out;
}

} // namespace

SimplexFamily dp_update_subset_individual(const PomdpModel& model, const SimplexFamily& family,
                                          const DpOptions& options, DpUpdateStats* stats) {
    return family_update(model, family, options, stats);
}

SimplexFamily dp_update_phi(const PomdpModel& model, const SimplexFamily& family, const DpOptions& options,
                            DpUpdateStats* stats) {
    for (const auto& e : family.entries)
        if (!std::holds_alternative<ObservationSupport>(e.basis.tag))
            throw UsageError("dp_update_phi: family entries must be phi-simplices");
    return family_update(model, family, options, stats);
}

double bellman_residual(const VectorSet& next, const VectorSet& previous, std::span<const SimplexBasis> bases,
                        PruneStats* stats) {
    double worst = 0.0;
    for (const auto& basis : bases) {
        if (basis.empty()) continue;
        worst = std::max(worst, max_envelope_gap(next, previous, basis, stats));
        worst = std::max(worst, max_envelope_gap(previous, next, basis, stats));
    }
    return worst;
}

double bellman_residual(const VectorSet& next, const VectorSet& previous, int num_states, PruneStats* stats) {
    SimplexBasis basis;
    if (next.support) {
        for (int s : next.support->states) basis.points.push_back(Belief::unit(num_states, s));
    } else {
        basis = full_space_basis(num_states);
    }
    return bellman_residual(next, previous, std::span<const SimplexBasis>(&basis, 1), stats);
}

double bellman_residual(const SimplexFamily& next, const SimplexFamily& previous, PruneStats* stats) {
    if (next.entries.size() != previous.entries.size())
        throw UsageError("bellman_residual: families have different simplices");
    double worst = 0.0;
    for (std::size_t i = 0; i < next.entries.size(); ++i) {
        const auto& basis = next.entries[i].basis;
        worst = std::max(worst, bellman_residual(next.entries[i].vectors, previous.entries[i].vectors,
                                                 std::span<const SimplexBasis>(&basis, 1), stats));
    }
    return worst;
}

double family_value(const SimplexFamily& family, int action, int observation, const Belief& b) {
    const FamilyEntry* e = family.find(action, observation);
    if (!e) throw UsageError("no simplex for action " + std::to_string(action) + ", observation " +
                             std::to_string(observation));
    return induced_value(e->vectors, b).value;
}

} // namespace rvi
