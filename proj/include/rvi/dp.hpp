#pragma once

#include "rvi/geometry.hpp"
#include "rvi/model.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace rvi {

struct DpUpdateStats {
    long enumerated = 0; ///< size of the exhaustive cross product, before pruning
    long kept = 0;
    long lp_count = 0;
    Region region = Region::space;
};

struct DpOptions {
    PruneOptions prune;
    /// Largest cross product (or intermediate cross sum) allowed before ResourceError.
    long enumeration_cap = 5'000'000;
    /// Prune after adding each observation's term instead of enumerating everything first.
    bool incremental = false;
};

/// One simplex of a family together with the value function kept on it.
struct FamilyEntry {
    /// (a, z), or (-1, z) when the family is keyed by observation only.
    ActionObservation key;
    SimplexBasis basis;
    VectorSet vectors;
};

struct SimplexFamily {
    std::vector<FamilyEntry> entries;
    bool keyed_by_observation = false;
    bool low_dimension = false;

    /// Entry holding predecessors for action a and observation z; nullptr if unrealizable.
    const FamilyEntry* find(int a, int z) const;
    std::size_t total_vectors() const;
};

/// Builds the tau-simplex family for every realizable pair, each holding `init`.
SimplexFamily make_tau_family(const PomdpModel& model, const VectorSet& init, bool minimize_bases = true);

/**
 * phi-simplex family. Keyed by observation alone when the observation model
 * does not depend on the action. With `low_dimension`, each entry's vectors
 * have one value per support state and `init_value` fills them.
 */
SimplexFamily make_phi_family(const PomdpModel& model, bool low_dimension, double init_value = 0.0);

/// tau-simplex bases of every realizable pair, in (a, z) order.
std::vector<SimplexBasis> tau_bases(const PomdpModel& model, bool minimize_bases = true);

/**
 * r(., a) + discount * sum_z sum_s' T(., a, s') O(a, s', z) delta_z(s').
 * `delta[z]` may be nullptr for observations that cannot follow a. Low
 * dimension predecessors are read through `supports[z]`.
 */
AlphaVector build_vector(const PomdpModel& model, int action, std::span<const AlphaVector* const> delta,
                         std::span<const std::optional<ObservationSupport>> supports = {});

/// Predecessor set for (action, observation); nullptr when that observation cannot follow the action.
using PredecessorLookup = std::function<const VectorSet*(int action, int observation)>;

/**
 * All vectors of the exhaustive cross product (or, with `incremental`, a set
 * with the same envelope over the union of `region`). Output vectors are full
 * dimension with `action` and `obs_map` filled.
 */
VectorSet enumerate_backups(const PomdpModel& model, const PredecessorLookup& predecessors,
                            std::span<const SimplexBasis> region, const DpOptions& options, DpUpdateStats& stats);

VectorSet dp_update_space(const PomdpModel& model, const VectorSet& current, const DpOptions& options = {},
                          DpUpdateStats* stats = nullptr);

VectorSet dp_update_subset_collective(const PomdpModel& model, const VectorSet& current,
                                      std::span<const SimplexBasis> bases, const DpOptions& options = {},
                                      DpUpdateStats* stats = nullptr);

SimplexFamily dp_update_subset_individual(const PomdpModel& model, const SimplexFamily& family,
                                          const DpOptions& options = {}, DpUpdateStats* stats = nullptr);

/// Individual update over phi-simplices; keeps the family's dimension mode.
SimplexFamily dp_update_phi(const PomdpModel& model, const SimplexFamily& family, const DpOptions& options = {},
                            DpUpdateStats* stats = nullptr);

/// max |V_new(b) - V_old(b)| over the whole belief space.
double bellman_residual(const VectorSet& next, const VectorSet& previous, int num_states,
                        PruneStats* stats = nullptr);
/// Same over the union of the simplices (max over members).
double bellman_residual(const VectorSet& next, const VectorSet& previous, std::span<const SimplexBasis> bases,
                        PruneStats* stats = nullptr);
/// Max over entries, each compared on its own simplex.
double bellman_residual(const SimplexFamily& next, const SimplexFamily& previous, PruneStats* stats = nullptr);

/// Value of a family at a belief inside one of its simplices: the entry is chosen by (a, z).
double family_value(const SimplexFamily& family, int action, int observation, const Belief& b);

} // namespace rvi
