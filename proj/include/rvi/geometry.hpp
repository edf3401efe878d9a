#pragma once

#include "rvi/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rvi {

/**
 * Linear component of a piecewise-linear convex value function.
 *
 * `values` has one entry per state, or one per support state when the owning
 * set carries a support tag. `obs_map[z]` is the index of the predecessor
 * vector chosen for observation z when the vector came out of a DP update.
 */
struct AlphaVector {
    Vec values;
    int action = -1;
    std::vector<int> obs_map;
    std::optional<History> history;

    bool operator==(const AlphaVector&) const = default;
};

/// Where a vector set is meant to be evaluated.
enum class Region { space, simplex, union_of_simplices, family_pair, family_observation, histories };

std::string to_string(Region region);
std::optional<Region> region_from_string(const std::string& tag);

struct VectorSet {
    std::vector<AlphaVector> vectors;
    /// Present for low-dimension sets: vector entry j belongs to state support->states[j].
    std::optional<ObservationSupport> support;
    Region region = Region::space;

    std::size_t size() const noexcept { return vectors.size(); }
    bool empty() const noexcept { return vectors.empty(); }
    /// Length every vector must have.
    std::size_t dimension(int num_states) const;
};

struct Witness {
    Belief belief;
    double advantage = 0.0; ///< +inf when there was nothing to compare against
    Vec coefficients;       ///< weights over the region's basis points
};

enum class PruneMethod {
    /// Test each vector against the input minus vectors already discarded. Default.
    sequential,
    /// Test each vector against the whole input (the literal loop; unsound on near-ties).
    original_set,
    /// Lark's filter: test against a growing set of confirmed survivors.
    lark,
};

struct PruneOptions {
    double margin = 1e-9;
    PruneMethod method = PruneMethod::sequential;
    /// Drop vectors dominated pointwise by another vector before any LP.
    bool pointwise_prefilter = true;
};

struct PruneStats {
    long lp_count = 0;
};

/// Removes vectors equal component-wise within `tolerance`, keeping the first.
VectorSet dedupe(const VectorSet& set, double tolerance = 1e-12);

std::optional<Witness> space_witness_lp(const AlphaVector& beta, const VectorSet& others,
                                        double margin = 1e-9, PruneStats* stats = nullptr);
std::optional<Witness> simplex_witness_lp(const AlphaVector& beta, const VectorSet& others,
                                          const SimplexBasis& basis, double margin = 1e-9,
                                          PruneStats* stats = nullptr);

VectorSet simplex_prune(const VectorSet& set, const SimplexBasis& basis, const PruneOptions& options = {},
                        PruneStats* stats = nullptr);
VectorSet space_prune(const VectorSet& set, int num_states, const PruneOptions& options = {},
                      PruneStats* stats = nullptr);

/**
 * Keeps a vector iff it is useful on at least one of the simplices. Bases
 * are visited in order; each kept vector gets `history` set from the tag of
 * the first basis on which it survived (a pair becomes a length-one history).
 * `first_basis`, when given, receives that basis index per output vector.
 */
VectorSet union_prune(const VectorSet& set, std::span<const SimplexBasis> bases, const PruneOptions& options = {},
                      PruneStats* stats = nullptr, std::vector<int>* first_basis = nullptr);

struct InducedValue {
    double value = 0.0;
    int index = -1; ///< argmax, lowest index on ties
};

/// max over vectors of alpha . b. For low-dimension sets only support states of b are read.
InducedValue induced_value(const VectorSet& set, const Belief& b);
double vector_value(const AlphaVector& alpha, const std::optional<ObservationSupport>& support, const Belief& b);

/**
 * Largest amount by which the upper envelope of `upper` exceeds that of
 * `lower` over the hull of `basis`, computed exactly with one LP per vector
 * of `upper` (cheap bounds skip most of them). May be negative.
 */
double max_envelope_gap(const VectorSet& upper, const VectorSet& lower, const SimplexBasis& basis,
                        PruneStats* stats = nullptr);

/// Pads a low-dimension vector set back to full dimension with zeros off the support.
VectorSet embed_full(const VectorSet& set, int num_states);

} // namespace rvi
