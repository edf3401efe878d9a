#pragma once

#include "rvi/dp.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rvi {

enum class UpdateMode { collective, individual };

enum class StoppingCriterion {
    automatic, ///< loose for vi and spvi, strict for ssvi and infovi
    loose,
    strict,
};

enum class Termination {
    residual_met,
    iteration_cap,
    all_information_rich,
    resource_abort,
    no_expansion, ///< spvi: expandSubset produced no new history
};

std::string to_string(Termination t);

struct SolveConfig {
    double epsilon = 0.01;
    /// DP updates allowed over the whole run.
    int max_iterations = 500;
    UpdateMode mode = UpdateMode::collective;
    bool low_dimension = true;
    StoppingCriterion criterion = StoppingCriterion::automatic;
    std::uint64_t seed = 1;
    DpOptions dp;
    /// Wall-clock budget in seconds; 0 disables it.
    double deadline_seconds = 0.0;
    /// spvi: number of subset expansions allowed; negative means unlimited.
    int max_expansions = -1;
    /// spvi: extend every history associated with an information-poor vector, not just maximal ones.
    bool exhaustive_expansion = false;
    /// Use minimal tau bases (smaller LPs, same hulls).
    bool minimize_bases = true;

    void validate() const;
};

struct IterationStats {
    int iteration = 0;
    Region region = Region::space;
    long enumerated = 0;
    long kept = 0;
    long lp_count = 0;
    double residual = 0.0;
    double seconds = 0.0; ///< cumulative since the solve started
};

struct HistorySet {
    std::vector<History> histories; ///< insertion order, no duplicates
    int generation = 0;

    std::size_t size() const noexcept { return histories.size(); }
    bool contains(const History& h) const;
    /// Adds h unless present; returns true when added.
    bool insert(History h);
    /// No one-pair extension of h is in the set.
    bool is_maximal(const History& h) const;
};

struct ActionClassification {
    std::vector<int> information_rich;
    std::vector<int> information_poor;
    std::vector<int> rich_observations; ///< Z_IR: observations some rich action can produce
    std::vector<int> poor_observations; ///< Z_IP

    bool is_rich(int action) const;
};

/// Fills the observation sets from the action split.
ActionClassification make_classification(const PomdpModel& model, std::vector<int> rich);

/// Action is information-rich iff the mean of |S^az|/|S| over its realizable z is at most `threshold`.
ActionClassification classify_actions_heuristic(const PomdpModel& model, double threshold = 0.5);

struct ExpansionRecord {
    int expansion = 0;
    std::size_t histories = 0;
    int iterations = 0; ///< DP updates inside subsetVI
    std::size_t vectors = 0;
    double residual = 0.0;
    VectorSet value; ///< set returned by subsetVI for this history set
    HistorySet history_set;
};

struct SolveResult {
    /// Final vectors for vi, collective ssvi and spvi.
    VectorSet vectors;
    /// Final family for individual ssvi and infovi.
    std::optional<SimplexFamily> family;
    std::vector<IterationStats> stats;
    Termination termination = Termination::iteration_cap;
    double residual = 0.0;
    double threshold = 0.0;
    /// spvi only.
    std::vector<ExpansionRecord> expansions;
    HistorySet histories;
    /// spvi: every |H_i| stayed within |A_IR||Z_IR|(|A_IP||Z_IP|)^i.
    bool history_bound_held = true;

    std::size_t iterations() const noexcept { return stats.size(); }
};

/// epsilon (1 - discount) / (2 discount); 0 when discount < 1e-9.
double loose_threshold(double epsilon, double discount);
/// epsilon (1 - discount) / (2 discount^2 |Z|); 0 when discount < 1e-9.
double strict_threshold(double epsilon, double discount, int num_observations);

SolveResult solve_vi(const PomdpModel& model, const SolveConfig& config = {});
SolveResult solve_ssvi(const PomdpModel& model, const SolveConfig& config = {});
SolveResult solve_infovi(const PomdpModel& model, const SolveConfig& config = {});
SolveResult solve_spvi(const PomdpModel& model, const SolveConfig& config, const ActionClassification& classes);

/// Bases of every history in H with a nonempty simplex, in set order, tagged by history.
std::vector<SimplexBasis> history_bases(const PomdpModel& model, const HistorySet& histories,
                                        bool minimize_bases = true);

struct SubsetViTrace {
    std::vector<IterationStats> stats;
    bool capped = false; ///< stopped on the iteration budget or deadline
    double residual = 0.0;
};

/**
 * Repeats U <- union_prune(dedupe(backups(U) + U)) over the history simplices
 * until the residual there is at most eta. Returns the last U.
 */
VectorSet subset_vi(const PomdpModel& model, const VectorSet& start, std::span<const SimplexBasis> bases, double eta,
                    const SolveConfig& config = {}, SubsetViTrace* trace = nullptr);
VectorSet subset_vi(const PomdpModel& model, const VectorSet& start, const HistorySet& histories, double eta,
                    const SolveConfig& config = {}, SubsetViTrace* trace = nullptr);

/// Initial spvi histories: realizable [a, z] with a information-rich.
HistorySet initial_histories(const PomdpModel& model, const ActionClassification& classes);

/**
 * H plus [h, a, z] for a in A_IP, z in Z_IP (realizable ones) for every
 * vector whose history h is maximal in H and whose action is information-poor.
 */
HistorySet expand_subset(const PomdpModel& model, const VectorSet& vectors, const HistorySet& histories,
                         const ActionClassification& classes, bool exhaustive = false);

/// Every vector whose history is maximal in H prescribes an information-rich action.
bool spvi_should_stop(const VectorSet& vectors, const HistorySet& histories, const ActionClassification& classes);

} // namespace rvi
