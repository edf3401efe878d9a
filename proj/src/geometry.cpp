#include "rvi/geometry.hpp"

#include "rvi/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rvi {

std::string to_string(Region region) {
    switch (region) {
    case Region::space: return "space";
    case Region::simplex: return "simplex";
    case Region::union_of_simplices: return "union";
    case Region::family_pair: return "family-az";
    case Region::family_observation: return "family-z";
    case Region::histories: return "histories";
    }
    return "space";
}

std::optional<Region> region_from_string(const std::string& tag) {
    for (Region r : {Region::space, Region::simplex, Region::union_of_simplices, Region::family_pair,
                     Region::family_observation, Region::histories})
        if (to_string(r) == tag) return r;
    return std::nullopt;
}

std::size_t VectorSet::dimension(int num_states) const {
    return support ? support->states.size() : static_cast<std::size_t>(num_states);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Row-per-vector coefficients c_i = alpha . p_i over the basis points.
Matrix project(const VectorSet& set, const SimplexBasis& basis) {
    const std::size_t k = basis.points.size();
    Matrix out(set.vectors.size(), k);
    for (std::size_t v = 0; v < set.vectors.size(); ++v) {
        const Vec& values = set.vectors[v].values;
        for (std::size_t i = 0; i < k; ++i) {
            const Belief& p = basis.points[i];
            double s = 0.0;
            if (set.support) {
                const auto& states = set.support->states;
                if (values.size() != states.size()) throw UsageError("vector length does not match its support");
                for (std::size_t j = 0; j < states.size(); ++j)
                    s += values[j] * p[static_cast<std::size_t>(states[j])];
            } else {
                if (values.size() != p.size())
                    throw UsageError("vector dimension " + std::to_string(values.size()) +
                                     " does not match belief dimension " + std::to_string(p.size()));
                for (std::size_t j = 0; j < values.size(); ++j) s += values[j] * p[j];
            }
            out(v, i) = s;
        }
    }
    return out;
}

struct ProjectedWitness {
    double advantage = -kInf;
    Vec weights;
};

// max x  s.t.  (o_j - c) . w + x <= 0 for every other o_j,  w in the unit simplex.
ProjectedWitness witness_projected(const double* c, std::span<const double* const> others, std::size_t k,
                                   PruneStats* stats) {
    ProjectedWitness out;
    if (others.empty()) {
        out.advantage = kInf;
        out.weights.assign(k, 0.0);
        out.weights[0] = 1.0;
        return out;
    }
    const std::size_t m = others.size();
    double bound = 0.0;
    for (const double* o : others)
        for (std::size_t i = 0; i < k; ++i) bound = std::max(bound, std::abs(o[i] - c[i]));
    bound += 1.0;
    // Substitute w_0 = 1 - sum_{i>0} w_i and x = t - bound so the origin is feasible.
    const std::size_t vars = k;
    const std::size_t rows = m + (k > 1 ? 1 : 0);
    LinearProgram lp{Matrix(rows, vars), Vec(rows, 0.0), Vec(vars, 0.0)};
    for (std::size_t j = 0; j < m; ++j) {
        const double d0 = others[j][0] - c[0];
        double* row = lp.constraints.row(j);
        for (std::size_t i = 1; i < k; ++i) row[i - 1] = (others[j][i] - c[i]) - d0;
        row[vars - 1] = 1.0;
        lp.bounds[j] = bound - d0;
    }
    if (k > 1) {
        for (std::size_t i = 1; i < k; ++i) lp.constraints(m, i - 1) = 1.0;
        lp.bounds[m] = 1.0;
    }
    lp.objective[vars - 1] = 1.0;
    auto sol = solve_lp(lp);
    if (stats) ++stats->lp_count;
    if (sol.status != LpStatus::optimal) throw SolverError("witness LP did not reach an optimum");
    out.weights.assign(k, 0.0);
    double rest = 1.0;
    for (std::size_t i = 1; i < k; ++i) {
        out.weights[i] = std::max(sol.x[i - 1], 0.0);
        rest -= out.weights[i];
    }
    out.weights[0] = std::max(rest, 0.0);
    double total = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
    for (double& w : out.weights) w /= total;
    // Report the margin actually achieved at the recovered weights.
    double worst = kInf;
    for (const double* o : others) {
        double gap = 0.0;
        for (std::size_t i = 0; i < k; ++i) gap += (c[i] - o[i]) * out.weights[i];
        worst = std::min(worst, gap);
    }
    out.advantage = worst;
    return out;
}

Belief witness_belief(const SimplexBasis& basis, const Vec& weights) {
    const std::size_t n = basis.points.front().size();
    Vec b(n, 0.0);
    for (std::size_t i = 0; i < weights.size(); ++i)
        for (std::size_t s = 0; s < n; ++s) b[s] += weights[i] * basis.points[i][s];
    return Belief(std::move(b));
}

bool rows_equal(const Matrix& m, std::size_t a, std::size_t b, double tol) {
    for (std::size_t i = 0; i < m.cols(); ++i)
        if (std::abs(m(a, i) - m(b, i)) > tol) return false;
    return true;
}

// Marks later rows that duplicate an earlier active one; fixed rows win over unfixed ones.
void dedupe_rows(const Matrix& m, std::vector<char>& active, const std::vector<char>& fixed, double tol) {
    const std::size_t n = m.rows();
    if (m.cols() == 0) return;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return m(a, 0) < m(b, 0); });
    for (std::size_t x = 0; x < n; ++x) {
        const std::size_t a = order[x];
        if (!active[a]) continue;
        for (std::size_t y = x + 1; y < n && m(order[y], 0) - m(a, 0) <= tol; ++y) {
            const std::size_t b = order[y];
            if (!active[b] || !rows_equal(m, a, b, tol)) continue;
            // Keep the fixed one, else the lower index.
            std::size_t drop = (fixed[a] && !fixed[b]) ? b : (fixed[b] && !fixed[a]) ? a : std::max(a, b);
            active[drop] = 0;
            if (drop == a) break;
        }
    }
}

bool dominates(const Matrix& m, std::size_t g, std::size_t b) {
    for (std::size_t i = 0; i < m.cols(); ++i)
        if (m(g, i) < m(b, i)) return false;
    return true;
}

// Lexicographic comparison used to break ties at a witness point.
bool lex_greater(const Matrix& m, std::size_t a, std::size_t b) {
    for (std::size_t i = 0; i < m.cols(); ++i) {
        if (m(a, i) > m(b, i) + 1e-12) return true;
        if (m(a, i) < m(b, i) - 1e-12) return false;
    }
    return false;
}

double row_dot(const Matrix& m, std::size_t r, const Vec& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.cols(); ++i) s += m(r, i) * w[i];
    return s;
}

struct PruneOutcome {
    std::vector<char> kept; // per input row
    std::vector<Vec> weights;
};

// Prunes the projected rows over the simplex of coefficient space. Rows with
// `fixed` set are always part of the output and never tested.
PruneOutcome prune_projected(const Matrix& proj, const std::vector<char>& fixed, const PruneOptions& options,
                             PruneStats* stats) {
    const std::size_t n = proj.rows();
    const std::size_t k = proj.cols();
    PruneOutcome out{std::vector<char>(n, 0), std::vector<Vec>(n)};
    std::vector<char> active(n, 1);
    dedupe_rows(proj, active, fixed, 1e-12);
    const std::vector<char> unique = active;

    if (options.pointwise_prefilter) {
        for (std::size_t b = 0; b < n; ++b) {
            if (!active[b] || fixed[b]) continue;
            for (std::size_t g = 0; g < n; ++g) {
                if (g == b || !active[g]) continue;
                if (dominates(proj, g, b)) {
                    active[b] = 0;
                    break;
                }
            }
        }
    }

    std::vector<const double*> others;
    if (options.method == PruneMethod::lark) {
        std::vector<char> in_w(n, 0);
        std::vector<std::size_t> pending;
        for (std::size_t v = 0; v < n; ++v) {
            if (!active[v]) continue;
            if (fixed[v]) in_w[v] = 1;
            else pending.push_back(v);
        }
        auto best_at = [&](const Vec& w, std::size_t seed) {
            std::size_t best = seed;
            double best_val = row_dot(proj, seed, w);
            for (std::size_t v : pending) {
                double val = row_dot(proj, v, w);
                if (val > best_val + 1e-12 || (val >= best_val - 1e-12 && lex_greater(proj, v, best))) {
                    best = v;
                    best_val = std::max(val, best_val);
                }
            }
            return best;
        };
        auto promote = [&](std::size_t v, Vec w) {
            in_w[v] = 1;
            out.kept[v] = 1;
            out.weights[v] = std::move(w);
            pending.erase(std::find(pending.begin(), pending.end(), v));
        };
        // Seed with the winners at the corners.
        for (std::size_t i = 0; i < k && !pending.empty(); ++i) {
            Vec w(k, 0.0);
            w[i] = 1.0;
            std::size_t v = best_at(w, pending.front());
            bool fixed_better = false;
            for (std::size_t f = 0; f < n; ++f)
                if (in_w[f] && proj(f, i) >= proj(v, i) - options.margin) fixed_better = true;
            if (!fixed_better) promote(v, std::move(w));
        }
        while (!pending.empty()) {
            const std::size_t beta = pending.front();
            others.clear();
            for (std::size_t v = 0; v < n; ++v)
                if (in_w[v]) others.push_back(proj.row(v));
            auto wit = witness_projected(proj.row(beta), others, k, stats);
            if (wit.advantage <= options.margin) {
                pending.erase(pending.begin());
                continue;
            }
            promote(best_at(wit.weights, beta), wit.weights);
        }
    } else {
        for (std::size_t b = 0; b < n; ++b) {
            if (!active[b]) continue;
            if (fixed[b]) {
                out.kept[b] = 1;
                continue;
            }
            // original_set compares against every distinct input, discarded or not.
            const auto& pool = options.method == PruneMethod::original_set ? unique : active;
            others.clear();
            for (std::size_t v = 0; v < n; ++v)
                if (v != b && pool[v]) others.push_back(proj.row(v));
            auto wit = witness_projected(proj.row(b), others, k, stats);
            if (wit.advantage > options.margin) {
                out.kept[b] = 1;
                out.weights[b] = std::move(wit.weights);
            } else {
                active[b] = 0;
            }
        }
    }
    return out;
}

void check_uniform_dimension(const VectorSet& set) {
    if (set.vectors.empty()) return;
    const std::size_t d = set.vectors.front().values.size();
    for (const auto& v : set.vectors)
        if (v.values.size() != d) throw UsageError("vector set mixes dimensions");
    if (set.support && set.support->states.size() != d)
        throw UsageError("vector set support does not match vector length");
}

std::optional<Witness> witness_over(const AlphaVector& beta, const VectorSet& others, const SimplexBasis& basis,
                                    double margin, PruneStats* stats) {
    if (basis.points.empty()) throw UsageError("witness LP over an empty basis");
    VectorSet all = others;
    all.vectors.insert(all.vectors.begin(), beta);
    check_uniform_dimension(all);
    Matrix proj = project(all, basis);
    std::vector<const double*> rows;
    for (std::size_t v = 1; v < proj.rows(); ++v) rows.push_back(proj.row(v));
    auto wit = witness_projected(proj.row(0), rows, proj.cols(), stats);
    if (!(wit.advantage > margin)) return std::nullopt;
    Witness w{witness_belief(basis, wit.weights), wit.advantage, wit.weights};
    return w;
}

std::optional<History> history_of(const SimplexTag& tag) {
    if (auto h = std::get_if<History>(&tag)) return *h;
    if (auto p = std::get_if<ActionObservation>(&tag)) return History{{*p}};
    if (auto s = std::get_if<ObservationSupport>(&tag)) return History{{s->pair}};
    return std::nullopt;
}

} // namespace

VectorSet dedupe(const VectorSet& set, double tolerance) {
    check_uniform_dimension(set);
    const std::size_t n = set.vectors.size();
    const std::size_t d = n ? set.vectors.front().values.size() : 0;
    Matrix m(n, d);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t i = 0; i < d; ++i) m(v, i) = set.vectors[v].values[i];
    std::vector<char> active(n, 1);
    dedupe_rows(m, active, std::vector<char>(n, 0), tolerance);
    VectorSet out{{}, set.support, set.region};
    for (std::size_t v = 0; v < n; ++v)
        if (active[v]) out.vectors.push_back(set.vectors[v]);
    return out;
}

std::optional<Witness> space_witness_lp(const AlphaVector& beta, const VectorSet& others, double margin,
                                        PruneStats* stats) {
    const std::size_t n = others.support ? others.support->states.size() : beta.values.size();
    if (others.support) {
        // Low-dimension set: the region is the simplex on its support.
        SimplexBasis basis;
        int num_states = 0;
        for (int s : others.support->states) num_states = std::max(num_states, s + 1);
        for (int s : others.support->states) basis.points.push_back(Belief::unit(num_states, s));
        return witness_over(beta, others, basis, margin, stats);
    }
    return witness_over(beta, others, full_space_basis(static_cast<int>(n)), margin, stats);
}

std::optional<Witness> simplex_witness_lp(const AlphaVector& beta, const VectorSet& others,
                                          const SimplexBasis& basis, double margin, PruneStats* stats) {
    return witness_over(beta, others, basis, margin, stats);
}

VectorSet union_prune(const VectorSet& set, std::span<const SimplexBasis> bases, const PruneOptions& options,
                      PruneStats* stats, std::vector<int>* first_basis) {
    check_uniform_dimension(set);
    const std::size_t n = set.vectors.size();
    std::vector<int> origin(n, -1);
    std::vector<char> kept(n, 0);
    for (std::size_t bi = 0; bi < bases.size(); ++bi) {
        const SimplexBasis& basis = bases[bi];
        if (basis.points.empty()) continue;
        Matrix proj = project(set, basis);
        auto outcome = prune_projected(proj, kept, options, stats);
        for (std::size_t v = 0; v < n; ++v) {
            if (outcome.kept[v] && !kept[v]) {
                kept[v] = 1;
                origin[v] = static_cast<int>(bi);
            }
        }
    }
    VectorSet out{{}, set.support, set.region};
    if (first_basis) first_basis->clear();
    for (std::size_t v = 0; v < n; ++v) {
        if (!kept[v]) continue;
        AlphaVector alpha = set.vectors[v];
        if (auto h = history_of(bases[static_cast<std::size_t>(origin[v])].tag)) alpha.history = std::move(h);
        out.vectors.push_back(std::move(alpha));
        if (first_basis) first_basis->push_back(origin[v]);
    }
    return out;
}

VectorSet simplex_prune(const VectorSet& set, const SimplexBasis& basis, const PruneOptions& options,
                        PruneStats* stats) {
    check_uniform_dimension(set);
    if (basis.points.empty()) throw UsageError("simplex_prune over an empty basis");
    Matrix proj = project(set, basis);
    auto outcome = prune_projected(proj, std::vector<char>(set.vectors.size(), 0), options, stats);
    VectorSet out{{}, set.support, set.region};
    for (std::size_t v = 0; v < set.vectors.size(); ++v)
        if (outcome.kept[v]) out.vectors.push_back(set.vectors[v]);
    return out;
}

VectorSet space_prune(const VectorSet& set, int num_states, const PruneOptions& options, PruneStats* stats) {
    if (set.support) {
        SimplexBasis basis;
        for (int s : set.support->states) basis.points.push_back(Belief::unit(num_states, s));
        return simplex_prune(set, basis, options, stats);
    }
    return simplex_prune(set, full_space_basis(num_states), options, stats);
}

double vector_value(const AlphaVector& alpha, const std::optional<ObservationSupport>& support, const Belief& b) {
    if (support) {
        double s = 0.0;
        for (std::size_t j = 0; j < support->states.size(); ++j)
            s += alpha.values[j] * b[static_cast<std::size_t>(support->states[j])];
        return s;
    }
    if (alpha.values.size() != b.size()) throw UsageError("vector and belief dimensions differ");
    return dot(alpha.values, b.values());
}

InducedValue induced_value(const VectorSet& set, const Belief& b) {
    InducedValue out{-kInf, -1};
    for (std::size_t v = 0; v < set.vectors.size(); ++v) {
        double val = vector_value(set.vectors[v], set.support, b);
        if (val > out.value) {
            out.value = val;
            out.index = static_cast<int>(v);
        }
    }
    return out;
}

double max_envelope_gap(const VectorSet& upper, const VectorSet& lower, const SimplexBasis& basis,
                        PruneStats* stats) {
    if (lower.vectors.empty()) throw UsageError("max_envelope_gap: empty comparison set");
    if (upper.vectors.empty()) return -kInf;
    check_uniform_dimension(upper);
    check_uniform_dimension(lower);
    const Matrix pu = project(upper, basis);
    const Matrix pl = project(lower, basis);
    const std::size_t k = pu.cols();
    Vec corner_max(k, -kInf);
    for (std::size_t j = 0; j < pl.rows(); ++j)
        for (std::size_t i = 0; i < k; ++i) corner_max[i] = std::max(corner_max[i], pl(j, i));

    std::vector<const double*> rows;
    for (std::size_t j = 0; j < pl.rows(); ++j) rows.push_back(pl.row(j));

    double best = -kInf;
    for (std::size_t a = 0; a < pu.rows(); ++a)
        for (std::size_t i = 0; i < k; ++i) best = std::max(best, pu(a, i) - corner_max[i]);
    for (std::size_t a = 0; a < pu.rows(); ++a) {
        double upper_bound = kInf;
        for (std::size_t j = 0; j < pl.rows() && upper_bound > best; ++j) {
            double worst = -kInf;
            for (std::size_t i = 0; i < k; ++i) worst = std::max(worst, pu(a, i) - pl(j, i));
            upper_bound = std::min(upper_bound, worst);
        }
        if (upper_bound <= best) continue;
        auto wit = witness_projected(pu.row(a), rows, k, stats);
        best = std::max(best, wit.advantage);
    }
    return best;
}

VectorSet embed_full(const VectorSet& set, int num_states) {
    if (!set.support) return set;
    VectorSet out{{}, std::nullopt, set.region};
    for (const auto& v : set.vectors) {
        AlphaVector full = v;
        full.values.assign(static_cast<std::size_t>(num_states), 0.0);
        for (std::size_t j = 0; j < set.support->states.size(); ++j)
            full.values[static_cast<std::size_t>(set.support->states[j])] = v.values[j];
        out.vectors.push_back(std::move(full));
    }
    return out;
}

} // namespace rvi
