#include "rvi/lp.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace rvi {
namespace {

// Dictionary: basic(i) = rhs(i) - sum_j coef(i,j) * nonbasic(j)
//             z        = value  + sum_j cost(j)   * nonbasic(j)
// Variable ids: [0, n) structural, [n, n+m) slacks, n+m auxiliary.
class Dictionary {
public:
    Dictionary(const LinearProgram& lp, const LpOptions& options)
        : lp_(lp), m_(lp.constraints.rows()), n_(lp.constraints.cols()), options_(options),
          coef_(m_, n_ + 1), rhs_(lp.bounds), cost_(n_ + 1, 0.0), basic_(m_), nonbasic_(n_ + 1) {
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) coef_(i, j) = lp.constraints(i, j);
            coef_(i, n_) = -1.0; // auxiliary column, used in phase one only
            basic_[i] = static_cast<int>(n_ + i);
        }
        for (std::size_t j = 0; j <= n_; ++j) nonbasic_[j] = static_cast<int>(j);
        nonbasic_[n_] = aux_id();
    }

    LpSolution run(const Vec& objective) {
        LpSolution out;
        if (!phase_one()) {
            out.status = LpStatus::infeasible;
            out.pivots = pivots_;
            return out;
        }
        // Phase two: express the real objective over the current nonbasics.
        std::fill(cost_.begin(), cost_.end(), 0.0);
        value_ = 0.0;
        for (std::size_t j = 0; j < cols(); ++j) {
            int v = nonbasic_[j];
            if (v < static_cast<int>(n_)) cost_[j] += objective[static_cast<std::size_t>(v)];
        }
        for (std::size_t i = 0; i < m_; ++i) {
            int v = basic_[i];
            if (v >= static_cast<int>(n_)) continue;
            double c = objective[static_cast<std::size_t>(v)];
            if (c == 0.0) continue;
            value_ += c * rhs_[i];
            for (std::size_t j = 0; j < cols(); ++j) cost_[j] -= c * coef_(i, j);
        }
        objective_ = &objective;
        if (!optimize()) {
            out.status = LpStatus::unbounded;
            out.pivots = pivots_;
            return out;
        }
        out.status = LpStatus::optimal;
        out.value = value_;
        out.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basic_[i] < static_cast<int>(n_)) out.x[static_cast<std::size_t>(basic_[i])] = rhs_[i];
        out.duals.assign(m_, 0.0);
        for (std::size_t j = 0; j < cols(); ++j) {
            int v = nonbasic_[j];
            if (v >= static_cast<int>(n_) && v < aux_id()) out.duals[static_cast<std::size_t>(v) - n_] = -cost_[j];
        }
        out.pivots = pivots_;
        return out;
    }

private:
    int aux_id() const { return static_cast<int>(n_ + m_); }
    std::size_t cols() const { return active_cols_; }

    bool phase_one() {
        std::size_t worst = m_;
        double worst_rhs = -options_.feasibility_tolerance;
        for (std::size_t i = 0; i < m_; ++i) {
            if (rhs_[i] < worst_rhs) {
                worst_rhs = rhs_[i];
                worst = i;
            }
        }
        if (worst == m_) {
            drop_aux_column();
            for (auto& r : rhs_) r = std::max(r, 0.0);
            return true;
        }
        std::fill(cost_.begin(), cost_.end(), 0.0);
        cost_[n_] = -1.0; // maximize -aux
        value_ = 0.0;
        pivot(worst, n_);
        if (!optimize()) throw SolverError("LP phase one reported unbounded");
        if (value_ < -options_.feasibility_tolerance) return false;

        // Drive the auxiliary variable out of the basis if it is still there.
        for (std::size_t i = 0; i < m_; ++i) {
            if (basic_[i] != aux_id()) continue;
            std::size_t best = cols();
            double best_abs = options_.pivot_tolerance;
            for (std::size_t j = 0; j < cols(); ++j) {
                if (std::abs(coef_(i, j)) > best_abs) {
                    best_abs = std::abs(coef_(i, j));
                    best = j;
                }
            }
            if (best == cols()) {
                // Row is all zeros: the auxiliary stays basic at level zero forever.
                rhs_[i] = 0.0;
                frozen_row_ = i;
            } else {
                pivot(i, best);
            }
        }
        // The auxiliary is now nonbasic (unless frozen); move its column to the end and drop it.
        for (std::size_t j = 0; j < cols(); ++j) {
            if (nonbasic_[j] == aux_id()) {
                swap_columns(j, cols() - 1);
                drop_aux_column();
                break;
            }
        }
        for (auto& r : rhs_) r = std::max(r, 0.0);
        return true;
    }

    void drop_aux_column() { active_cols_ = n_; }

    void swap_columns(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < m_; ++i) std::swap(coef_(i, a), coef_(i, b));
        std::swap(cost_[a], cost_[b]);
        std::swap(nonbasic_[a], nonbasic_[b]);
    }

    // Returns false when unbounded.
    bool optimize() {
        int degenerate = 0;
        for (;;) {
            bool bland = degenerate >= options_.degenerate_streak;
            std::size_t enter = cols();
            double best = options_.optimality_tolerance;
            for (std::size_t j = 0; j < cols(); ++j) {
                if (cost_[j] <= options_.optimality_tolerance) continue;
                if (bland) {
                    if (enter == cols() || nonbasic_[j] < nonbasic_[enter]) enter = j;
                } else if (cost_[j] > best) {
                    best = cost_[j];
                    enter = j;
                }
            }
            if (enter == cols()) {
                // Confirm optimality on a freshly factored dictionary after a long run.
                if (since_refactor_ > options_.refactor_interval / 4 && refactor()) continue;
                return true;
            }

            // Two-pass (Harris) ratio test: find the step allowed when every
            // basic may dip to -feasibility_tolerance, then among rows blocking
            // within that step take the largest pivot. Bland mode keeps the
            // lowest-index rule but only over pivots of reasonable size.
            double step = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == frozen_row_) continue;
                const double a = coef_(i, enter);
                if (a <= options_.pivot_tolerance) continue;
                step = std::min(step, (std::max(rhs_[i], 0.0) + options_.feasibility_tolerance) / a);
            }
            std::size_t leave = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            double largest = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == frozen_row_) continue;
                const double a = coef_(i, enter);
                if (a <= options_.pivot_tolerance) continue;
                if (std::max(rhs_[i], 0.0) / a <= step) largest = std::max(largest, a);
            }
            for (std::size_t i = 0; i < m_; ++i) {
                if (i == frozen_row_) continue;
                const double a = coef_(i, enter);
                if (a <= options_.pivot_tolerance) continue;
                const double ratio = std::max(rhs_[i], 0.0) / a;
                if (ratio > step) continue;
                bool take;
                if (bland)
                    take = a >= 1e-3 * largest && (leave == m_ || basic_[i] < basic_[leave]);
                else
                    take = leave == m_ || a > coef_(leave, enter);
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == m_) {
                if (since_refactor_ > 0 && refactor()) continue;
                return false;
            }
            degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
            pivot(leave, enter);
            if (since_refactor_ >= options_.refactor_interval) refactor();
        }
    }

    // Rebuilds coef, rhs and (in phase two) cost from the original data for the
    // current basis, discarding accumulated rounding. Returns false when it
    // cannot (phase one, or a numerically singular basis).
    //
    // With k structural basics, exactly k slacks are nonbasic; their rows R
    // give a k x k system M x_B = b_R - A_RN x_N - s_R. Every other row is a
    // basic slack and follows by substitution, so the work is O(m k n).
    bool refactor() {
        since_refactor_ = 0;
        if (!objective_ || frozen_row_ != static_cast<std::size_t>(-1)) return false;
        const std::size_t n = n_, m = m_, nc = cols();
        const auto is_structural = [&](int v) { return v < static_cast<int>(n); };
        std::vector<std::size_t> rows; // constraint rows whose slack is nonbasic
        for (std::size_t j = 0; j < nc; ++j)
            if (!is_structural(nonbasic_[j])) rows.push_back(static_cast<std::size_t>(nonbasic_[j]) - n);
        std::vector<std::size_t> structural; // dictionary rows holding structural basics
        for (std::size_t i = 0; i < m; ++i)
            if (is_structural(basic_[i])) structural.push_back(i);
        const std::size_t k = rows.size();
        if (structural.size() != k) return false;

        // [M | A_RN | b_R], where column j of the middle block is nonbasic j restricted to R.
        const std::size_t width = k + nc + 1;
        Matrix g(k, width);
        for (std::size_t r = 0; r < k; ++r) {
            for (std::size_t c = 0; c < k; ++c)
                g(r, c) = lp_.constraints(rows[r], static_cast<std::size_t>(basic_[structural[c]]));
            for (std::size_t j = 0; j < nc; ++j) {
                const int v = nonbasic_[j];
                g(r, k + j) = is_structural(v) ? lp_.constraints(rows[r], static_cast<std::size_t>(v))
                                               : (static_cast<std::size_t>(v) - n == rows[r] ? 1.0 : 0.0);
            }
            g(r, width - 1) = lp_.bounds[rows[r]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            std::size_t p = c;
            for (std::size_t r = c + 1; r < k; ++r)
                if (std::abs(g(r, c)) > std::abs(g(p, c))) p = r;
            if (std::abs(g(p, c)) < 1e-12) return false;
            if (p != c)
                for (std::size_t j = 0; j < width; ++j) std::swap(g(p, j), g(c, j));
            const double inv = 1.0 / g(c, c);
            for (std::size_t j = c; j < width; ++j) g(c, j) *= inv;
            for (std::size_t r = 0; r < k; ++r) {
                if (r == c) continue;
                const double f = g(r, c);
                if (f == 0.0) continue;
                for (std::size_t j = c; j < width; ++j) g(r, j) -= f * g(c, j);
            }
        }
        // Row c of g now holds x_B[c] = g(c, end) - sum_j g(c, k + j) x_N[j].
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t i = structural[c];
            for (std::size_t j = 0; j < nc; ++j) coef_(i, j) = g(c, k + j);
            rhs_[i] = g(c, width - 1);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (is_structural(basic_[i])) continue;
            const std::size_t row = static_cast<std::size_t>(basic_[i]) - n;
            double rhs = lp_.bounds[row];
            for (std::size_t j = 0; j < nc; ++j) {
                const int v = nonbasic_[j];
                coef_(i, j) = is_structural(v) ? lp_.constraints(row, static_cast<std::size_t>(v)) : 0.0;
            }
            for (std::size_t c = 0; c < k; ++c) {
                const double a = lp_.constraints(row, static_cast<std::size_t>(basic_[structural[c]]));
                if (a == 0.0) continue;
                rhs -= a * g(c, width - 1);
                for (std::size_t j = 0; j < nc; ++j) coef_(i, j) -= a * g(c, k + j);
            }
            rhs_[i] = rhs;
        }
        for (std::size_t i = 0; i < m; ++i) rhs_[i] = std::max(rhs_[i], 0.0);
        const Vec& c = *objective_;
        auto cost_of = [&](int v) { return v < static_cast<int>(n) ? c[static_cast<std::size_t>(v)] : 0.0; };
        value_ = 0.0;
        for (std::size_t j = 0; j < nc; ++j) cost_[j] = cost_of(nonbasic_[j]);
        for (std::size_t i = 0; i < m; ++i) {
            const double cb = cost_of(basic_[i]);
            if (cb == 0.0) continue;
            value_ += cb * rhs_[i];
            for (std::size_t j = 0; j < nc; ++j) cost_[j] -= cb * coef_(i, j);
        }
        return true;
    }

    void pivot(std::size_t r, std::size_t e) {
        ++since_refactor_;
        if (++pivots_ > options_.max_pivots)
            throw SolverError("LP pivot budget exhausted (" + std::to_string(options_.max_pivots) + ")");
        const std::size_t nc = cols();
        const double a = coef_(r, e);
        const double inv = 1.0 / a;
        double* row_r = coef_.row(r);
        rhs_[r] *= inv;
        for (std::size_t j = 0; j < nc; ++j) row_r[j] *= inv;
        row_r[e] = inv;
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            double* row_i = coef_.row(i);
            const double f = row_i[e];
            if (f == 0.0) continue;
            rhs_[i] -= f * rhs_[r];
            for (std::size_t j = 0; j < nc; ++j) row_i[j] -= f * row_r[j];
            row_i[e] = -f * inv;
        }
        const double ce = cost_[e];
        if (ce != 0.0) {
            value_ += ce * rhs_[r];
            for (std::size_t j = 0; j < nc; ++j) cost_[j] -= ce * row_r[j];
            cost_[e] = -ce * inv;
        }
        std::swap(basic_[r], nonbasic_[e]);
    }

    const LinearProgram& lp_;
    const Vec* objective_ = nullptr; ///< set in phase two
    std::size_t m_;
    std::size_t n_;
    LpOptions options_;
    Matrix coef_;
    Vec rhs_;
    Vec cost_;
    double value_ = 0.0;
    std::vector<int> basic_;
    std::vector<int> nonbasic_;
    std::size_t active_cols_ = n_ + 1;
    std::size_t frozen_row_ = static_cast<std::size_t>(-1);
    int pivots_ = 0;
    int since_refactor_ = 0;
};

} // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
    const std::size_t m = lp.constraints.rows();
    const std::size_t n = lp.constraints.cols();
    if (lp.bounds.size() != m || lp.objective.size() != n)
        throw UsageError("solve_lp: dimension mismatch");
    Dictionary dict(lp, options);
    return dict.run(lp.objective);
}

} // namespace rvi
