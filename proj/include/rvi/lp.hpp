#pragma once

#include "rvi/types.hpp"

#include <span>

namespace rvi {

/**
 * Dense linear program in inequality form:
 *
 *   maximize  c^T x   subject to  A x <= b,  x >= 0.
 *
 * Equalities and free variables are left to the caller (split rows or
 * substitute); every LP in this library has a handful of columns and can be
 * written that way cheaply.
 */
struct LinearProgram {
    Matrix constraints; ///< m x n
    Vec bounds;         ///< m
    Vec objective;      ///< n
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vec x;
    double value = 0.0;
    Vec duals; ///< one per constraint row, >= 0
    int pivots = 0;
};

struct LpOptions {
    double pivot_tolerance = 1e-11;
    double feasibility_tolerance = 1e-9;
    double optimality_tolerance = 1e-11;
    int max_pivots = 100000;
    /// Consecutive degenerate pivots before switching from Dantzig to Bland pricing.
    int degenerate_streak = 50;
    /// Phase-two pivots between rebuilds of the dictionary from the original data.
    int refactor_interval = 100;
};

/**
 * Two-phase simplex on a condensed (dictionary) tableau. Only the nonbasic
 * columns are stored, so a pivot costs O(m n) however many rows there are.
 * Long phase-two runs are refactored from the original data, and an
 * unbounded or optimal verdict reached after many pivots is re-checked on a
 * refactored dictionary. Throws SolverError when the pivot budget runs out.
 */
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

} // namespace rvi
