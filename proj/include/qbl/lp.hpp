/**
 *  @file qbl/lp.hpp
 *  @brief Dense two-phase simplex with Bland's pivoting rule.
 *
 *  Solves  minimize c^T x  subject to  A x = b, x >= 0.
 *  Problems here are tiny (a handful of rows, at most a few thousand
 *  columns), so a dense tableau is fine. Bland's rule makes every pivot
 *  sequence deterministic and rules out cycling.
 */

#ifndef QBL_LP_HPP
#define QBL_LP_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include "qbl/numkernel.hpp"

namespace qbl {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    double objective = 0.0;
    Vector x;
    std::size_t pivots = 0;
};

namespace detail {

class SimplexTableau {
  public:
    SimplexTableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0) {}

    double &at(std::size_t r, std::size_t c) { return t_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (cols_ + 1) + c]; }
    double &rhs(std::size_t r) { return at(r, cols_); }
    double &cost(std::size_t c) { return at(rows_, c); }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= cols_; ++c)
            at(pr, c) /= p;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr)
                continue;
            const double f = at(r, pc);
            if (f == 0.0)
                continue;
            for (std::size_t c = 0; c <= cols_; ++c)
                at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

  private:
    std::size_t rows_, cols_;
    std::vector<double> t_;
};

/// Runs Bland-rule simplex on columns [0, active_cols). Returns false when unbounded.
inline LpStatus run_simplex(SimplexTableau &t, std::vector<std::size_t> &basis, std::size_t active_cols,
                            std::size_t &pivots, std::size_t max_pivots, double tol) {
    for (;;) {
        if (pivots >= max_pivots)
            return LpStatus::iteration_limit;
        std::size_t enter = active_cols;
        for (std::size_t c = 0; c < active_cols; ++c)
            if (t.cost(c) < -tol) {
                enter = c;
                break;
            }
        if (enter == active_cols)
            return LpStatus::optimal;
        std::size_t leave = t.rows();
        double best_ratio = 0.0;
        for (std::size_t r = 0; r < t.rows(); ++r) {
            const double a = t.at(r, enter);
            if (a <= tol)
                continue;
            const double ratio = t.rhs(r) / a;
            if (leave == t.rows() || ratio < best_ratio - tol ||
                (std::abs(ratio - best_ratio) <= tol && basis[r] < basis[leave])) {
                leave = r;
                best_ratio = ratio;
            }
        }
        if (leave == t.rows())
            return LpStatus::unbounded;
        t.pivot(leave, enter);
        basis[leave] = enter;
        ++pivots;
    }
}

} // namespace detail

/// minimize c^T x  s.t.  A x = b, x >= 0.
inline LpResult solve_lp(const Matrix &a, std::span<const double> b, std::span<const double> c,
                         double tol = 1e-10, std::size_t max_pivots = 100000) {
    const std::size_t m = a.rows(), n = a.cols();
    if (b.size() != m || c.size() != n)
        throw DimensionError("solve_lp: shape mismatch");
    require_finite(a.entries(), "solve_lp");
    require_finite(b, "solve_lp");
    require_finite(c, "solve_lp");

    // Columns: n structural, then m artificials.
    detail::SimplexTableau t(m, n + m);
    std::vector<std::size_t> basis(m);
    for (std::size_t r = 0; r < m; ++r) {
        const double sgn = b[r] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j)
            t.at(r, j) = sgn * a(r, j);
        t.at(r, n + r) = 1.0;
        t.rhs(r) = sgn * b[r];
        basis[r] = n + r;
    }
    // Phase 1 objective: sum of artificials, expressed in reduced form.
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t j = 0; j < n; ++j)
            t.cost(j) -= t.at(r, j);
        t.at(m, n + m) -= t.rhs(r);
    }

    LpResult result;
    LpStatus st = detail::run_simplex(t, basis, n + m, result.pivots, max_pivots, tol);
    if (st == LpStatus::iteration_limit) {
        result.status = st;
        return result;
    }
    double bscale = 1.0;
    for (double v : b)
        bscale = std::max(bscale, std::abs(v));
    if (-t.at(m, n + m) > 1e-8 * bscale) {
        result.status = LpStatus::infeasible;
        return result;
    }

    // Drive remaining artificials out of the basis.
    std::vector<bool> redundant(m, false);
    for (std::size_t r = 0; r < m; ++r) {
        if (basis[r] < n)
            continue;
        std::size_t col = n;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(t.at(r, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col == n) {
            redundant[r] = true;
            continue;
        }
        t.pivot(r, col);
        basis[r] = col;
        ++result.pivots;
    }
    // Zero the artificial columns so they can never re-enter, and neutralize
    // redundant rows.
    for (std::size_t r = 0; r <= m; ++r)
        for (std::size_t j = n; j < n + m; ++j)
            t.at(r, j) = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        if (redundant[r])
            for (std::size_t j = 0; j <= n + m; ++j)
                t.at(r, j) = 0.0;

    // Phase 2 objective in reduced form.
    for (std::size_t j = 0; j <= n + m; ++j)
        t.at(m, j) = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        t.cost(j) = c[j];
    for (std::size_t r = 0; r < m; ++r) {
        if (redundant[r] || basis[r] >= n)
            continue;
        const double cb = c[basis[r]];
        if (cb == 0.0)
            continue;
        for (std::size_t j = 0; j <= n + m; ++j)
            t.at(m, j) -= cb * t.at(r, j);
    }
    st = detail::run_simplex(t, basis, n, result.pivots, max_pivots, tol);
    result.status = st;
    if (st != LpStatus::optimal)
        return result;
    result.x.assign(n, 0.0);
    for (std::size_t r = 0; r < m; ++r)
        if (!redundant[r] && basis[r] < n)
            result.x[basis[r]] = std::max(0.0, t.rhs(r));
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        result.objective += c[j] * result.x[j];
    return result;
}

} // namespace qbl

#endif // QBL_LP_HPP
