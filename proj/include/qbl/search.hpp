/**
 *  @file qbl/search.hpp
 *  @brief Deterministic derivative-free local search.
 *
 *  Gauges of quasi-normed spaces are only piecewise smooth, so every local
 *  refinement in the library uses compass search: poll +/- each coordinate
 *  direction, accept the first improvement, halve the step when a full poll
 *  fails. No randomness, so results are reproducible.
 */

#ifndef QBL_SEARCH_HPP
#define QBL_SEARCH_HPP

#include <cmath>
#include <cstddef>

#include "qbl/numkernel.hpp"

namespace qbl {

struct CompassOptions {
    double initial_step = 0.25;
    double min_step = 1e-10;
    std::size_t max_evals = 2000;
};

/// Minimizes f starting from x (updated in place). Returns f(x) at exit.
template <class F>
double compass_minimize(F &&f, Vector &x, const CompassOptions &opt) {
    double best = f(x);
    std::size_t evals = 1;
    double step = opt.initial_step;
    const std::size_t n = x.size();
    while (step > opt.min_step && evals < opt.max_evals) {
        bool improved = false;
        for (std::size_t i = 0; i < n && evals < opt.max_evals; ++i) {
            for (double dir : {1.0, -1.0}) {
                const double saved = x[i];
                x[i] = saved + dir * step;
                const double val = f(x);
                ++evals;
                if (val < best) {
                    best = val;
                    improved = true;
                    // keep moving while it pays
                    for (;;) {
                        if (evals >= opt.max_evals)
                            break;
                        const double here = x[i];
                        x[i] = here + dir * step;
                        const double v2 = f(x);
                        ++evals;
                        if (v2 < best) {
                            best = v2;
                        } else {
                            x[i] = here;
                            break;
                        }
                    }
                    break;
                }
                x[i] = saved;
            }
        }
        if (!improved)
            step *= 0.5;
    }
    return best;
}

/// Maximizing counterpart of compass_minimize.
template <class F>
double compass_maximize(F &&f, Vector &x, const CompassOptions &opt) {
    return -compass_minimize([&](const Vector &y) { return -f(y); }, x, opt);
}

} // namespace qbl

#endif // QBL_SEARCH_HPP
