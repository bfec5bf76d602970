/**
 *  @file qbl/interpolation.hpp
 *  @brief K-functionals and (theta,2) interpolation norms between two
 *  equivalent r-norms on the same coordinate space.
 */

#ifndef QBL_INTERPOLATION_HPP
#define QBL_INTERPOLATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "qbl/numkernel.hpp"
#include "qbl/parallel.hpp"
#include "qbl/randsigns.hpp"
#include "qbl/search.hpp"
#include "qbl/spaces.hpp"

namespace qbl {

using Gauge = std::function<double(std::span<const double>)>;

inline constexpr std::size_t kEquivalenceDirections = 1000;

/// Two equivalent r-norm gauges with c * g0 <= g1 <= C * g0.
struct NormPair {
    std::size_t dim = 0;
    Gauge gauge0;
    Gauge gauge1;
    double r = 1.0;
    double c = 1.0;
    double C = 1.0;

    /// Equivalence constants supplied by the caller.
    static NormPair with_constants(std::size_t dim, Gauge g0, Gauge g1, double r, double c, double C) {
        if (dim == 0)
            throw DimensionError("NormPair: zero dimension");
        if (!(r > 0.0) || r > 1.0)
            throw DomainError("NormPair: r must lie in (0, 1]");
        if (!(c > 0.0) || !(C >= c) || !std::isfinite(C))
            throw DomainError("NormPair: need 0 < c <= C < inf");
        return {dim, std::move(g0), std::move(g1), r, c, C};
    }

    /// Equivalence constants witnessed on random directions (seeded, so reproducible).
    static NormPair witnessed(std::size_t dim, Gauge g0, Gauge g1, double r, std::uint64_t seed = 0) {
        RandomSource rng(seed);
        double lo = kInf, hi = 0.0;
        auto probe = [&](const Vector &v) {
            const double a = g0(v), b = g1(v);
            if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
                throw DegenerateError("NormPair: gauges are not equivalent norms");
            lo = std::min(lo, b / a);
            hi = std::max(hi, b / a);
        };
        for (std::size_t i = 0; i < dim; ++i)
            probe(unit_vector(dim, i));
        for (std::size_t k = 0; k < kEquivalenceDirections; ++k)
            probe(random_direction(rng, dim));
        return with_constants(dim, std::move(g0), std::move(g1), r, lo, hi);
    }

    static NormPair from_spaces(const QuasiNormedSpace &x0, const QuasiNormedSpace &x1) {
        if (x0.dim() != x1.dim())
            throw DimensionError("NormPair: spaces have different dimensions");
        return witnessed(
            x0.dim(), [x0](std::span<const double> v) { return x0.gauge(v); },
            [x1](std::span<const double> v) { return x1.gauge(v); }, std::min(x0.r_exponent(), x1.r_exponent()));
    }

    /// Both gauges equal to the gauge of x.
    static NormPair equal(const QuasiNormedSpace &x) {
        Gauge g = [x](std::span<const double> v) { return x.gauge(v); };
        return with_constants(x.dim(), g, g, x.r_exponent(), 1.0, 1.0);
    }

    /// The pair (l_2^N(X_0), l_2^N(X_1)) on blocks of length dim.
    NormPair l2_sum(std::size_t n) const {
        if (n == 0)
            throw DimensionError("NormPair::l2_sum: zero blocks");
        const std::size_t d = dim;
        auto lift = [d, n](Gauge g) -> Gauge {
            return [g, d, n](std::span<const double> v) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double a = g(v.subspan(i * d, d));
                    s += a * a;
                }
                return std::sqrt(s);
            };
        };
        return with_constants(d * n, lift(gauge0), lift(gauge1), r, c, C);
    }
};

struct ThetaParams {
    double theta = 0.5;
    double s = 2.0;
    std::size_t nodes = 400;
    double t_min = 1e-6;
    double t_max = 1e6;
    SearchBudget budget{2, 600};
    unsigned threads = 1;

    void validate() const {
        if (!(theta > 0.0 && theta < 1.0))
            throw DomainError("ThetaParams: theta must lie in (0, 1)");
        if (nodes < 2)
            throw DomainError("ThetaParams: need at least two quadrature nodes");
        if (!(t_min > 0.0) || t_min > 1e-4 || t_max < 1e4 || !std::isfinite(t_max))
            throw DomainError("ThetaParams: grid must cover [1e-4, 1e4]");
        if (budget.refine_evals == 0)
            throw DomainError("ThetaParams: zero minimizer budget");
    }
};

/// K_s(t, x): `value` is an achieved split (an upper bound on the infimum),
/// `lower` follows from the r-triangle inequality and the pair constants.
struct KValue {
    double value = 0.0;
    double lower = 0.0;
};

inline KValue k_functional(const NormPair &pair, double s, double t, std::span<const double> x,
                           const SearchBudget &budget) {
    if (x.size() != pair.dim)
        throw DimensionError("k_functional: vector length mismatch");
    if (!(t > 0.0) || !std::isfinite(t))
        throw DomainError("k_functional: t must be positive and finite");
    if (!(s >= pair.r))
        throw DomainError("k_functional: s must be at least r");
    if (budget.refine_evals == 0)
        throw DomainError("k_functional: zero budget");
    const std::size_t n = pair.dim;
    const Vector xv(x.begin(), x.end());
    const double scale = norm_inf(xv);
    if (scale == 0.0)
        return {};

    Vector x1(n);
    auto objective = [&](const Vector &x0) {
        for (std::size_t i = 0; i < n; ++i)
            x1[i] = xv[i] - x0[i];
        const double a = pair.gauge0(x0);
        const double b = t * pair.gauge1(x1);
        if (s == 2.0)
            return std::hypot(a, b);
        const double m = std::max(a, b);
        if (m == 0.0)
            return 0.0;
        return m * std::pow(std::pow(a / m, s) + std::pow(b / m, s), 1.0 / s);
    };

    std::vector<Vector> starts{Vector(n, 0.0), xv, scaled(xv, 0.5)};
    if (n <= 10) {
        for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
            Vector v(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                if ((mask >> i) & 1)
                    v[i] = xv[i];
            starts.push_back(std::move(v));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            Vector v(n, 0.0);
            v[i] = xv[i];
            starts.push_back(std::move(v));
        }
    }
    RandomSource rng(0x4b66756e63ULL); // fixed: the functional is a pure function of its inputs
    for (std::size_t k = 0; k < budget.random_starts; ++k) {
        Vector v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = rng.uniform() * xv[i];
        starts.push_back(std::move(v));
    }

    Vector best = starts.front();
    double best_val = kInf;
    for (const Vector &v : starts) {
        const double f = objective(v);
        if (f < best_val) {
            best_val = f;
            best = v;
        }
    }
    CompassOptions opt;
    opt.initial_step = 0.25 * scale;
    opt.min_step = 1e-11 * scale;
    opt.max_evals = budget.refine_evals;
    best_val = std::min(best_val, compass_minimize(objective, best, opt));

    const double alpha = std::pow(2.0, 1.0 / s - 1.0 / pair.r);
    const double lower = alpha * std::max(std::min(1.0, t * pair.c) * pair.gauge0(xv),
                                          std::min(1.0 / pair.C, t) * pair.gauge1(xv));
    return {best_val, std::min(lower, best_val)};
}

struct ThetaNorm {
    double value = 0.0; // quadrature of computed K_2 plus the analytic upper tails
    double lower = 0.0; // quadrature of the K_2 lower bracket plus lower tails
    double tail = 0.0;  // upper-tail share of the squared integral
};

/// (theta(1-theta))^{1/2} (int_0^inf K_2(t,x)^2 t^{-1-2 theta} dt)^{1/2}, trapezoid in log t.
inline ThetaNorm theta_norm(const NormPair &pair, const ThetaParams &params, std::span<const double> x) {
    params.validate();
    if (x.size() != pair.dim)
        throw DimensionError("theta_norm: vector length mismatch");
    if (norm_inf(x) == 0.0)
        return {};
    const double th = params.theta;
    const std::size_t m = params.nodes;
    const double u0 = std::log(params.t_min), u1 = std::log(params.t_max);
    const double h = (u1 - u0) / static_cast<double>(m - 1);
    std::vector<KValue> ks(m);
    parallel_for(m, params.threads, [&](std::size_t k) {
        const double t = std::exp(u0 + h * static_cast<double>(k));
        ks[k] = k_functional(pair, 2.0, t, x, params.budget);
    });
    double hi = 0.0, lo = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double u = u0 + h * static_cast<double>(k);
        const double w = (k == 0 || k + 1 == m) ? 0.5 * h : h;
        const double weight = w * std::exp(-2.0 * th * u);
        hi += weight * ks[k].value * ks[k].value;
        lo += weight * ks[k].lower * ks[k].lower;
    }
    const double g0 = pair.gauge0(x), g1 = pair.gauge1(x);
    const double head = std::pow(params.t_min, 2.0 - 2.0 * th) / (2.0 - 2.0 * th);
    const double foot = std::pow(params.t_max, -2.0 * th) / (2.0 * th);
    // K_2 <= min(g0, t g1) bounds both tails from above
    const double tail = g1 * g1 * head + g0 * g0 * foot;
    const double alpha = std::pow(2.0, 0.5 - 1.0 / pair.r);
    double tail_lo = 0.0;
    if (params.t_min <= 1.0 / pair.C)
        tail_lo += alpha * alpha * g1 * g1 * head;
    if (params.t_max >= 1.0 / pair.c)
        tail_lo += alpha * alpha * g0 * g0 * foot;
    const double f = th * (1.0 - th);
    return {std::sqrt(f * (hi + tail)), std::sqrt(f * (lo + tail_lo)), f * tail};
}

/// 1-dim equal absolute-value norms: theta_norm(x) / |x|.
inline double theta_norm_line_constant(double theta) {
    return std::sqrt(theta * (1.0 - theta) * (std::numbers::pi / 2.0) / std::sin(std::numbers::pi * theta));
}

struct SandwichCheck {
    double ratio = 0.0; // theta_norm(x) / gauge(x)
    double lower = 0.0; // 2^{1/2-1/r} / sqrt(2)
    double upper = 0.0; // 1 / sqrt(2)
    bool pass = false;
};

/// Equal gauges: theta_norm / gauge lies in [2^{1/2-1/r}, 1] / sqrt(2).
inline SandwichCheck equal_gauge_sandwich(const QuasiNormedSpace &x, const ThetaParams &params,
                                          std::span<const double> v, double tolerance = 0.02) {
    const double g = x.gauge(v);
    if (!(g > 0.0))
        throw DegenerateError("equal_gauge_sandwich: zero vector");
    SandwichCheck out;
    out.ratio = theta_norm(NormPair::equal(x), params, v).value / g;
    out.lower = std::pow(2.0, 0.5 - 1.0 / x.r_exponent()) / std::numbers::sqrt2;
    out.upper = 1.0 / std::numbers::sqrt2;
    out.pass = out.ratio >= out.lower * (1.0 - tolerance) && out.ratio <= out.upper * (1.0 + tolerance);
    return out;
}

struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

/// Interpolated operator norm against ||u||_0^{1-theta} ||u||_1^theta.
/// lhs is a sampled lower estimate of the interpolated norm; norm0 and norm1
/// are the endpoint operator norms.
inline BoundCheck interp_operator_bound_check(const Matrix &u, const NormPair &source, const NormPair &target,
                                              double norm0, double norm1, const ThetaParams &params,
                                              std::size_t samples, RandomSource &rng, double tolerance = 0.02) {
    params.validate();
    if (u.cols() != source.dim || u.rows() != target.dim)
        throw DimensionError("interp_operator_bound_check: operator shape mismatch");
    if (!(norm0 >= 0.0) || !(norm1 >= 0.0))
        throw DomainError("interp_operator_bound_check: endpoint norms must be nonnegative");
    BoundCheck out;
    out.rhs = std::pow(norm0, 1.0 - params.theta) * std::pow(norm1, params.theta);
    std::vector<Vector> probes;
    for (std::size_t i = 0; i < source.dim; ++i)
        probes.push_back(unit_vector(source.dim, i));
    for (std::size_t k = 0; k < samples; ++k)
        probes.push_back(random_direction(rng, source.dim));
    for (const Vector &x : probes) {
        const Vector y = u.apply(x);
        if (norm_inf(y) == 0.0)
            continue;
        const double num = theta_norm(target, params, y).value;
        const double den = theta_norm(source, params, x).value;
        out.lhs = std::max(out.lhs, num / den);
    }
    out.pass = out.lhs <= out.rhs * (1.0 + tolerance);
    return out;
}

inline constexpr std::size_t kMaxSumBlocks = 4;

/// theta-norm of (x_1..x_N) in the l_2^N-sum pair against the l_2 sum of the
/// individual theta-norms.
inline BoundCheck l2_sum_check(const NormPair &pair, const ThetaParams &params, const std::vector<Vector> &xs,
                               double tolerance = 0.02) {
    if (xs.empty() || xs.size() > kMaxSumBlocks)
        throw DimensionError("l2_sum_check: need 1 to 4 vectors");
    for (const Vector &x : xs)
        if (x.size() != pair.dim)
            throw DimensionError("l2_sum_check: vector length mismatch");
    BoundCheck out;
    double s = 0.0;
    for (const Vector &x : xs) {
        const double v = theta_norm(pair, params, x).value;
        s += v * v;
    }
    out.rhs = std::sqrt(s);
    out.lhs = theta_norm(pair.l2_sum(xs.size()), params, detail::flatten(xs)).value;
    out.pass = std::abs(out.lhs - out.rhs) <= tolerance * out.rhs;
    return out;
}

/// max ||sum eps_i x_i||_{L_p} / (N^{1/p} max ||x_i||): a lower bound on the
/// equal norms type p constant restricted to N vectors.
inline double equal_norms_type_ratio(const QuasiNormedSpace &x, double p, const std::vector<Vector> &xs) {
    double mx = 0.0;
    for (const Vector &v : xs)
        mx = std::max(mx, x.gauge(v));
    if (mx == 0.0)
        return 0.0;
    return rademacher_average(x, xs, p) / (std::pow(static_cast<double>(xs.size()), 1.0 / p) * mx);
}

inline ConstantEstimate equal_norms_type(const QuasiNormedSpace &x, double p, std::size_t n,
                                         const SearchBudget &budget, RandomSource &rng) {
    if (n == 0 || n > kMaxExactSigns)
        throw DimensionError("equal_norms_type: N must lie in [1, 12]");
    if (!(p > 0.0) || p > 2.0)
        throw DomainError("equal_norms_type: p must lie in (0, 2]");
    return detail::maximize_tuple_ratio([&](const std::vector<Vector> &xs) { return equal_norms_type_ratio(x, p, xs); },
                                        n, x.dim(), budget, rng);
}

struct EnvelopeSweepRow {
    std::size_t dim = 0;
    double theta = 0.0;
    double r = 0.0;
    double norm_ones = 0.0;     // theta-norm of the all-ones vector
    double norm_e1 = 0.0;       // theta-norm of e_1
    double growth = 0.0;        // log(norm_ones / norm_e1) / log(dim)
    double envelope_lower = 0.0; // lower bound on the distance to the envelope
};

/// Interpolates l_2^n with l_r^n for n in [2, max_dim] and records how far the
/// theta space is from its Banach envelope. Observational.
inline std::vector<EnvelopeSweepRow> envelope_distance_sweep(double r, double theta, std::size_t max_dim,
                                                             ThetaParams params) {
    if (!(r > 0.0) || r >= 1.0)
        throw DomainError("envelope_distance_sweep: r must lie in (0, 1)");
    if (max_dim < 2 || max_dim > 6)
        throw DimensionError("envelope_distance_sweep: max_dim must lie in [2, 6]");
    params.theta = theta;
    std::vector<EnvelopeSweepRow> rows;
    for (std::size_t n = 2; n <= max_dim; ++n) {
        const QuasiNormedSpace x0 = QuasiNormedSpace::euclidean(n);
        const QuasiNormedSpace x1 = QuasiNormedSpace::lp(r, n);
        // ||x||_2 <= ||x||_r <= n^{1/r-1/2} ||x||_2
        const NormPair pair = NormPair::with_constants(
            n, [x0](std::span<const double> v) { return x0.gauge(v); },
            [x1](std::span<const double> v) { return x1.gauge(v); }, r, 1.0, std::pow(double(n), 1.0 / r - 0.5));
        EnvelopeSweepRow row;
        row.dim = n;
        row.theta = theta;
        row.r = r;
        row.norm_ones = theta_norm(pair, params, Vector(n, 1.0)).value;
        row.norm_e1 = theta_norm(pair, params, unit_vector(n, 0)).value;
        row.growth = std::log(row.norm_ones / row.norm_e1) / std::log(double(n));
        // the envelope norm of 1 is at most n * ||e_1|| by symmetry
        row.envelope_lower = std::max(1.0, row.norm_ones / (double(n) * row.norm_e1));
        rows.push_back(row);
    }
    return rows;
}

} // namespace qbl

#endif // QBL_INTERPOLATION_HPP
