/**
 *  @file qbl/randsigns.hpp
 *  @brief Rademacher averages over the sign cube and lower bounds on type,
 *  cotype and K-convexity constants.
 *
 *  Sign patterns are indexed by masks 0 .. 2^N - 1; bit i set means
 *  eps_i = -1. Exact averages visit the masks in increasing order, so sums
 *  are reproducible bit for bit.
 *
 *  The constants are suprema over unbounded families of inputs. Everything
 *  here returns the best ratio found by a budgeted search together with the
 *  maximizing input, i.e. a certified lower bound.
 */

#ifndef QBL_RANDSIGNS_HPP
#define QBL_RANDSIGNS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qbl/numkernel.hpp"
#include "qbl/search.hpp"
#include "qbl/spaces.hpp"

namespace qbl {

inline constexpr std::size_t kMaxExactSigns = 12;
inline constexpr std::size_t kMaxKConvexitySigns = 8;
inline constexpr std::uint64_t kMinSampledPatterns = 10'000;

enum class AverageMode { exact, sampled };

namespace detail {

/// sum_i eps_i x_i for the sign pattern `mask`, accumulated in index order.
inline void signed_combination(const std::vector<Vector> &xs, std::uint64_t mask, Vector &out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = (mask >> i) & 1u ? -1.0 : 1.0;
        for (std::size_t j = 0; j < out.size(); ++j)
            out[j] += e * xs[i][j];
    }
}

inline void check_tuple(const std::vector<Vector> &xs, std::size_t dim) {
    if (xs.empty())
        throw DimensionError("rademacher: empty vector tuple");
    for (const Vector &x : xs)
        if (x.size() != dim)
            throw DimensionError("rademacher: vector length does not match space dimension");
}

/// Power mean (mean of v^q)^{1/q}; q = inf gives the maximum.
class PowerMean {
  public:
    explicit PowerMean(double q) : q_(q) {
        if (!(q > 0.0))
            throw DomainError("rademacher: exponent q must be positive");
    }
    void add(double v) {
        ++count_;
        if (q_ == kInf)
            acc_ = std::max(acc_, v);
        else if (q_ == 2.0)
            acc_ += v * v;
        else if (q_ == 1.0)
            acc_ += v;
        else if (v > 0.0)
            acc_ += std::pow(v, q_);
    }
    double value() const {
        if (q_ == kInf)
            return acc_;
        const double m = acc_ / static_cast<double>(count_);
        if (q_ == 2.0)
            return std::sqrt(m);
        if (q_ == 1.0)
            return m;
        return m > 0.0 ? std::pow(m, 1.0 / q_) : 0.0;
    }

  private:
    double q_;
    double acc_ = 0.0;
    std::uint64_t count_ = 0;
};

} // namespace detail

/// (2^{-N} sum_eps gauge(sum eps_i x_i)^q)^{1/q} by full enumeration.
template <class Gauge>
double rademacher_average_exact(Gauge &&gauge, const std::vector<Vector> &xs, double q) {
    if (xs.size() > kMaxExactSigns)
        throw DimensionError("rademacher_average: exact mode supports at most 12 vectors");
    if (xs.empty())
        throw DimensionError("rademacher: empty vector tuple");
    const std::size_t n = xs.front().size();
    detail::PowerMean mean(q);
    Vector v(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << xs.size()); ++mask) {
        detail::signed_combination(xs, mask, v);
        mean.add(gauge(std::span<const double>(v)));
    }
    return mean.value();
}

struct AverageEstimate {
    double value = 0.0;
    double std_error = 0.0; // zero in exact mode
    std::uint64_t patterns = 0;
};

/// Sampled average over `samples` uniform sign patterns. The standard error
/// of the q-th moment is carried to the q-th root by the delta method.
template <class Gauge>
AverageEstimate rademacher_average_sampled(Gauge &&gauge, const std::vector<Vector> &xs, double q,
                                           std::uint64_t samples, RandomSource &rng) {
    if (xs.empty())
        throw DimensionError("rademacher: empty vector tuple");
    if (samples < kMinSampledPatterns)
        throw DomainError("rademacher_average: sampled mode needs at least 1e4 patterns");
    if (!(q > 0.0) || q == kInf)
        throw DomainError("rademacher_average: sampled mode needs finite q > 0");
    const std::size_t n = xs.front().size();
    Vector v(n);
    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::fill(v.begin(), v.end(), 0.0);
        for (const Vector &x : xs) {
            const double e = static_cast<double>(rng.sign());
            for (std::size_t j = 0; j < n; ++j)
                v[j] += e * x[j];
        }
        const double g = gauge(std::span<const double>(v));
        const double t = g > 0.0 ? std::pow(g, q) : 0.0;
        sum += t;
        sumsq += t * t;
    }
    const double ns = static_cast<double>(samples);
    const double mean = sum / ns;
    const double var = std::max(0.0, (sumsq / ns - mean * mean) * ns / (ns - 1.0));
    const double se_mean = std::sqrt(var / ns);
    AverageEstimate est;
    est.patterns = samples;
    est.value = mean > 0.0 ? std::pow(mean, 1.0 / q) : 0.0;
    est.std_error = mean > 0.0 ? est.value * se_mean / (q * mean) : 0.0;
    return est;
}

/// Rademacher average in a space, exact or sampled.
inline AverageEstimate rademacher_average(const QuasiNormedSpace &x, const std::vector<Vector> &xs, double q,
                                          AverageMode mode, RandomSource &rng, std::uint64_t samples = 100'000) {
    detail::check_tuple(xs, x.dim());
    auto g = [&](std::span<const double> v) { return x.gauge(v); };
    if (mode == AverageMode::exact)
        return {rademacher_average_exact(g, xs, q), 0.0, std::uint64_t{1} << xs.size()};
    return rademacher_average_sampled(g, xs, q, samples, rng);
}

inline double rademacher_average(const QuasiNormedSpace &x, const std::vector<Vector> &xs, double q) {
    detail::check_tuple(xs, x.dim());
    return rademacher_average_exact([&](std::span<const double> v) { return x.gauge(v); }, xs, q);
}

// ---------------------------------------------------------------------------
// Constant estimates
// ---------------------------------------------------------------------------

// `estimate` marks values built from search-mode norms: no bound direction is guaranteed.
enum class EstimateKind { certified_lower_bound, upper_bound, exact, estimate };

inline const char *to_string(EstimateKind k) {
    switch (k) {
    case EstimateKind::certified_lower_bound:
        return "certified-lower-bound";
    case EstimateKind::upper_bound:
        return "upper-bound";
    case EstimateKind::estimate:
        return "estimate";
    default:
        return "exact";
    }
}

struct ConstantEstimate {
    double value = 0.0;
    EstimateKind kind = EstimateKind::certified_lower_bound;
    std::vector<Vector> witness; // the maximizing tuple (or function values)
};

struct SearchBudget {
    std::size_t random_starts = 64;
    std::size_t refine_evals = 1500;
};

namespace detail {

inline std::vector<Vector> unflatten(const Vector &flat, std::size_t count, std::size_t dim) {
    std::vector<Vector> xs(count, Vector(dim));
    for (std::size_t i = 0; i < count; ++i)
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(i * dim), dim, xs[i].begin());
    return xs;
}

inline Vector flatten(const std::vector<Vector> &xs) {
    Vector flat;
    for (const Vector &x : xs)
        flat.insert(flat.end(), x.begin(), x.end());
    return flat;
}

/// Maximizes ratio(tuple) over N-tuples in R^dim: deterministic seeds,
/// random restarts, then compass refinement of the best tuple.
template <class Ratio>
ConstantEstimate maximize_tuple_ratio(Ratio &&ratio, std::size_t count, std::size_t dim, const SearchBudget &budget,
                                      RandomSource &rng) {
    auto safe = [&](const std::vector<Vector> &xs) {
        const double v = ratio(xs);
        return std::isfinite(v) ? v : 0.0;
    };
    std::vector<std::vector<Vector>> seeds;
    {
        std::vector<Vector> basis;
        for (std::size_t i = 0; i < count; ++i)
            basis.push_back(unit_vector(dim, i % dim));
        seeds.push_back(basis);
        std::vector<Vector> ones(count, Vector(dim, 1.0));
        seeds.push_back(ones);
        std::vector<Vector> single(count, Vector(dim, 0.0));
        single[0] = Vector(dim, 1.0);
        for (std::size_t i = 1; i < count; ++i)
            single[i] = unit_vector(dim, (i - 1) % dim);
        seeds.push_back(single);
    }
    for (std::size_t s = 0; s < budget.random_starts; ++s) {
        std::vector<Vector> xs;
        for (std::size_t i = 0; i < count; ++i)
            xs.push_back(gaussian_sample(rng, dim));
        seeds.push_back(std::move(xs));
    }
    std::vector<Vector> best = seeds.front();
    double best_val = -1.0;
    for (const auto &xs : seeds) {
        const double v = safe(xs);
        if (v > best_val) {
            best_val = v;
            best = xs;
        }
    }
    if (budget.refine_evals > 0) {
        Vector flat = flatten(best);
        const double scale = std::max(norm_inf(flat), 1e-12);
        CompassOptions opt;
        opt.initial_step = 0.25 * scale;
        opt.min_step = 1e-9 * scale;
        opt.max_evals = budget.refine_evals;
        compass_maximize([&](const Vector &f) { return safe(unflatten(f, count, dim)); }, flat, opt);
        best = unflatten(flat, count, dim);
    }
    ConstantEstimate est;
    est.value = safe(best); // re-evaluated on the witness
    est.witness = std::move(best);
    return est;
}

inline double l2_sum_of(const std::vector<double> &v) {
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

} // namespace detail

/// Ratio whose supremum over tuples is the N-vector type 2 constant of u.
inline double type2_ratio(const OperatorSpec &u, const std::vector<Vector> &xs) {
    std::vector<Vector> images;
    std::vector<double> norms;
    for (const Vector &x : xs) {
        images.push_back(u.matrix.apply(x));
        norms.push_back(u.source.gauge(x));
    }
    const double den = detail::l2_sum_of(norms);
    if (den == 0.0)
        return 0.0;
    return rademacher_average(u.target, images, 2.0) / den;
}

/// Ratio whose supremum is the N-vector cotype 2 constant of u.
inline double cotype2_ratio(const OperatorSpec &u, const std::vector<Vector> &xs) {
    std::vector<double> norms;
    for (const Vector &x : xs)
        norms.push_back(u.target.gauge(u.matrix.apply(x)));
    const double den = rademacher_average(u.source, xs, 2.0);
    if (den == 0.0)
        return 0.0;
    return detail::l2_sum_of(norms) / den;
}

/// (sum gauge(x_i)^q)^{1/q} / ||sum eps_i x_i||_{L_q}.
inline double cotype_q_ratio(const QuasiNormedSpace &x, double q, const std::vector<Vector> &xs) {
    double s = 0.0;
    for (const Vector &v : xs)
        s += std::pow(x.gauge(v), q);
    const double den = rademacher_average(x, xs, q);
    if (den == 0.0)
        return 0.0;
    return std::pow(s, 1.0 / q) / den;
}

inline ConstantEstimate type2_lower(const OperatorSpec &u, std::size_t n, const SearchBudget &budget,
                                    RandomSource &rng) {
    if (n == 0 || n > kMaxExactSigns)
        throw DimensionError("type2_lower: N must lie in [1, 12]");
    return detail::maximize_tuple_ratio([&](const auto &xs) { return type2_ratio(u, xs); }, n, u.source.dim(),
                                        budget, rng);
}

inline ConstantEstimate cotype2_lower(const OperatorSpec &u, std::size_t n, const SearchBudget &budget,
                                      RandomSource &rng) {
    if (n == 0 || n > kMaxExactSigns)
        throw DimensionError("cotype2_lower: N must lie in [1, 12]");
    return detail::maximize_tuple_ratio([&](const auto &xs) { return cotype2_ratio(u, xs); }, n, u.source.dim(),
                                        budget, rng);
}

inline ConstantEstimate cotype_q_lower(const QuasiNormedSpace &x, double q, std::size_t n,
                                       const SearchBudget &budget, RandomSource &rng) {
    if (n == 0 || n > kMaxExactSigns)
        throw DimensionError("cotype_q_lower: N must lie in [1, 12]");
    if (!(q > 0.0) || q == kInf)
        throw DomainError("cotype_q_lower: q must be finite and positive");
    return detail::maximize_tuple_ratio([&](const auto &xs) { return cotype_q_ratio(x, q, xs); }, n, x.dim(), budget,
                                        rng);
}

/// ||Rad(u o f)||_{L2(Y)} / ||f||_{L2(X)} for f given by its values on the
/// 2^N sign patterns (in mask order).
inline double kconvexity_ratio(const OperatorSpec &u, std::size_t n, const std::vector<Vector> &f) {
    const std::size_t patterns = std::size_t{1} << n;
    if (f.size() != patterns)
        throw DimensionError("kconvexity_ratio: f must have 2^N values");
    const double w = 1.0 / static_cast<double>(patterns);
    // coefficients c_i = integral of eps_i f, then mapped by u
    std::vector<Vector> coeffs(n, Vector(u.source.dim(), 0.0));
    double den = 0.0;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
        const double g = u.source.gauge(f[mask]);
        den += g * g;
        for (std::size_t i = 0; i < n; ++i)
            axpy(((mask >> i) & 1u ? -1.0 : 1.0) * w, f[mask], coeffs[i]);
    }
    den = std::sqrt(den * w);
    if (den == 0.0)
        return 0.0;
    std::vector<Vector> images;
    for (const Vector &c : coeffs)
        images.push_back(u.matrix.apply(c));
    return rademacher_average(u.target, images, 2.0) / den;
}

inline ConstantEstimate kconvexity_lower(const OperatorSpec &u, std::size_t n, const SearchBudget &budget,
                                         RandomSource &rng) {
    if (n == 0 || n > kMaxKConvexitySigns)
        throw DimensionError("kconvexity_lower: N must lie in [1, 8]");
    const std::size_t patterns = std::size_t{1} << n, dim = u.source.dim();
    auto ratio = [&](const std::vector<Vector> &f) { return kconvexity_ratio(u, n, f); };
    // Seeds: degree-one functions sum eps_i x_i, then random functions and
    // degree-one functions perturbed by higher Walsh terms.
    std::vector<std::vector<Vector>> seeds;
    auto degree_one = [&](const std::vector<Vector> &xs) {
        std::vector<Vector> f(patterns, Vector(dim, 0.0));
        for (std::size_t mask = 0; mask < patterns; ++mask)
            detail::signed_combination(xs, mask, f[mask]);
        return f;
    };
    {
        std::vector<Vector> xs;
        for (std::size_t i = 0; i < n; ++i)
            xs.push_back(unit_vector(dim, i % dim));
        seeds.push_back(degree_one(xs));
    }
    for (std::size_t s = 0; s < budget.random_starts; ++s) {
        std::vector<Vector> xs;
        for (std::size_t i = 0; i < n; ++i)
            xs.push_back(gaussian_sample(rng, dim));
        std::vector<Vector> f = degree_one(xs);
        const double noise = (s % 3 == 0) ? 0.0 : (s % 3 == 1 ? 0.5 : 2.0);
        for (Vector &v : f)
            for (double &e : v)
                e += noise * rng.normal();
        seeds.push_back(std::move(f));
    }
    std::vector<Vector> best;
    double best_val = -1.0;
    for (const auto &f : seeds) {
        const double v = ratio(f);
        if (v > best_val) {
            best_val = v;
            best = f;
        }
    }
    if (budget.refine_evals > 0 && patterns * dim <= 128) {
        Vector flat = detail::flatten(best);
        const double scale = std::max(norm_inf(flat), 1e-12);
        CompassOptions opt;
        opt.initial_step = 0.25 * scale;
        opt.min_step = 1e-9 * scale;
        opt.max_evals = budget.refine_evals;
        compass_maximize([&](const Vector &v) { return ratio(detail::unflatten(v, patterns, dim)); }, flat, opt);
        best = detail::unflatten(flat, patterns, dim);
    }
    ConstantEstimate est;
    est.value = ratio(best);
    est.witness = std::move(best);
    return est;
}

/// ||sum eps_i x_i||_{L_q} / ||sum eps_i x_i||_{L_s}, by exact enumeration.
inline double khintchine_ratio(const QuasiNormedSpace &x, const std::vector<Vector> &xs, double q, double s) {
    if (!(s > 0.0) || q < s)
        throw DomainError("khintchine_ratio: need q >= s > 0");
    detail::check_tuple(xs, x.dim());
    const double den = rademacher_average(x, xs, s);
    if (den == 0.0)
        throw DegenerateError("khintchine_ratio: all vectors are zero");
    return rademacher_average(x, xs, q) / den;
}

} // namespace qbl

#endif // QBL_RANDSIGNS_HPP
