/**
 *  @file qbl/factorization.hpp
 *  @brief Operator norms, factorization through Hilbert space and through the
 *  Banach envelope, Gaussian means, approximation numbers, and the
 *  boundedness sweeps built on them.
 *
 *  Norms of operators between quasi-normed spaces are exact only when the
 *  supremum reduces to a finite maximum (atoms of the source, or extreme
 *  points of a polyhedral target dual). Everything else is a search, and the
 *  result records which of the two it was.
 */

#ifndef QBL_FACTORIZATION_HPP
#define QBL_FACTORIZATION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qbl/geometry.hpp"
#include "qbl/numkernel.hpp"
#include "qbl/randsigns.hpp"
#include "qbl/search.hpp"
#include "qbl/spaces.hpp"

namespace qbl {

struct NormValue {
    double value = 0.0;
    EstimateKind kind = EstimateKind::exact;

    bool exact() const noexcept { return kind == EstimateKind::exact; }
};

namespace detail {

using NormEvaluator = std::function<double(const Matrix &)>;

inline Matrix diagonal_scaling(const Vector &d, const Matrix &m, const Vector &e) {
    // diag(d) * m * diag(e); empty vectors mean identity
    Matrix out = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) *= (d.empty() ? 1.0 : d[i]) * (e.empty() ? 1.0 : e[j]);
    return out;
}

/// Extreme points (up to sign) of the dual ball of a polyhedral normed space,
/// so that gauge(y) = max_f |<f, y>|.
inline std::optional<std::vector<Vector>> dual_extreme_points(const QuasiNormedSpace &y) {
    const std::size_t m = y.dim();
    if (const auto *w = y.as<WeightedLp>()) {
        const Vector c = y.lp_scales();
        std::vector<Vector> out;
        if (w->p == kInf) {
            for (std::size_t i = 0; i < m; ++i)
                out.push_back(scaled(unit_vector(m, i), c[i]));
            return out;
        }
        if (w->p == 1.0 && m <= kMaxExactSigns) {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (m - 1)); ++mask) {
                Vector f(m);
                for (std::size_t i = 0; i < m; ++i)
                    f[i] = (i > 0 && ((mask >> (i - 1)) & 1) ? -c[i] : c[i]);
                out.push_back(std::move(f));
            }
            return out;
        }
        return std::nullopt;
    }
    if (y.as<Polytope>() && y.has_facets())
        return y.facets();
    return std::nullopt;
}

/// Exact evaluator of ||M : src -> tgt|| when the supremum is a finite maximum.
inline std::optional<NormEvaluator> exact_norm_evaluator(const QuasiNormedSpace &src, const QuasiNormedSpace &tgt) {
    // sup over an r-hull of atoms of a gauge that is s-subadditive with s >= r
    // is attained at an atom
    if (const std::optional<AtomicBall> ball = atomic_ball(src); ball && ball->hull_exponent <= tgt.r_exponent()) {
        std::vector<Vector> atoms = ball->atoms;
        return NormEvaluator([atoms, tgt](const Matrix &m) {
            double best = 0.0;
            for (const Vector &a : atoms)
                best = std::max(best, tgt.gauge(m.apply(a)));
            return best;
        });
    }
    // polyhedral target: sup_x max_f <f, Mx> = max_f dual_gauge(src, M^T f)
    if (std::optional<std::vector<Vector>> fs = dual_extreme_points(tgt)) {
        std::vector<Vector> fv = std::move(*fs);
        return NormEvaluator([fv, src](const Matrix &m) {
            double best = 0.0;
            for (const Vector &f : fv)
                best = std::max(best, dual_gauge(src, m.apply_transposed(f)));
            return best;
        });
    }
    const auto *ws = src.as<WeightedLp>();
    const auto *wt = tgt.as<WeightedLp>();
    if (ws && wt && ws->p == 2.0 && wt->p == 2.0) {
        const Vector cy = tgt.lp_scales();
        Vector inv = src.lp_scales();
        for (double &v : inv)
            v = 1.0 / v;
        return NormEvaluator([cy, inv](const Matrix &m) { return spectral_norm(diagonal_scaling(cy, m, inv)); });
    }
    return std::nullopt;
}

inline bool is_diagonal(const Matrix &m) {
    if (!m.square())
        return false;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0.0)
                return false;
    return true;
}

/// sup g_tgt(Mx) / g_src(x) by seeded search: a certified lower bound.
inline double search_norm(const Matrix &m, const QuasiNormedSpace &src, const QuasiNormedSpace &tgt,
                          const SearchBudget &budget, RandomSource &rng) {
    const std::size_t n = src.dim();
    auto ratio = [&](const Vector &x) {
        const double d = src.gauge(x);
        if (!(d > 0.0) || !std::isfinite(d))
            return 0.0;
        const double v = tgt.gauge(m.apply(x)) / d;
        return std::isfinite(v) ? v : 0.0;
    };
    std::vector<Vector> seeds;
    for (std::size_t i = 0; i < n; ++i)
        seeds.push_back(unit_vector(n, i));
    seeds.push_back(Vector(n, 1.0));
    if (const std::optional<AtomicBall> ball = atomic_ball(src))
        for (const Vector &a : ball->atoms)
            seeds.push_back(a);
    for (std::size_t k = 0; k < budget.random_starts; ++k)
        seeds.push_back(gaussian_sample(rng, n));
    Vector best = seeds.front();
    double best_val = -1.0;
    for (const Vector &x : seeds) {
        const double v = ratio(x);
        if (v > best_val) {
            best_val = v;
            best = x;
        }
    }
    if (budget.refine_evals > 0) {
        const double scale = std::max(norm_inf(best), 1e-12);
        CompassOptions opt;
        opt.initial_step = 0.25 * scale;
        opt.min_step = 1e-9 * scale;
        opt.max_evals = budget.refine_evals;
        compass_maximize(ratio, best, opt);
    }
    return std::max(best_val, ratio(best));
}

} // namespace detail

/// Exact operator norm, or nullopt when no finite reduction applies.
inline std::optional<double> exact_op_norm(const OperatorSpec &u) {
    const Matrix &m = u.matrix;
    if (std::all_of(m.entries().begin(), m.entries().end(), [](double v) { return v == 0.0; }))
        return 0.0;
    if (const auto eval = detail::exact_norm_evaluator(u.source, u.target))
        return (*eval)(m);
    // diagonal maps between weighted l_p spaces with q >= p: ||.||_q <= ||.||_p
    const auto *ws = u.source.as<WeightedLp>();
    const auto *wt = u.target.as<WeightedLp>();
    if (ws && wt && wt->p >= ws->p && detail::is_diagonal(m)) {
        const Vector cx = u.source.lp_scales(), cy = u.target.lp_scales();
        double best = 0.0;
        for (std::size_t i = 0; i < m.rows(); ++i)
            best = std::max(best, std::abs(m(i, i)) * cy[i] / cx[i]);
        return best;
    }
    return std::nullopt;
}

/// Exact when possible, otherwise a certified lower bound from search.
inline NormValue op_norm(const OperatorSpec &u, const SearchBudget &budget, RandomSource &rng) {
    if (const std::optional<double> v = exact_op_norm(u))
        return {*v, EstimateKind::exact};
    return {detail::search_norm(u.matrix, u.source, u.target, budget, rng), EstimateKind::certified_lower_bound};
}

/// Exact mode only.
inline double op_norm(const OperatorSpec &u) {
    if (const std::optional<double> v = exact_op_norm(u))
        return *v;
    throw NotImplementedError("op_norm: no exact reduction for " + u.source.describe() + " -> " +
                              u.target.describe() + "; supply a search budget");
}

// ---------------------------------------------------------------------------
// Factorization through Hilbert space
// ---------------------------------------------------------------------------

/// u = v w with w : X -> l_2^k and v : l_2^k -> Y.
struct FactorizationWitness {
    std::size_t k = 0;
    Matrix w;
    Matrix v;
    double norm_w = 0.0;
    double norm_v = 0.0;
};

struct Gamma2Bound {
    double upper = 0.0; // norm_w * norm_v of the witness
    double lower = 0.0; // ||u|| (exact or a search lower bound)
    EstimateKind upper_kind = EstimateKind::upper_bound;
    FactorizationWitness witness;
};

namespace detail {

/// Evaluates ||M : a -> b||: exact when possible, otherwise a search with the given budget.
class NormOracle {
  public:
    NormOracle(QuasiNormedSpace a, QuasiNormedSpace b, SearchBudget budget, std::uint64_t seed)
        : a_(std::move(a)), b_(std::move(b)), budget_(budget), seed_(seed), exact_(exact_norm_evaluator(a_, b_)) {}

    bool exact() const noexcept { return exact_.has_value(); }

    double operator()(const Matrix &m) const {
        if (exact_)
            return (*exact_)(m);
        RandomSource rng(seed_); // same probes every call, so the objective is a function
        return search_norm(m, a_, b_, budget_, rng);
    }

    double with_budget(const Matrix &m, const SearchBudget &budget) const {
        if (exact_)
            return (*exact_)(m);
        RandomSource rng(seed_);
        return search_norm(m, a_, b_, budget, rng);
    }

  private:
    QuasiNormedSpace a_, b_;
    SearchBudget budget_;
    std::uint64_t seed_;
    std::optional<NormEvaluator> exact_;
};

inline Matrix sqrt_spd(const Matrix &q) {
    return sym_function(q, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

inline Matrix inverse_sqrt_spd(const Matrix &q) {
    return sym_function(q, [](double x) { return 1.0 / std::sqrt(x); });
}

inline Matrix matrix_from_flat(const Vector &flat, std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, flat);
}

} // namespace detail

/// Upper bound on gamma_2(u) from a searched factorization u = v w through l_2^k.
///
/// Seeds: the SVD split of u and, for invertible u, the square roots of the
/// minimal enclosing ellipsoids of B_X and B_Y. Each seed (W, V) is
/// reparameterized as (A W, V A^{-1}) and A is refined by compass search.
inline Gamma2Bound gamma2_upper(const OperatorSpec &u, std::size_t k, const SearchBudget &budget,
                                RandomSource &rng) {
    const Matrix &m = u.matrix;
    const std::size_t rank = numerical_rank(m);
    if (k < std::max<std::size_t>(rank, 1))
        throw DimensionError("gamma2_upper: inner dimension below the rank of u");
    Gamma2Bound out;
    out.witness.k = k;
    out.witness.w = Matrix(k, m.cols());
    out.witness.v = Matrix(m.rows(), k);
    if (rank == 0) {
        out.upper_kind = EstimateKind::exact;
        return out;
    }
    const NormValue un = op_norm(u, budget, rng);
    out.lower = un.value;

    const QuasiNormedSpace hilbert = QuasiNormedSpace::euclidean(rank);
    const SearchBudget inner{std::min<std::size_t>(budget.random_starts, 8),
                             std::min<std::size_t>(budget.refine_evals, 200)};
    const detail::NormOracle norm_w(u.source, hilbert, inner, rng.next_u64());
    const detail::NormOracle norm_v(hilbert, u.target, inner, rng.next_u64());

    std::vector<std::pair<Matrix, Matrix>> seeds;
    {
        const Svd s = svd(m);
        Matrix w(rank, m.cols()), v(m.rows(), rank);
        for (std::size_t j = 0; j < rank; ++j) {
            const double root = std::sqrt(s.singular[j]);
            for (std::size_t c = 0; c < m.cols(); ++c)
                w(j, c) = root * s.v(c, j);
            for (std::size_t r = 0; r < m.rows(); ++r)
                v(r, j) = root * s.u(r, j);
        }
        seeds.emplace_back(std::move(w), std::move(v));
    }
    if (m.square() && rank == m.rows()) {
        // E_X is inside sqrt(n) B_X and contains B_X, so Q^{1/2} and Q^{-1/2} split the identity well
        try {
            const Matrix q = mvee_of_ball(u.source).shape();
            const Matrix r = detail::sqrt_spd(q);
            seeds.emplace_back(r, m * detail::inverse_sqrt_spd(q));
        } catch (const Error &) {
        }
        try {
            const Matrix q = mvee_of_ball(u.target).shape();
            seeds.emplace_back(detail::sqrt_spd(q) * m, detail::inverse_sqrt_spd(q));
        } catch (const Error &) {
        }
    }

    auto product = [&](const Matrix &w, const Matrix &v) { return norm_w(w) * norm_v(v); };
    std::size_t best_seed = 0;
    double best_val = kInf;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const double val = product(seeds[i].first, seeds[i].second);
        if (val < best_val) {
            best_val = val;
            best_seed = i;
        }
    }
    const Matrix &w0 = seeds[best_seed].first;
    const Matrix &v0 = seeds[best_seed].second;
    auto objective = [&](const Vector &flat) {
        const Matrix a = detail::matrix_from_flat(flat, rank, rank);
        Matrix ainv;
        try {
            ainv = inverse(a);
        } catch (const Error &) {
            return kInf;
        }
        const double val = product(a * w0, v0 * ainv);
        return std::isfinite(val) ? val : kInf;
    };
    const Matrix eye = Matrix::identity(rank);
    Vector best_a(eye.entries().begin(), eye.entries().end());
    for (std::size_t t = 0; t < budget.random_starts; ++t) {
        const Matrix g = gaussian_matrix(rng, rank, rank);
        Vector cand(rank * rank);
        for (std::size_t i = 0; i < rank * rank; ++i)
            cand[i] = (i % (rank + 1) == 0 ? 1.0 : 0.0) + 0.3 * g.entries()[i];
        const double val = objective(cand);
        if (val < best_val) {
            best_val = val;
            best_a = cand;
        }
    }
    if (budget.refine_evals > 0) {
        CompassOptions opt;
        opt.initial_step = 0.1;
        opt.min_step = 1e-9;
        opt.max_evals = budget.refine_evals;
        compass_minimize(objective, best_a, opt);
    }
    const Matrix a = detail::matrix_from_flat(best_a, rank, rank);
    const Matrix w = a * w0;
    const Matrix v = v0 * inverse(a);
    out.witness.norm_w = norm_w.with_budget(w, budget);
    out.witness.norm_v = norm_v.with_budget(v, budget);
    for (std::size_t i = 0; i < rank; ++i) {
        for (std::size_t c = 0; c < m.cols(); ++c)
            out.witness.w(i, c) = w(i, c);
        for (std::size_t r = 0; r < m.rows(); ++r)
            out.witness.v(r, i) = v(r, i);
    }
    out.upper = out.witness.norm_w * out.witness.norm_v;
    out.upper_kind = norm_w.exact() && norm_v.exact() ? EstimateKind::upper_bound : EstimateKind::estimate;
    if (out.upper < out.lower) // only possible when a norm came from search
        out.upper = out.lower;
    return out;
}

struct DistanceBracket {
    double lower = 1.0;
    double upper = 0.0;
    EstimateKind upper_kind = EstimateKind::upper_bound;
    FactorizationWitness witness;
};

/// d_X = gamma_2(I_X). The lower bound uses T_2 and C_2 of the identity,
/// both at most d_X since l_2 has type and cotype constants 1.
inline DistanceBracket euclidean_distance(const QuasiNormedSpace &x, const SearchBudget &budget, RandomSource &rng) {
    const OperatorSpec id = OperatorSpec::identity(x);
    const Gamma2Bound g = gamma2_upper(id, x.dim(), budget, rng);
    DistanceBracket out;
    out.upper = g.upper;
    out.upper_kind = g.upper_kind;
    out.witness = g.witness;
    const std::size_t n = std::min<std::size_t>(std::max<std::size_t>(x.dim(), 2), 4);
    out.lower = std::max({1.0, type2_lower(id, n, budget, rng).value, cotype2_lower(id, n, budget, rng).value});
    out.upper = std::max(out.upper, out.lower);
    return out;
}

// ---------------------------------------------------------------------------
// Banach envelope
// ---------------------------------------------------------------------------

/// delta_X for unweighted l_p^n.
inline double envelope_distance_lp(double p, std::size_t n) {
    return p >= 1.0 ? 1.0 : std::pow(static_cast<double>(n), 1.0 / p - 1.0);
}

/// sup gauge(x) / envelope_gauge(x): a certified lower bound on d(X, X^).
inline ConstantEstimate envelope_distance(const QuasiNormedSpace &x, const SearchBudget &budget, RandomSource &rng) {
    const std::size_t n = x.dim();
    if (x.r_exponent() == 1.0)
        return {1.0, EstimateKind::exact, {unit_vector(n, 0)}};
    const QuasiNormedSpace env = envelope(x);
    auto ratio = [&](const Vector &v) {
        const double e = env.gauge(v);
        return e > 0.0 ? x.gauge(v) / e : 0.0;
    };
    std::vector<Vector> seeds;
    if (n <= 6) {
        // every vector with entries in {0, 1, -1}, up to overall sign
        std::uint64_t total = 1;
        for (std::size_t i = 0; i < n; ++i)
            total *= 3;
        for (std::uint64_t code = 1; code < total; ++code) {
            Vector v(n);
            std::uint64_t c = code;
            for (std::size_t i = 0; i < n; ++i, c /= 3)
                v[i] = static_cast<double>(c % 3 == 2 ? -1 : static_cast<int>(c % 3));
            seeds.push_back(std::move(v));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i)
            seeds.push_back(unit_vector(n, i));
        seeds.push_back(Vector(n, 1.0));
    }
    for (std::size_t k = 0; k < budget.random_starts; ++k)
        seeds.push_back(gaussian_sample(rng, n));
    Vector best = seeds.front();
    double best_val = -1.0;
    for (const Vector &v : seeds) {
        const double r = ratio(v);
        if (r > best_val) {
            best_val = r;
            best = v;
        }
    }
    if (budget.refine_evals > 0) {
        CompassOptions opt;
        const double scale = std::max(norm_inf(best), 1e-12);
        opt.initial_step = 0.25 * scale;
        opt.min_step = 1e-10 * scale;
        opt.max_evals = budget.refine_evals;
        compass_maximize(ratio, best, opt);
    }
    return {std::max(best_val, ratio(best)), EstimateKind::certified_lower_bound, {best}};
}

struct DeltaBracket {
    double lower = 0.0; // ||u||
    double upper = 0.0; // ||u : X^ -> Y||
    EstimateKind upper_kind = EstimateKind::upper_bound;
};

/// delta(u) <= ||u : X^ -> Y||, factoring through the envelope with w the identity.
inline DeltaBracket delta_upper(const OperatorSpec &u, const SearchBudget &budget, RandomSource &rng) {
    DeltaBracket out;
    out.lower = op_norm(u, budget, rng).value;
    const NormValue through = op_norm(OperatorSpec(u.matrix, envelope(u.source), u.target), budget, rng);
    out.upper = std::max(through.value, out.lower);
    out.upper_kind = through.exact() ? EstimateKind::upper_bound : EstimateKind::estimate;
    return out;
}

// ---------------------------------------------------------------------------
// Gaussian means and approximation numbers
// ---------------------------------------------------------------------------

struct MeanEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

inline constexpr std::size_t kMeanBatches = 32;

/// l(u) = (E ||sum g_k u(e_k)||^2)^{1/2} by Monte Carlo, stderr from batch means.
inline MeanEstimate gaussian_mean(const OperatorSpec &u, std::uint64_t samples, RandomSource &rng) {
    if (!u.source.is_euclidean())
        throw DomainError("gaussian_mean: source must be Euclidean");
    if (samples < 1000)
        throw DomainError("gaussian_mean: need at least 1000 samples");
    const std::uint64_t per = samples / kMeanBatches;
    std::vector<double> batch(kMeanBatches, 0.0);
    for (std::size_t b = 0; b < kMeanBatches; ++b) {
        double s = 0.0;
        for (std::uint64_t i = 0; i < per; ++i) {
            const double g = u.target.gauge(u.matrix.apply(gaussian_sample(rng, u.source.dim())));
            s += g * g;
        }
        batch[b] = s / static_cast<double>(per);
    }
    double mean = 0.0;
    for (double b : batch)
        mean += b;
    mean /= kMeanBatches;
    double var = 0.0;
    for (double b : batch)
        var += (b - mean) * (b - mean);
    var /= static_cast<double>(kMeanBatches - 1);
    const double se_sq = std::sqrt(var / kMeanBatches);
    MeanEstimate out;
    out.value = std::sqrt(mean);
    out.std_error = out.value > 0.0 ? se_sq / (2.0 * out.value) : 0.0; // delta method
    out.samples = per * kMeanBatches;
    return out;
}

/// a_k(u) = inf ||u - v|| over rank v < k, for u on a Euclidean source.
/// Exact (= s_k) for weighted Euclidean targets; otherwise the norm of a
/// refined rank-(k-1) fit.
inline NormValue approx_numbers(const OperatorSpec &u, std::size_t k, const SearchBudget &budget,
                                RandomSource &rng) {
    if (!u.source.is_euclidean())
        throw DomainError("approx_numbers: source must be Euclidean");
    if (k == 0)
        throw DomainError("approx_numbers: k must be at least 1");
    const Matrix &m = u.matrix;
    const std::size_t rank = numerical_rank(m);
    if (k > rank)
        return {0.0, EstimateKind::exact};
    if (const auto *w = u.target.as<WeightedLp>(); w && w->p == 2.0) {
        const Vector sv = singular_values(detail::diagonal_scaling(u.target.lp_scales(), m, {}));
        return {sv[k - 1], EstimateKind::exact};
    }
    if (k == 1)
        return op_norm(u, budget, rng);

    const std::size_t j = k - 1;
    const std::size_t rows = m.rows(), cols = m.cols();
    const SearchBudget inner{std::min<std::size_t>(budget.random_starts, 8),
                             std::min<std::size_t>(budget.refine_evals, 200)};
    const detail::NormOracle norm(u.source, u.target, inner, rng.next_u64());
    // v = P Q^T with P rows x j, Q cols x j, seeded by the truncated SVD
    const Svd s = svd(m);
    Vector flat(j * (rows + cols));
    for (std::size_t c = 0; c < j; ++c) {
        for (std::size_t r = 0; r < rows; ++r)
            flat[r * j + c] = s.u(r, c) * s.singular[c];
        for (std::size_t r = 0; r < cols; ++r)
            flat[rows * j + r * j + c] = s.v(r, c);
    }
    auto residual = [&](const Vector &f) {
        Matrix res = m;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                double acc = 0.0;
                for (std::size_t t = 0; t < j; ++t)
                    acc += f[r * j + t] * f[rows * j + c * j + t];
                res(r, c) -= acc;
            }
        return res;
    };
    auto objective = [&](const Vector &f) { return norm(residual(f)); };
    if (budget.refine_evals > 0) {
        CompassOptions opt;
        opt.initial_step = 0.1 * std::max(s.singular.front(), 1e-12);
        opt.min_step = 1e-9 * std::max(s.singular.front(), 1e-12);
        opt.max_evals = budget.refine_evals;
        compass_minimize(objective, flat, opt);
    }
    const double value = norm.with_budget(residual(flat), budget);
    return {value, norm.exact() ? EstimateKind::upper_bound : EstimateKind::estimate};
}

struct WeakCotypeRow {
    std::size_t trial = 0;
    std::size_t k = 0;
    double approx = 0.0;
    double gaussian_mean = 0.0;
    double ratio = 0.0; // a_k sqrt(k) / l(u)
};

struct WeakCotypeProfile {
    double value = 0.0; // max ratio: an empirical lower bound on wC_2
    std::vector<WeakCotypeRow> rows;
};

/// a_k(u) sqrt(k) / l(u) over random Gaussian u : l_2^N -> X, 1 <= k <= N.
inline WeakCotypeProfile weak_cotype2_profile(const QuasiNormedSpace &x, std::size_t n, std::size_t trials,
                                              const SearchBudget &budget, RandomSource &rng,
                                              std::uint64_t samples = 20'000) {
    if (n == 0 || n > kMaxSvdDim)
        throw DimensionError("weak_cotype2_profile: N must lie in [1, 32]");
    WeakCotypeProfile out;
    const QuasiNormedSpace h = QuasiNormedSpace::euclidean(n);
    for (std::size_t t = 0; t < trials; ++t) {
        RandomSource trng = rng.split(t);
        const OperatorSpec u(gaussian_matrix(trng, x.dim(), n), h, x);
        const MeanEstimate ell = gaussian_mean(u, samples, trng);
        if (!(ell.value > 0.0))
            continue;
        for (std::size_t k = 1; k <= std::min(n, x.dim()); ++k) {
            WeakCotypeRow row;
            row.trial = t;
            row.k = k;
            row.approx = approx_numbers(u, k, budget, trng).value;
            row.gaussian_mean = ell.value;
            row.ratio = row.approx * std::sqrt(static_cast<double>(k)) / ell.value;
            out.value = std::max(out.value, row.ratio);
            out.rows.push_back(row);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boundedness sweeps
// ---------------------------------------------------------------------------

enum class FactorThrough { hilbert, envelope };

struct BoundednessRow {
    std::string source;
    std::string target;
    std::size_t trial = 0;
    double norm = 0.0;   // ||u|| (lower bound when searched)
    double factor = 0.0; // gamma_2 or delta upper value
    double ratio = 0.0;
    EstimateKind factor_kind = EstimateKind::upper_bound;
};

/// Random Gaussian operators X -> Y, recording factorization norm / operator norm.
inline std::vector<BoundednessRow>
boundedness_experiment(const std::vector<std::pair<QuasiNormedSpace, QuasiNormedSpace>> &pairs, std::size_t trials,
                       FactorThrough through, const SearchBudget &budget, RandomSource &rng) {
    std::vector<BoundednessRow> rows;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto &[x, y] = pairs[p];
        for (std::size_t t = 0; t < trials; ++t) {
            RandomSource trng = rng.split(p * 1000 + t);
            const OperatorSpec u(gaussian_matrix(trng, y.dim(), x.dim()), x, y);
            BoundednessRow row;
            row.source = x.describe();
            row.target = y.describe();
            row.trial = t;
            if (through == FactorThrough::hilbert) {
                const Gamma2Bound g = gamma2_upper(u, std::min(x.dim(), y.dim()), budget, trng);
                row.norm = g.lower;
                row.factor = g.upper;
                row.factor_kind = g.upper_kind;
            } else {
                const DeltaBracket d = delta_upper(u, budget, trng);
                row.norm = d.lower;
                row.factor = d.upper;
                row.factor_kind = d.upper_kind;
            }
            if (!(row.norm > 0.0))
                continue; // zero operators carry no information
            row.ratio = row.factor / row.norm;
            rows.push_back(row);
        }
    }
    return rows;
}

/// Candidate exponents phi(r) for the K-convexity bound K(X) <= C d_X^phi (1 + log d_X).
struct PhiCandidates {
    std::optional<double> stated;   // (1/r-1)/(1/r-2): undefined at r = 1/2
    double envelope_chain = 0.0;    // (1/r-1)/(1/r-1/2)
    double interpolation = 0.0;     // (1-r)/(2-r)
};

inline PhiCandidates phi_candidates(double r) {
    PhiCandidates c;
    const double b = 1.0 / r;
    if (std::abs(b - 2.0) > 1e-12)
        c.stated = (b - 1.0) / (b - 2.0);
    c.envelope_chain = (b - 1.0) / (b - 0.5);
    c.interpolation = (1.0 - r) / (2.0 - r);
    return c;
}

struct KConvexityRow {
    std::string space;
    double r = 0.0;
    double k_lower = 0.0;
    double d_lower = 0.0;
    double d_upper = 0.0;
    PhiCandidates phi;
    // k_lower / (d^phi (1 + log d)) at d = d_upper, one per candidate
    std::optional<double> normalized_stated;
    double normalized_envelope_chain = 0.0;
    double normalized_interpolation = 0.0;
};

inline KConvexityRow kconvexity_against_distance(const QuasiNormedSpace &x, std::size_t signs,
                                                 const SearchBudget &budget, RandomSource &rng) {
    KConvexityRow row;
    row.space = x.describe();
    row.r = x.r_exponent();
    row.k_lower = kconvexity_lower(OperatorSpec::identity(x), signs, budget, rng).value;
    const DistanceBracket d = euclidean_distance(x, budget, rng);
    row.d_lower = d.lower;
    row.d_upper = d.upper;
    row.phi = phi_candidates(row.r);
    auto norm = [&](double phi) { return row.k_lower / (std::pow(d.upper, phi) * (1.0 + std::log(d.upper))); };
    if (row.phi.stated)
        row.normalized_stated = norm(*row.phi.stated);
    row.normalized_envelope_chain = norm(row.phi.envelope_chain);
    row.normalized_interpolation = norm(row.phi.interpolation);
    return row;
}

struct QuotientVolumeRow {
    std::size_t dim = 0;
    std::size_t quotient_dim = 0;
    std::size_t trial = 0;
    RatioEstimate vr_star;
};

/// Outer volume ratios of random quotients X / span(kernel).
inline std::vector<QuotientVolumeRow> quotient_outer_volume_ratios(const QuasiNormedSpace &x, std::size_t trials,
                                                                   const RandomSource &rng,
                                                                   const MonteCarloOptions &opt) {
    std::vector<QuotientVolumeRow> rows;
    const std::size_t n = x.dim();
    for (std::size_t q = 1; q <= n; ++q) {
        for (std::size_t t = 0; t < (q == n ? 1 : trials); ++t) {
            RandomSource trng = rng.split(q * 1000 + t);
            QuotientVolumeRow row;
            row.dim = n;
            row.quotient_dim = q;
            row.trial = t;
            if (q == n) {
                row.vr_star = vr_star(x, trng, opt);
            } else {
                std::vector<Vector> kernel;
                for (std::size_t i = 0; i < n - q; ++i)
                    kernel.push_back(gaussian_sample(trng, n));
                const SubspaceView e = quotient(x, kernel);
                row.vr_star = vr_star(e.space, trng.split(1), opt);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

} // namespace qbl

#endif // QBL_FACTORIZATION_HPP
