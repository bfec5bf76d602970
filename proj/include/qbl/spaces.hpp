/**
 *  @file qbl/spaces.hpp
 *  @brief Finite-dimensional quasi-normed spaces and their basic operations.
 *
 *  A `QuasiNormedSpace` is R^n with an r-norm gauge, given by one of four
 *  concrete representations:
 *
 *  - `WeightedLp`:   (sum_i w_i |x_i|^p)^{1/p}, or max_i w_i |x_i| for p = inf
 *  - `Schatten`:     the S_p quasi-norm of a rows x cols matrix, stored as its
 *                    row-major flattening
 *  - `Polytope`:     Minkowski gauge of the convex hull of a symmetric vertex list
 *  - `RConvexAtoms`: gauge of the r-convex hull
 *                    { sum l_i a_i : sum |l_i|^r <= 1 } of an atom list
 *
 *  The r-exponent is min(p, 1) for the first two, 1 for polytopes, and r for
 *  atoms. Every WeightedLp is handled through its per-coordinate scales
 *  c_i = w_i^{1/p} (c_i = w_i when p = inf), so that the gauge is the plain
 *  l_p quasi-norm of (c_i x_i).
 */

#ifndef QBL_SPACES_HPP
#define QBL_SPACES_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qbl/lp.hpp"
#include "qbl/numkernel.hpp"
#include "qbl/polytope.hpp"

namespace qbl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kMaxAtoms = 12;
inline constexpr std::size_t kMaxSchattenSide = 6;

struct WeightedLp {
    double p;
    Vector weights;
};

struct Schatten {
    double p;
    std::size_t rows;
    std::size_t cols;
};

struct Polytope {
    std::vector<Vector> vertices;
};

struct RConvexAtoms {
    std::vector<Vector> atoms;
    double r;
};

using Representation = std::variant<WeightedLp, Schatten, Polytope, RConvexAtoms>;

enum class SpaceKind { weighted_lp, schatten, polytope, r_convex_atoms };

/// Ball written as an r-convex hull { sum l_i a_i : sum |l_i|^r <= 1 }.
struct AtomicBall {
    std::vector<Vector> atoms;
    double hull_exponent;
};

namespace detail {

struct AtomSubset {
    std::vector<std::size_t> index;
    Matrix pinv;  // |index| x dim
    Matrix basis; // dim x |index|
};

struct SpaceCache {
    std::vector<Vector> facets;      // polytopes, when the brute-force hull is affordable
    std::vector<AtomSubset> subsets; // atoms: every independent subset of size <= dim
};

inline double lp_of_scaled(std::span<const double> x, std::span<const double> scale, double p) {
    const std::size_t n = x.size();
    if (p == kInf) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            m = std::max(m, scale[i] * std::abs(x[i]));
        return m;
    }
    if (p == 1.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += scale[i] * std::abs(x[i]);
        return s;
    }
    if (p == 2.0) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double y = scale[i] * x[i];
            s += y * y;
        }
        return std::sqrt(s);
    }
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = scale[i] * std::abs(x[i]);
        if (y > 0.0)
            s += std::pow(y, p);
    }
    return s > 0.0 ? std::pow(s, 1.0 / p) : 0.0;
}

inline double schatten_value(const Vector &sv, double p) {
    if (p == kInf)
        return sv.empty() ? 0.0 : sv.front();
    double s = 0.0;
    for (double x : sv)
        if (x > 0.0)
            s += std::pow(x, p);
    return s > 0.0 ? std::pow(s, 1.0 / p) : 0.0;
}

inline double conjugate_exponent(double p) {
    if (p <= 1.0)
        return kInf;
    if (p == kInf)
        return 1.0;
    return p / (p - 1.0);
}

} // namespace detail

class QuasiNormedSpace {
  public:
    // -- construction -------------------------------------------------------

    static QuasiNormedSpace weighted_lp(double p, Vector weights) {
        if (!(p > 0.0))
            throw DomainError("weighted_lp: p must be positive");
        if (weights.empty())
            throw DimensionError("weighted_lp: dimension must be positive");
        for (double w : weights)
            if (!(w > 0.0) || !std::isfinite(w))
                throw DomainError("weighted_lp: weights must be positive and finite");
        QuasiNormedSpace s;
        s.dim_ = weights.size();
        s.r_ = std::min(p, 1.0);
        s.rep_ = WeightedLp{p, std::move(weights)};
        s.scales_ = s.lp_scales();
        s.cache_ = std::make_shared<detail::SpaceCache>();
        return s;
    }

    static QuasiNormedSpace lp(double p, std::size_t dim) { return weighted_lp(p, Vector(dim, 1.0)); }

    static QuasiNormedSpace euclidean(std::size_t dim) { return lp(2.0, dim); }

    static QuasiNormedSpace schatten(double p, std::size_t rows, std::size_t cols) {
        if (!(p > 0.0) || p > 2.0)
            throw DomainError("schatten: p must lie in (0, 2]");
        if (rows == 0 || cols == 0 || rows > kMaxSchattenSide || cols > kMaxSchattenSide)
            throw DimensionError("schatten: rows and cols must lie in [1, 6]");
        QuasiNormedSpace s;
        s.dim_ = rows * cols;
        s.r_ = std::min(p, 1.0);
        s.rep_ = Schatten{p, rows, cols};
        s.cache_ = std::make_shared<detail::SpaceCache>();
        return s;
    }

    /// Polytope from a symmetric vertex list (v present implies -v present).
    static QuasiNormedSpace polytope(std::vector<Vector> vertices) {
        if (vertices.empty())
            throw DegenerateError("polytope: empty vertex list");
        const std::size_t n = vertices.front().size();
        if (n == 0)
            throw DimensionError("polytope: zero dimension");
        double scale = 0.0;
        for (const Vector &v : vertices) {
            if (v.size() != n)
                throw DimensionError("polytope: ragged vertex list");
            require_finite(v, "polytope");
            scale = std::max(scale, norm_inf(v));
        }
        for (const Vector &v : vertices) {
            const bool has_negative = std::any_of(vertices.begin(), vertices.end(), [&](const Vector &w) {
                for (std::size_t i = 0; i < n; ++i)
                    if (std::abs(v[i] + w[i]) > 1e-9 * std::max(1.0, scale))
                        return false;
                return true;
            });
            if (!has_negative)
                throw DomainError("polytope: vertex list is not symmetric");
        }
        if (numerical_rank(gram(vertices), 1e-12) < n)
            throw DegenerateError("polytope: vertices do not span the ambient space");
        QuasiNormedSpace s;
        s.dim_ = n;
        s.r_ = 1.0;
        auto cache = std::make_shared<detail::SpaceCache>();
        if (binomial(static_cast<unsigned>(vertices.size()), static_cast<unsigned>(std::min(n, vertices.size()))) <=
            kFacetCacheLimit)
            cache->facets = polytope_facets(vertices);
        s.rep_ = Polytope{std::move(vertices)};
        s.cache_ = std::move(cache);
        return s;
    }

    /// Polytope from half of a symmetric vertex list; negatives are appended.
    static QuasiNormedSpace symmetric_polytope(const std::vector<Vector> &half) {
        std::vector<Vector> all = half;
        for (const Vector &v : half)
            all.push_back(scaled(v, -1.0));
        return polytope(std::move(all));
    }

    static QuasiNormedSpace r_convex_atoms(std::vector<Vector> atoms, double r) {
        if (!(r > 0.0) || r > 1.0)
            throw DomainError("r_convex_atoms: r must lie in (0, 1]");
        if (atoms.empty())
            throw DegenerateError("r_convex_atoms: empty atom list");
        if (atoms.size() > kMaxAtoms)
            throw DimensionError("r_convex_atoms: more than 12 atoms");
        const std::size_t n = atoms.front().size();
        for (const Vector &a : atoms) {
            if (a.size() != n)
                throw DimensionError("r_convex_atoms: ragged atom list");
            require_finite(a, "r_convex_atoms");
        }
        if (numerical_rank(gram(atoms), 1e-12) < n)
            throw DegenerateError("r_convex_atoms: atoms do not span the ambient space");
        QuasiNormedSpace s;
        s.dim_ = n;
        s.r_ = r;
        auto cache = std::make_shared<detail::SpaceCache>();
        for (std::size_t k = 1; k <= std::min(n, atoms.size()); ++k)
            detail::for_each_subset(atoms.size(), k, [&](const std::vector<std::size_t> &idx) {
                std::vector<Vector> cols;
                for (std::size_t i : idx)
                    cols.push_back(atoms[i]);
                Matrix basis = Matrix::from_columns(cols);
                Matrix pinv;
                if (left_pseudo_inverse(basis, pinv))
                    cache->subsets.push_back({idx, std::move(pinv), std::move(basis)});
            });
        s.rep_ = RConvexAtoms{std::move(atoms), r};
        s.cache_ = std::move(cache);
        return s;
    }

    // -- accessors ----------------------------------------------------------

    std::size_t dim() const noexcept { return dim_; }
    double r_exponent() const noexcept { return r_; }
    const Representation &representation() const noexcept { return rep_; }

    SpaceKind kind() const noexcept { return static_cast<SpaceKind>(rep_.index()); }

    template <class T>
    const T *as() const noexcept {
        return std::get_if<T>(&rep_);
    }

    /// Coordinate scales c_i of a WeightedLp space.
    Vector lp_scales() const {
        const auto *w = as<WeightedLp>();
        if (!w)
            throw DomainError("lp_scales: not a WeightedLp space");
        Vector c(w->weights.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] = w->p == kInf ? w->weights[i] : std::pow(w->weights[i], 1.0 / w->p);
        return c;
    }

    bool is_unweighted_lp() const {
        const auto *w = as<WeightedLp>();
        return w && std::all_of(w->weights.begin(), w->weights.end(), [](double x) { return x == 1.0; });
    }

    bool is_euclidean() const { return is_unweighted_lp() && as<WeightedLp>()->p == 2.0; }

    bool has_facets() const noexcept { return !cache_->facets.empty(); }

    /// Facet normals of a polytope space (empty when not cached).
    const std::vector<Vector> &facets() const noexcept { return cache_->facets; }

    std::string describe() const {
        std::ostringstream os;
        os.precision(6);
        std::visit(
            [&](const auto &rep) {
                using T = std::decay_t<decltype(rep)>;
                if constexpr (std::is_same_v<T, WeightedLp>) {
                    os << (is_unweighted_lp() ? "l_" : "weighted l_") << rep.p << "^" << dim_;
                } else if constexpr (std::is_same_v<T, Schatten>) {
                    os << "S_" << rep.p << "(" << rep.rows << "x" << rep.cols << ")";
                } else if constexpr (std::is_same_v<T, Polytope>) {
                    os << "polytope(" << rep.vertices.size() << " vertices, dim " << dim_ << ")";
                } else {
                    os << "co_" << rep.r << "(" << rep.atoms.size() << " atoms, dim " << dim_ << ")";
                }
            },
            rep_);
        return os.str();
    }

    // -- gauge --------------------------------------------------------------

    double gauge(std::span<const double> x) const {
        if (x.size() != dim_)
            throw DimensionError("gauge: vector length does not match space dimension");
        return std::visit([&](const auto &rep) { return gauge_impl(rep, x); }, rep_);
    }

    double operator()(std::span<const double> x) const { return gauge(x); }

    /// Polytope gauge through the linear program
    /// min sum l_i  s.t.  sum l_i v_i = x, l >= 0 (Bland pivoting).
    double polytope_gauge_lp(std::span<const double> x) const {
        const auto *poly = as<Polytope>();
        if (!poly)
            throw DomainError("polytope_gauge_lp: not a polytope space");
        if (x.size() != dim_)
            throw DimensionError("polytope_gauge_lp: vector length mismatch");
        return hull_gauge_lp(poly->vertices, x);
    }

    static double hull_gauge_lp(const std::vector<Vector> &points, std::span<const double> x) {
        if (norm_inf(x) == 0.0)
            return 0.0;
        const Matrix a = Matrix::from_columns(points);
        const Vector c(points.size(), 1.0);
        const LpResult res = solve_lp(a, x, c);
        if (res.status != LpStatus::optimal)
            throw DegenerateError("hull_gauge_lp: linear program failed");
        return res.objective;
    }

  private:
    static constexpr std::uint64_t kFacetCacheLimit = 200'000;

    static Matrix gram(const std::vector<Vector> &v) {
        const std::size_t n = v.front().size();
        Matrix g(n, n);
        for (const Vector &x : v)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    g(i, j) += x[i] * x[j];
        return g;
    }

    double gauge_impl(const WeightedLp &w, std::span<const double> x) const {
        return detail::lp_of_scaled(x, scales_, w.p);
    }

    double gauge_impl(const Schatten &s, std::span<const double> x) const {
        if (norm_inf(x) == 0.0)
            return 0.0;
        const Matrix m(s.rows, s.cols, Vector(x.begin(), x.end()));
        return detail::schatten_value(singular_values(m), s.p);
    }

    double gauge_impl(const Polytope &poly, std::span<const double> x) const {
        if (!cache_->facets.empty()) {
            double m = 0.0;
            for (const Vector &a : cache_->facets)
                m = std::max(m, dot(a, x));
            return m;
        }
        return hull_gauge_lp(poly.vertices, x);
    }

    double gauge_impl(const RConvexAtoms &atoms, std::span<const double> x) const {
        const double xn = norm2(x);
        if (xn == 0.0)
            return 0.0;
        double best = kInf;
        Vector lambda, recon(dim_);
        for (const detail::AtomSubset &sub : cache_->subsets) {
            lambda = sub.pinv.apply(x);
            if (sub.index.size() < dim_) {
                recon = sub.basis.apply(lambda);
                double res = 0.0;
                for (std::size_t i = 0; i < dim_; ++i)
                    res = std::max(res, std::abs(recon[i] - x[i]));
                if (res > 1e-9 * std::max(1.0, norm_inf(x)))
                    continue;
            }
            double s = 0.0;
            if (atoms.r == 1.0) {
                for (double l : lambda)
                    s += std::abs(l);
            } else {
                for (double l : lambda)
                    if (l != 0.0)
                        s += std::pow(std::abs(l), atoms.r);
                s = std::pow(s, 1.0 / atoms.r);
            }
            best = std::min(best, s);
        }
        if (!std::isfinite(best))
            throw DegenerateError("r-convex gauge: no feasible decomposition");
        return best;
    }

    Representation rep_{WeightedLp{2.0, {1.0}}};
    std::size_t dim_ = 0;
    double r_ = 1.0;
    Vector scales_; // WeightedLp only
    std::shared_ptr<const detail::SpaceCache> cache_;
};

// ---------------------------------------------------------------------------
// OperatorSpec
// ---------------------------------------------------------------------------

/// A matrix with its source and target spaces (target.dim x source.dim).
struct OperatorSpec {
    Matrix matrix;
    QuasiNormedSpace source;
    QuasiNormedSpace target;

    OperatorSpec(Matrix m, QuasiNormedSpace src, QuasiNormedSpace tgt)
        : matrix(std::move(m)), source(std::move(src)), target(std::move(tgt)) {
        if (matrix.rows() != target.dim() || matrix.cols() != source.dim())
            throw DimensionError("OperatorSpec: matrix shape does not match source/target dimensions");
        require_finite(matrix.entries(), "OperatorSpec");
    }

    static OperatorSpec identity(const QuasiNormedSpace &x) { return {Matrix::identity(x.dim()), x, x}; }
};

// ---------------------------------------------------------------------------
// Envelope and dual
// ---------------------------------------------------------------------------

/// The ball as an r-convex hull of finitely many atoms, when it is one.
inline std::optional<AtomicBall> atomic_ball(const QuasiNormedSpace &x) {
    const std::size_t n = x.dim();
    if (const auto *w = x.as<WeightedLp>()) {
        const Vector c = x.lp_scales();
        if (w->p <= 1.0) {
            AtomicBall b{{}, w->p};
            for (std::size_t i = 0; i < n; ++i)
                b.atoms.push_back(scaled(unit_vector(n, i), 1.0 / c[i]));
            return b;
        }
        if (w->p == kInf && n <= 12) {
            AtomicBall b{{}, 1.0};
            for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
                Vector v(n);
                for (std::size_t i = 0; i < n; ++i)
                    v[i] = (i > 0 && ((mask >> (i - 1)) & 1u) ? -1.0 : 1.0) / c[i];
                b.atoms.push_back(std::move(v));
            }
            return b;
        }
        return std::nullopt;
    }
    if (const auto *p = x.as<Polytope>())
        return AtomicBall{p->vertices, 1.0};
    if (const auto *a = x.as<RConvexAtoms>())
        return AtomicBall{a->atoms, a->r};
    return std::nullopt;
}

/// The Banach envelope: the space whose ball is the convex hull of B_X.
inline QuasiNormedSpace envelope(const QuasiNormedSpace &x) {
    if (x.r_exponent() == 1.0)
        return x;
    if (x.as<WeightedLp>())
        return QuasiNormedSpace::weighted_lp(1.0, x.lp_scales());
    if (const auto *s = x.as<Schatten>())
        return QuasiNormedSpace::schatten(1.0, s->rows, s->cols);
    if (const auto *a = x.as<RConvexAtoms>())
        return QuasiNormedSpace::r_convex_atoms(a->atoms, 1.0);
    return x;
}

inline double envelope_gauge(const QuasiNormedSpace &x, std::span<const double> v) {
    return envelope(x).gauge(v);
}

/// Norm of the functional f in X*: sup over the unit ball of <f, x>.
inline double dual_gauge(const QuasiNormedSpace &x, std::span<const double> f) {
    if (f.size() != x.dim())
        throw DimensionError("dual_gauge: functional length does not match space dimension");
    if (const auto *w = x.as<WeightedLp>()) {
        const Vector c = x.lp_scales();
        Vector inv(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            inv[i] = 1.0 / c[i];
        return detail::lp_of_scaled(f, inv, detail::conjugate_exponent(w->p));
    }
    if (const auto *s = x.as<Schatten>()) {
        const Matrix m(s->rows, s->cols, Vector(f.begin(), f.end()));
        return detail::schatten_value(singular_values(m), detail::conjugate_exponent(s->p));
    }
    if (const auto *p = x.as<Polytope>()) {
        double m = 0.0;
        for (const Vector &v : p->vertices)
            m = std::max(m, dot(f, v));
        return m;
    }
    const auto &a = std::get<RConvexAtoms>(x.representation());
    double m = 0.0;
    for (const Vector &v : a.atoms)
        m = std::max(m, std::abs(dot(f, v)));
    return m;
}

/// The dual space X* (a normed space) as a concrete representation.
inline QuasiNormedSpace dual_space(const QuasiNormedSpace &x) {
    if (const auto *w = x.as<WeightedLp>()) {
        const Vector c = x.lp_scales();
        const double q = detail::conjugate_exponent(w->p);
        Vector weights(c.size());
        for (std::size_t i = 0; i < c.size(); ++i)
            weights[i] = q == kInf ? 1.0 / c[i] : std::pow(1.0 / c[i], q);
        return QuasiNormedSpace::weighted_lp(q, std::move(weights));
    }
    if (const auto *p = x.as<Polytope>()) {
        std::vector<Vector> facets = x.has_facets() ? x.facets() : polytope_facets(p->vertices);
        return QuasiNormedSpace::polytope(std::move(facets));
    }
    if (const auto *a = x.as<RConvexAtoms>()) {
        std::vector<Vector> normals;
        for (const Vector &v : a->atoms) {
            normals.push_back(v);
            normals.push_back(scaled(v, -1.0));
        }
        return QuasiNormedSpace::polytope(halfspace_vertices(normals));
    }
    throw NotImplementedError("dual_space: Schatten duals are not representable here");
}

// ---------------------------------------------------------------------------
// Quotients and sections
// ---------------------------------------------------------------------------

/// A derived space together with the orthonormal basis (columns, in the
/// ambient coordinates) in which it is expressed.
struct SubspaceView {
    QuasiNormedSpace space;
    Matrix basis; // ambient_dim x space.dim()
};

namespace detail {
inline std::vector<Vector> project_points(const std::vector<Vector> &pts, const std::vector<Vector> &comp,
                                          bool drop_zero) {
    std::vector<Vector> out;
    double scale = 0.0;
    for (const Vector &p : pts)
        scale = std::max(scale, norm_inf(p));
    for (const Vector &p : pts) {
        Vector y(comp.size());
        for (std::size_t j = 0; j < comp.size(); ++j)
            y[j] = dot(comp[j], p);
        if (drop_zero && norm_inf(y) <= 1e-12 * std::max(scale, 1.0))
            continue;
        if (!near_duplicate(y, out, 1e-12))
            out.push_back(std::move(y));
    }
    return out;
}
} // namespace detail

/// Quotient X / span(kernel): the ball is the orthogonal projection of B_X
/// onto the complement of the kernel, written in the deterministic
/// Gram-Schmidt basis of that complement.
inline SubspaceView quotient(const QuasiNormedSpace &x, const std::vector<Vector> &kernel) {
    const std::size_t n = x.dim();
    for (const Vector &k : kernel)
        if (k.size() != n)
            throw DimensionError("quotient: kernel vector length mismatch");
    if (kernel.empty())
        return {x, Matrix::identity(n)};
    if (kernel.size() >= n)
        throw DimensionError("quotient: kernel must be a proper subspace");
    const std::vector<Vector> kb = orthonormalize(kernel);
    const std::vector<Vector> comp = orthogonal_complement(kb, n);
    const Matrix basis = Matrix::from_columns(comp);

    if (x.as<Schatten>())
        throw NotImplementedError("quotient: Schatten spaces are not supported");
    if (const auto *w = x.as<WeightedLp>()) {
        if (w->p > 1.0 && w->p != kInf)
            throw NotImplementedError("quotient: WeightedLp with 1 < p < inf has no finite atom description");
    }
    const AtomicBall ball = *atomic_ball(x);
    std::vector<Vector> projected = detail::project_points(ball.atoms, comp, true);
    if (ball.hull_exponent == 1.0) {
        std::vector<Vector> sym = projected;
        for (const Vector &v : projected) {
            Vector neg = scaled(v, -1.0);
            if (!detail::near_duplicate(neg, sym, 1e-12))
                sym.push_back(std::move(neg));
        }
        return {QuasiNormedSpace::polytope(std::move(sym)), basis};
    }
    // r-convex hulls ignore the sign of each atom; keep one per +/- pair
    std::vector<Vector> atoms;
    for (const Vector &v : projected)
        if (!detail::near_duplicate(scaled(v, -1.0), atoms, 1e-12))
            atoms.push_back(v);
    return {QuasiNormedSpace::r_convex_atoms(std::move(atoms), ball.hull_exponent), basis};
}

/// Restriction of a WeightedLp space to the coordinates in `index` (sorted
/// or not; order is preserved). Equals both the section and the coordinate
/// projection of the ball.
inline QuasiNormedSpace coordinate_section(const QuasiNormedSpace &x, const std::vector<std::size_t> &index) {
    const auto *w = x.as<WeightedLp>();
    if (!w)
        throw NotImplementedError("coordinate_section: only WeightedLp spaces have coordinate sections");
    if (index.empty())
        throw DimensionError("coordinate_section: empty index set");
    Vector weights;
    std::vector<bool> seen(x.dim(), false);
    for (std::size_t i : index) {
        if (i >= x.dim() || seen[i])
            throw DimensionError("coordinate_section: invalid or repeated index");
        seen[i] = true;
        weights.push_back(w->weights[i]);
    }
    return QuasiNormedSpace::weighted_lp(w->p, std::move(weights));
}

/// Section B_X cap span(directions) of a polytope space, as a polytope in the
/// orthonormal basis of the span (facet intersection).
inline SubspaceView polytope_section(const QuasiNormedSpace &x, const std::vector<Vector> &directions) {
    if (!x.as<Polytope>())
        throw NotImplementedError("polytope_section: only polytope spaces");
    if (!x.has_facets())
        throw NotImplementedError("polytope_section: facet description unavailable for this polytope");
    if (directions.empty() || directions.size() > x.dim())
        throw DimensionError("polytope_section: bad subspace dimension");
    const std::vector<Vector> q = orthonormalize(directions);
    std::vector<Vector> restricted;
    for (const Vector &a : x.facets()) {
        Vector b(q.size());
        for (std::size_t j = 0; j < q.size(); ++j)
            b[j] = dot(q[j], a);
        if (norm_inf(b) > 1e-14 && !detail::near_duplicate(b, restricted, 1e-12))
            restricted.push_back(std::move(b));
    }
    return {QuasiNormedSpace::polytope(halfspace_vertices(restricted)), Matrix::from_columns(q)};
}

// ---------------------------------------------------------------------------
// Horn's inequality
// ---------------------------------------------------------------------------

struct HornCheck {
    double lhs;
    double rhs;
    bool pass;
};

/// sum_{j<=k} s_j(AB)^p  versus  sum_{j<=k} s_j(A)^p s_j(B)^p.
inline HornCheck horn_check(const Matrix &a, const Matrix &b, double p, std::size_t k) {
    if (a.cols() != b.rows())
        throw DimensionError("horn_check: shapes not composable");
    if (!(p > 0.0) || p > 1.0)
        throw DomainError("horn_check: p must lie in (0, 1]");
    const std::size_t mind = std::min({a.rows(), a.cols(), b.cols()});
    if (k == 0 || k > mind)
        throw DomainError("horn_check: k must lie in [1, min dimension]");
    const Vector sab = singular_values(a * b), sa = singular_values(a), sb = singular_values(b);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        lhs += std::pow(sab[j], p);
        rhs += std::pow(sa[j], p) * std::pow(sb[j], p);
    }
    return {lhs, rhs, lhs <= rhs + 1e-9};
}

} // namespace qbl

#endif // QBL_SPACES_HPP
