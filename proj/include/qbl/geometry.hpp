/**
 *  @file qbl/geometry.hpp
 *  @brief Ellipsoids, volumes and volume ratios of unit balls.
 *
 *  The minimal-volume enclosing ellipsoid of a symmetric point set is found
 *  by Khachiyan's ascent on the centered problem with Wolfe-Atwood away
 *  steps. Balls of WeightedLp spaces with p > 1 and of Schatten spaces get
 *  closed forms from their symmetry groups; every other ball is reduced to
 *  its atoms, since the smallest ellipsoid containing B_X also contains (and
 *  is determined by) conv B_X.
 *
 *  Volumes are exact where a formula or a triangulation is available and
 *  otherwise estimated by rejection sampling from the enclosing ellipsoid.
 */

#ifndef QBL_GEOMETRY_HPP
#define QBL_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qbl/numkernel.hpp"
#include "qbl/parallel.hpp"
#include "qbl/polytope.hpp"
#include "qbl/spaces.hpp"

namespace qbl {

// ---------------------------------------------------------------------------
// Ellipsoid
// ---------------------------------------------------------------------------

/// Volume of the Euclidean unit ball in R^n.
inline double unit_ball_volume(std::size_t n) {
    const double h = 0.5 * static_cast<double>(n);
    return std::exp(h * std::log(std::numbers::pi) - std::lgamma(h + 1.0));
}

/// The centered ellipsoid { x : x^T Q x <= 1 }.
class Ellipsoid {
  public:
    explicit Ellipsoid(Matrix q) : q_(std::move(q)) {
        if (!q_.square() || q_.rows() == 0)
            throw DimensionError("Ellipsoid: shape matrix must be square and non-empty");
        chol_ = cholesky(q_); // validates symmetry and definiteness
    }

    static Ellipsoid ball(std::size_t n, double radius = 1.0) {
        return Ellipsoid((1.0 / (radius * radius)) * Matrix::identity(n));
    }

    std::size_t dim() const noexcept { return q_.rows(); }
    const Matrix &shape() const noexcept { return q_; }

    /// sqrt(x^T Q x): the gauge of the ellipsoid.
    double gauge(std::span<const double> x) const {
        // ||L^T x||_2 with Q = L L^T
        const std::size_t n = dim();
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double t = 0.0;
            for (std::size_t i = j; i < n; ++i)
                t += chol_(i, j) * x[i];
            s += t * t;
        }
        return std::sqrt(s);
    }

    bool contains(std::span<const double> x, double slack = 0.0) const { return gauge(x) <= 1.0 + slack; }

    double log_volume() const {
        double logdet = 0.0;
        for (std::size_t i = 0; i < dim(); ++i)
            logdet += 2.0 * std::log(chol_(i, i));
        return std::log(unit_ball_volume(dim())) - 0.5 * logdet;
    }

    double volume() const { return std::exp(log_volume()); }

    /// Polar body { y : y^T Q^{-1} y <= 1 }.
    Ellipsoid polar() const { return Ellipsoid(symmetrized(inverse_spd(q_))); }

    /// Maps a point of the Euclidean unit ball onto the ellipsoid.
    Vector from_unit_ball(std::span<const double> y) const {
        // solve L^T x = y
        const std::size_t n = dim();
        Vector x(y.begin(), y.end());
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t k = i + 1; k < n; ++k)
                x[i] -= chol_(k, i) * x[k];
            x[i] /= chol_(i, i);
        }
        return x;
    }

    static Matrix symmetrized(Matrix a) {
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = i + 1; j < a.cols(); ++j) {
                const double m = 0.5 * (a(i, j) + a(j, i));
                a(i, j) = a(j, i) = m;
            }
        return a;
    }

  private:
    Matrix q_;
    Matrix chol_;
};

// ---------------------------------------------------------------------------
// Minimal-volume enclosing ellipsoid
// ---------------------------------------------------------------------------

struct MveeResult {
    Ellipsoid ellipsoid;
    Vector weights;          // optimality weights, summing to dim
    std::size_t iterations;  // ascent steps taken
    double max_excess;       // max_i x_i^T M^{-1} x_i / dim - 1 at exit
};

/// MVEE of a symmetric spanning point set, with its Khachiyan certificate.
/// The returned shape is rescaled so that every point lies inside exactly.
inline MveeResult mvee_with_certificate(const std::vector<Vector> &points, double tolerance = 1e-7,
                                        std::size_t max_iterations = 200'000) {
    if (!(tolerance > 0.0) || tolerance > 1e-2)
        throw DomainError("mvee: tolerance must lie in (0, 1e-2]");
    if (points.empty())
        throw DegenerateError("mvee: empty point set");
    const std::size_t n = points.front().size();
    const std::size_t m = points.size();
    for (const Vector &p : points) {
        if (p.size() != n)
            throw DimensionError("mvee: ragged point set");
        require_finite(p, "mvee");
    }
    {
        Matrix g(n, n);
        for (const Vector &p : points)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    g(i, j) += p[i] * p[j];
        if (numerical_rank(g, 1e-12) < n)
            throw DegenerateError("mvee: points do not span the ambient space");
    }

    const double nd = static_cast<double>(n);
    Vector u(m, 1.0 / static_cast<double>(m));
    Vector kappa(m);
    Matrix chol;
    auto evaluate = [&] {
        Matrix mm(n, n);
        for (std::size_t k = 0; k < m; ++k) {
            if (u[k] == 0.0)
                continue;
            const Vector &p = points[k];
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j <= i; ++j)
                    mm(i, j) += u[k] * p[i] * p[j];
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < i; ++j)
                mm(j, i) = mm(i, j);
        chol = cholesky(mm);
        Vector y(n);
        for (std::size_t k = 0; k < m; ++k) {
            // ||L^{-1} p||^2
            const Vector &p = points[k];
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double t = p[i];
                for (std::size_t j = 0; j < i; ++j)
                    t -= chol(i, j) * y[j];
                y[i] = t / chol(i, i);
                s += y[i] * y[i];
            }
            kappa[k] = s;
        }
    };

    std::size_t it = 0;
    double kmax = 0.0;
    for (;; ++it) {
        evaluate();
        std::size_t jplus = 0, jminus = m;
        for (std::size_t k = 0; k < m; ++k) {
            if (kappa[k] > kappa[jplus])
                jplus = k;
            if (u[k] > 0.0 && (jminus == m || kappa[k] < kappa[jminus]))
                jminus = k;
        }
        kmax = kappa[jplus];
        if (kmax <= nd * (1.0 + tolerance) || it >= max_iterations)
            break;
        const double up = kmax / nd - 1.0;
        const double down = 1.0 - kappa[jminus] / nd;
        if (up >= down) {
            const double alpha = (kmax - nd) / (nd * (kmax - 1.0));
            for (double &x : u)
                x *= 1.0 - alpha;
            u[jplus] += alpha;
        } else {
            const double kmin = kappa[jminus];
            const double floor = -u[jminus] / (1.0 - u[jminus]);
            // for kmin <= 1 the objective keeps increasing down to the floor
            double alpha = kmin > 1.0 ? (kmin - nd) / (nd * (kmin - 1.0)) : floor;
            const bool drop = alpha <= floor;
            alpha = std::max(alpha, floor);
            for (double &x : u)
                x *= 1.0 - alpha;
            u[jminus] = drop ? 0.0 : u[jminus] + alpha;
        }
    }

    // Q = M^{-1} / kmax puts every point inside with the extreme ones on the boundary.
    Matrix linv = inverse(chol);
    Matrix q = linv.transposed() * linv;
    q = Ellipsoid::symmetrized((1.0 / kmax) * q);
    Vector weights(m);
    for (std::size_t k = 0; k < m; ++k)
        weights[k] = nd * u[k];
    return {Ellipsoid(std::move(q)), std::move(weights), it, kmax / nd - 1.0};
}

inline Ellipsoid mvee(const std::vector<Vector> &points, double tolerance = 1e-7) {
    return mvee_with_certificate(points, tolerance).ellipsoid;
}

namespace detail {
inline Matrix diag_squared_over(const Vector &c, double rho) {
    Matrix q(c.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        q(i, i) = c[i] * c[i] / (rho * rho);
    return q;
}

/// +-atoms of the ball; the convex hull of these is conv B_X.
inline std::vector<Vector> symmetric_atoms(const AtomicBall &ball) {
    std::vector<Vector> pts;
    for (const Vector &a : ball.atoms) {
        pts.push_back(a);
        pts.push_back(scaled(a, -1.0));
    }
    return pts;
}
} // namespace detail

/// Smallest ellipsoid containing B_X.
inline Ellipsoid mvee_of_ball(const QuasiNormedSpace &x, double tolerance = 1e-7) {
    const std::size_t n = x.dim();
    if (const auto *w = x.as<WeightedLp>()) {
        if (w->p > 1.0) {
            // Invariant under coordinate sign changes and (after rescaling)
            // permutations, so the MVEE is D^{-1} times a ball through the
            // farthest points of the unweighted l_p ball.
            const double nd = static_cast<double>(n);
            const double rho = w->p == kInf ? std::sqrt(nd) : std::max(1.0, std::pow(nd, 0.5 - 1.0 / w->p));
            return Ellipsoid(detail::diag_squared_over(x.lp_scales(), rho));
        }
    }
    if (const auto *s = x.as<Schatten>()) {
        // Unitary invariance forces a Frobenius ball; rank-one matrices of
        // Frobenius norm 1 lie in every S_p ball (p <= 2), which lies in S_2.
        (void)s;
        return Ellipsoid::ball(n);
    }
    const std::optional<AtomicBall> ball = atomic_ball(x);
    return mvee(detail::symmetric_atoms(*ball), tolerance);
}

// ---------------------------------------------------------------------------
// Largest inscribed ellipsoid
// ---------------------------------------------------------------------------

struct InscribedEllipsoid {
    Ellipsoid ellipsoid;
    /// True when B_X is not convex and the ellipsoid is the largest
    /// inscribed ball-type surrogate rather than the maximal ellipsoid.
    bool surrogate;
};

inline InscribedEllipsoid inscribed_ellipsoid(const QuasiNormedSpace &x, double tolerance = 1e-7) {
    const std::size_t n = x.dim();
    const double nd = static_cast<double>(n);
    if (const auto *w = x.as<WeightedLp>()) {
        // D^{-1} times the largest ball in the unweighted l_p ball; for p >= 1
        // this is the maximal ellipsoid by the same symmetry argument as above.
        const double rho = w->p == kInf ? 1.0 : std::min(1.0, std::pow(nd, 0.5 - 1.0 / w->p));
        return {Ellipsoid(detail::diag_squared_over(x.lp_scales(), rho)), w->p < 1.0};
    }
    if (const auto *s = x.as<Schatten>()) {
        const double k = static_cast<double>(std::min(s->rows, s->cols));
        const double rho = std::min(1.0, std::pow(k, 0.5 - 1.0 / s->p));
        return {Ellipsoid::ball(n, rho), s->p < 1.0};
    }
    if (x.r_exponent() < 1.0)
        throw NotImplementedError("inscribed_ellipsoid: non-convex atomic balls are not supported");
    std::vector<Vector> normals;
    if (x.as<Polytope>()) {
        if (!x.has_facets())
            throw NotImplementedError("inscribed_ellipsoid: facet description unavailable for this polytope");
        normals = x.facets();
    } else {
        normals = polytope_facets(detail::symmetric_atoms(*atomic_ball(x)));
    }
    // The maximal ellipsoid in B is the polar of the MVEE of the polar body.
    return {mvee(normals, tolerance).polar(), false};
}

// ---------------------------------------------------------------------------
// Volumes
// ---------------------------------------------------------------------------

enum class VolumeMethod { closed_form, triangulation, monte_carlo };

enum class VolumeRequest { automatic, exact, monte_carlo };

inline const char *to_string(VolumeMethod m) {
    switch (m) {
    case VolumeMethod::closed_form:
        return "closed-form";
    case VolumeMethod::triangulation:
        return "triangulation";
    default:
        return "monte-carlo";
    }
}

struct VolumeEstimate {
    double value = 0.0;
    VolumeMethod method = VolumeMethod::closed_form;
    double std_error = 0.0;
    std::uint64_t samples = 0;

    bool exact() const noexcept { return method != VolumeMethod::monte_carlo; }
};

struct MonteCarloOptions {
    std::uint64_t samples = 1'000'000;
    unsigned threads = 1;
};

inline constexpr std::uint64_t kMinMonteCarloSamples = 10'000;
inline constexpr std::uint64_t kMonteCarloChunk = 1u << 16;

/// Volume of the unweighted l_p unit ball in R^n.
inline double lp_ball_volume(double p, std::size_t n) {
    const double nd = static_cast<double>(n);
    if (p == kInf)
        return std::pow(2.0, nd);
    return std::exp(nd * std::log(2.0 * std::tgamma(1.0 + 1.0 / p)) - std::lgamma(1.0 + nd / p));
}

/// Monte-Carlo volume of { x : gauge(x) <= 1 } using uniform proposals from
/// an enclosing ellipsoid. Chunk c uses the stream rng.split(c).
template <class Gauge>
VolumeEstimate monte_carlo_volume(Gauge &&gauge, const Ellipsoid &proposal, const RandomSource &rng,
                                  const MonteCarloOptions &opt) {
    if (opt.samples < kMinMonteCarloSamples)
        throw DomainError("monte_carlo_volume: at least 1e4 samples required");
    const std::size_t n = proposal.dim();
    const std::uint64_t chunks = (opt.samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
    std::vector<std::uint64_t> hits(chunks, 0);
    parallel_for(chunks, opt.threads, [&](std::size_t c) {
        RandomSource local = rng.split(c);
        const std::uint64_t begin = c * kMonteCarloChunk;
        const std::uint64_t end = std::min<std::uint64_t>(opt.samples, begin + kMonteCarloChunk);
        Vector y(n);
        std::uint64_t h = 0;
        for (std::uint64_t s = begin; s < end; ++s) {
            double nrm = 0.0;
            do {
                for (double &v : y)
                    v = local.normal();
                nrm = norm2(y);
            } while (nrm == 0.0);
            const double radius = std::pow(local.uniform(), 1.0 / static_cast<double>(n));
            for (double &v : y)
                v *= radius / nrm;
            if (gauge(proposal.from_unit_ball(y)) <= 1.0)
                ++h;
        }
        hits[c] = h;
    });
    std::uint64_t total = 0;
    for (std::uint64_t h : hits)
        total += h;
    const double frac = static_cast<double>(total) / static_cast<double>(opt.samples);
    const double vol_e = proposal.volume();
    VolumeEstimate est;
    est.value = vol_e * frac;
    est.std_error = vol_e * std::sqrt(frac * (1.0 - frac) / static_cast<double>(opt.samples));
    est.method = VolumeMethod::monte_carlo;
    est.samples = opt.samples;
    return est;
}

namespace detail {
inline std::optional<VolumeEstimate> exact_volume(const QuasiNormedSpace &x) {
    const std::size_t n = x.dim();
    if (const auto *w = x.as<WeightedLp>()) {
        double v = lp_ball_volume(w->p, n);
        for (double c : x.lp_scales())
            v /= c;
        return VolumeEstimate{v, VolumeMethod::closed_form, 0.0, 0};
    }
    if (const auto *p = x.as<Polytope>()) {
        if (n <= 3 && x.has_facets())
            return VolumeEstimate{polytope_volume(p->vertices, x.facets()), VolumeMethod::triangulation, 0.0, 0};
        return std::nullopt;
    }
    if (const auto *a = x.as<RConvexAtoms>()) {
        if (a->atoms.size() == n) {
            // the image of the l_r ball under the atom matrix
            const double det = std::abs(determinant(Matrix::from_columns(a->atoms)));
            return VolumeEstimate{det * lp_ball_volume(a->r, n), VolumeMethod::closed_form, 0.0, 0};
        }
        if (a->r == 1.0 && n <= 3) {
            const std::vector<Vector> pts = symmetric_atoms(AtomicBall{a->atoms, 1.0});
            return VolumeEstimate{polytope_volume(pts, polytope_facets(pts)), VolumeMethod::triangulation, 0.0, 0};
        }
    }
    return std::nullopt;
}
} // namespace detail

/// Volume of B_X.
inline VolumeEstimate volume(const QuasiNormedSpace &x, VolumeRequest request, const RandomSource &rng,
                             const MonteCarloOptions &opt = {}) {
    if (request != VolumeRequest::monte_carlo) {
        if (std::optional<VolumeEstimate> e = detail::exact_volume(x))
            return *e;
        if (request == VolumeRequest::exact)
            throw DimensionError("volume: no exact method for this space at this dimension");
    }
    return monte_carlo_volume([&](std::span<const double> v) { return x.gauge(v); }, mvee_of_ball(x), rng, opt);
}

inline VolumeEstimate volume(const QuasiNormedSpace &x) { return volume(x, VolumeRequest::exact, RandomSource(0)); }

inline VolumeEstimate volume(const Ellipsoid &e) { return {e.volume(), VolumeMethod::closed_form, 0.0, 0}; }

// ---------------------------------------------------------------------------
// Volume ratios
// ---------------------------------------------------------------------------

/// A ratio with a 3-standard-error interval (degenerate when exact).
struct RatioEstimate {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool exact = true;
};

namespace detail {
/// (num/den)^{1/n}, or (den/num)^{1/n} when `invert`, with the Monte-Carlo
/// uncertainty of `den` carried through.
inline RatioEstimate nth_root_ratio(double num, const VolumeEstimate &den, std::size_t n, bool invert) {
    const double inv_n = 1.0 / static_cast<double>(n);
    auto f = [&](double d) {
        d = std::max(d, 1e-300);
        return invert ? std::pow(d / num, inv_n) : std::pow(num / d, inv_n);
    };
    RatioEstimate r;
    r.value = f(den.value);
    r.exact = den.exact();
    const double a = f(den.value - 3.0 * den.std_error), b = f(den.value + 3.0 * den.std_error);
    r.lower = std::min(a, b);
    r.upper = std::max(a, b);
    return r;
}
} // namespace detail

/// Outer volume ratio (Vol F / Vol B_X)^{1/n}, F the minimal enclosing ellipsoid.
inline RatioEstimate vr_star(const QuasiNormedSpace &x, const RandomSource &rng, const MonteCarloOptions &opt = {}) {
    const Ellipsoid f = mvee_of_ball(x);
    const VolumeEstimate vb = volume(x, VolumeRequest::automatic, rng, opt);
    return detail::nth_root_ratio(f.volume(), vb, x.dim(), false);
}

struct VolumeRatio {
    RatioEstimate ratio;
    /// When set, the inscribed ellipsoid is a surrogate contained in the
    /// maximal one, so `ratio` is an upper bound on vr(X).
    bool upper_bound_only = false;
};

/// Volume ratio (Vol B_X / Vol E)^{1/n}, E the maximal inscribed ellipsoid.
inline VolumeRatio vr(const QuasiNormedSpace &x, const RandomSource &rng, const MonteCarloOptions &opt = {}) {
    const InscribedEllipsoid e = inscribed_ellipsoid(x);
    const VolumeEstimate vb = volume(x, VolumeRequest::automatic, rng, opt);
    return {detail::nth_root_ratio(e.ellipsoid.volume(), vb, x.dim(), true), e.surrogate};
}

struct SantaloCheck {
    RatioEstimate vr_star_x;
    RatioEstimate vr_dual;
    bool pass;
};

/// vr*(X) >= vr(X*) for a normed space X.
inline SantaloCheck santalo_check(const QuasiNormedSpace &x, const RandomSource &rng,
                                  const MonteCarloOptions &opt = {}) {
    if (x.r_exponent() != 1.0)
        throw DomainError("santalo_check: the space must be normed (r = 1)");
    const RatioEstimate a = vr_star(x, rng.split(0), opt);
    const RatioEstimate b = vr(dual_space(x), rng.split(1), opt).ratio;
    return {a, b, a.upper >= b.lower * (1.0 - 1e-9)};
}

// ---------------------------------------------------------------------------
// Sections, projections and r-convex hulls
// ---------------------------------------------------------------------------

struct SectionProjectionCheck {
    double section_volume;
    double projection_volume;
    double ball_volume;
    double ratio;        // Vol(B cap S) Vol(P_{S-perp} B) / Vol(B)
    std::uint64_t bound; // binomial(N beta, k beta)
    bool pass;
};

namespace detail {
inline unsigned integer_inverse_exponent(double r) {
    const double beta = 1.0 / r;
    const double rb = std::round(beta);
    if (rb < 1.0 || std::abs(beta - rb) > 1e-9)
        throw DomainError("section/projection bound: 1/r must be a positive integer");
    return static_cast<unsigned>(rb);
}

inline SectionProjectionCheck finish_check(double sec, double proj, double ball, std::size_t n, std::size_t k,
                                           unsigned beta) {
    SectionProjectionCheck c{};
    c.section_volume = sec;
    c.projection_volume = proj;
    c.ball_volume = ball;
    c.ratio = sec * proj / ball;
    c.bound = binomial(static_cast<unsigned>(n) * beta, static_cast<unsigned>(k) * beta);
    // exact volumes: only floating-point rounding is allowed for
    c.pass = c.ratio <= static_cast<double>(c.bound) * (1.0 + 1e-10);
    return c;
}
} // namespace detail

/// Section/projection volume bound for a coordinate subspace S of a
/// WeightedLp space with 1/r integral. Both B cap S and P_{S-perp} B are
/// again WeightedLp balls, so all three volumes are exact.
inline SectionProjectionCheck section_projection_check(const QuasiNormedSpace &x,
                                                       const std::vector<std::size_t> &coords) {
    if (!x.as<WeightedLp>())
        throw NotImplementedError("section_projection_check: coordinate subspaces need a WeightedLp space");
    const unsigned beta = detail::integer_inverse_exponent(x.r_exponent());
    const std::size_t n = x.dim(), k = coords.size();
    std::vector<bool> in(n, false);
    for (std::size_t i : coords) {
        if (i >= n || in[i])
            throw DimensionError("section_projection_check: invalid or repeated coordinate");
        in[i] = true;
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i)
        if (!in[i])
            rest.push_back(i);
    const double ball = volume(x).value;
    const double sec = k == 0 ? 1.0 : volume(coordinate_section(x, coords)).value;
    const double proj = rest.empty() ? 1.0 : volume(coordinate_section(x, rest)).value;
    return detail::finish_check(sec, proj, ball, n, k, beta);
}

/// Same bound for an arbitrary subspace span(directions) of a polytope space
/// in dimension <= 3 (facet intersection and projected hulls, all exact).
inline SectionProjectionCheck section_projection_check(const QuasiNormedSpace &x,
                                                       const std::vector<Vector> &directions) {
    if (!x.as<Polytope>())
        throw NotImplementedError("section_projection_check: general subspaces need a polytope space");
    if (x.dim() > 3)
        throw DimensionError("section_projection_check: general subspaces only in dimension <= 3");
    const std::size_t n = x.dim(), k = directions.size();
    const double ball = volume(x).value;
    if (k == 0 || k == n)
        return detail::finish_check(k == 0 ? 1.0 : ball, k == 0 ? ball : 1.0, ball, n, k, 1);
    const double sec = volume(polytope_section(x, directions).space).value;
    const double proj = volume(quotient(x, directions).space).value;
    return detail::finish_check(sec, proj, ball, n, k, 1);
}

/// (Vol B_X / Vol co_r(ext B_X))^{1/n} for a polytope space.
inline RatioEstimate rhull_volume_defect(const QuasiNormedSpace &x, double r, const RandomSource &rng,
                                         const MonteCarloOptions &opt = {}) {
    const auto *p = x.as<Polytope>();
    if (!p)
        throw DomainError("rhull_volume_defect: polytope space required");
    if (x.dim() > 3 || !x.has_facets())
        throw DimensionError("rhull_volume_defect: dimension must be at most 3");
    if (!(r > 0.0) || r > 1.0)
        throw DomainError("rhull_volume_defect: r must lie in (0, 1]");
    const std::vector<Vector> ext = polytope_vertices(p->vertices, x.facets());
    std::vector<Vector> atoms; // one per +/- pair
    for (const Vector &v : ext)
        if (!detail::near_duplicate(scaled(v, -1.0), atoms, 1e-12))
            atoms.push_back(v);
    const QuasiNormedSpace hull = QuasiNormedSpace::r_convex_atoms(std::move(atoms), r);
    const double vb = volume(x).value;
    const VolumeEstimate va = volume(hull, VolumeRequest::automatic, rng, opt);
    return detail::nth_root_ratio(vb, va, x.dim(), false);
}

/// Symmetric polytope spanned by +-(half_count Gaussian points), resampled
/// until the points span R^dim.
inline QuasiNormedSpace random_symmetric_polytope(RandomSource &rng, std::size_t dim, std::size_t half_count) {
    if (half_count < dim)
        throw DomainError("random_symmetric_polytope: need at least dim points");
    for (;;) {
        std::vector<Vector> half;
        for (std::size_t i = 0; i < half_count; ++i)
            half.push_back(gaussian_sample(rng, dim));
        try {
            return QuasiNormedSpace::symmetric_polytope(half);
        } catch (const DegenerateError &) {
        }
    }
}

// ---------------------------------------------------------------------------
// John containment
// ---------------------------------------------------------------------------

struct ContainmentCheck {
    double inner_excess; // max over directions of gauge_B / gauge_E - 1   (E inside B)
    double outer_excess; // max of gauge_E / (sqrt(n) gauge_B) - 1         (B inside sqrt(n) E)
    bool pass;
};

/// Checks E subset B subset sqrt(n) E along random directions.
inline ContainmentCheck john_containment(const QuasiNormedSpace &x, const Ellipsoid &e, std::size_t directions,
                                         RandomSource &rng, double slack = 1e-6) {
    const double sn = std::sqrt(static_cast<double>(x.dim()));
    ContainmentCheck c{-kInf, -kInf, true};
    for (std::size_t i = 0; i < directions; ++i) {
        const Vector u = random_direction(rng, x.dim());
        const double gb = x.gauge(u), ge = e.gauge(u);
        c.inner_excess = std::max(c.inner_excess, gb / ge - 1.0);
        c.outer_excess = std::max(c.outer_excess, ge / (sn * gb) - 1.0);
    }
    c.pass = c.inner_excess <= slack && c.outer_excess <= slack;
    return c;
}

} // namespace qbl

#endif // QBL_GEOMETRY_HPP
