/**
 *  @file qbl/polytope.hpp
 *  @brief Facets, vertices and exact volumes of origin-symmetric polytopes.
 *
 *  A symmetric polytope containing the origin in its interior has a facet
 *  description { x : a_j . x <= 1 }. The facet normals a_j are exactly the
 *  vertices of the polar body, which is how duals are built elsewhere.
 *  Facets are found by brute force over dim-subsets of the points, which is
 *  fine for the vertex counts used at desk scale.
 */

#ifndef QBL_POLYTOPE_HPP
#define QBL_POLYTOPE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qbl/numkernel.hpp"

namespace qbl {

inline constexpr std::uint64_t kMaxFacetCombinations = 4'000'000;

namespace detail {

/// Calls f(indices) for every k-subset of {0..m-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t m, std::size_t k, F &&f) {
    if (k > m)
        return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    for (;;) {
        f(static_cast<const std::vector<std::size_t> &>(idx));
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == m - k + i - 1)
            --i;
        if (i == 0)
            return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

inline bool near_duplicate(const Vector &a, const std::vector<Vector> &list, double tol) {
    for (const Vector &b : list) {
        double d = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            d = std::max(d, std::abs(a[i] - b[i]));
        if (d <= tol * std::max(1.0, norm_inf(a)))
            return true;
    }
    return false;
}

} // namespace detail

/// Facet normals a_j of conv(points), where conv(points) = { x : a_j . x <= 1 }.
/// The points must span R^n and their hull must contain the origin in its
/// interior (true for symmetric spanning sets).
inline std::vector<Vector> polytope_facets(const std::vector<Vector> &points) {
    if (points.empty())
        throw DegenerateError("polytope_facets: empty point set");
    const std::size_t n = points.front().size();
    const std::size_t m = points.size();
    if (n == 0)
        throw DimensionError("polytope_facets: zero dimension");
    if (binomial(static_cast<unsigned>(m), static_cast<unsigned>(std::min(n, m))) > kMaxFacetCombinations)
        throw DimensionError("polytope_facets: too many vertex combinations for brute-force hull");
    double scale = 0.0;
    for (const Vector &p : points)
        scale = std::max(scale, norm_inf(p));
    if (!(scale > 0.0))
        throw DegenerateError("polytope_facets: all points are zero");

    std::vector<Vector> facets;
    const Vector ones(n, 1.0);
    detail::for_each_subset(m, n, [&](const std::vector<std::size_t> &idx) {
        Matrix v(n, n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                v(r, c) = points[idx[r]][c];
        Vector a;
        try {
            a = solve(v, ones);
        } catch (const DegenerateError &) {
            return;
        }
        for (const Vector &p : points)
            if (dot(a, p) > 1.0 + 1e-9)
                return;
        if (!detail::near_duplicate(a, facets, 1e-8))
            facets.push_back(std::move(a));
    });
    if (facets.size() < n + 1)
        throw DegenerateError("polytope_facets: point set does not enclose the origin");
    return facets;
}

/// Points of `points` that are vertices of their convex hull.
inline std::vector<Vector> polytope_vertices(const std::vector<Vector> &points, const std::vector<Vector> &facets) {
    const std::size_t n = points.front().size();
    std::vector<Vector> out;
    for (const Vector &p : points) {
        std::vector<Vector> touching;
        for (const Vector &a : facets)
            if (std::abs(dot(a, p) - 1.0) <= 1e-9)
                touching.push_back(a);
        if (touching.size() < n)
            continue;
        // p is a vertex iff the normals of the facets through it span R^n.
        if (numerical_rank(Matrix::from_columns(touching), 1e-9) == n && !detail::near_duplicate(p, out, 1e-12))
            out.push_back(p);
    }
    return out;
}

/// Vertices of { y in R^k : b_j . y <= 1 for all j } (a bounded symmetric
/// polytope), found by intersecting k-subsets of constraints.
inline std::vector<Vector> halfspace_vertices(const std::vector<Vector> &normals) {
    if (normals.empty())
        throw DegenerateError("halfspace_vertices: no constraints");
    const std::size_t k = normals.front().size();
    if (binomial(static_cast<unsigned>(normals.size()), static_cast<unsigned>(std::min(k, normals.size()))) >
        kMaxFacetCombinations)
        throw DimensionError("halfspace_vertices: too many constraint combinations");
    std::vector<Vector> verts;
    const Vector ones(k, 1.0);
    detail::for_each_subset(normals.size(), k, [&](const std::vector<std::size_t> &idx) {
        Matrix b(k, k);
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c)
                b(r, c) = normals[idx[r]][c];
        Vector y;
        try {
            y = solve(b, ones);
        } catch (const DegenerateError &) {
            return;
        }
        for (const Vector &a : normals)
            if (dot(a, y) > 1.0 + 1e-9)
                return;
        if (!detail::near_duplicate(y, verts, 1e-9))
            verts.push_back(std::move(y));
    });
    if (verts.empty())
        throw DegenerateError("halfspace_vertices: empty or unbounded region");
    return verts;
}

/// Exact volume of conv(points) for dimension 1, 2 or 3, by triangulating
/// each facet into a fan and coning every triangle to the origin.
inline double polytope_volume(const std::vector<Vector> &points, const std::vector<Vector> &facets) {
    const std::size_t n = points.front().size();
    if (n == 1) {
        double lo = 0.0, hi = 0.0;
        for (const Vector &p : points) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        return hi - lo;
    }
    if (n > 3)
        throw DimensionError("polytope_volume: exact triangulation only in dimension <= 3");
    double vol = 0.0;
    for (const Vector &a : facets) {
        std::vector<Vector> on;
        for (const Vector &p : points)
            if (std::abs(dot(a, p) - 1.0) <= 1e-9 && !detail::near_duplicate(p, on, 1e-12))
                on.push_back(p);
        if (on.size() < n)
            continue;
        if (n == 2) {
            const double dx = -a[1], dy = a[0];
            auto key = [&](const Vector &p) { return dx * p[0] + dy * p[1]; };
            const auto [lo, hi] = std::minmax_element(on.begin(), on.end(),
                                                      [&](const Vector &x, const Vector &y) { return key(x) < key(y); });
            vol += 0.5 * std::abs((*lo)[0] * (*hi)[1] - (*lo)[1] * (*hi)[0]);
            continue;
        }
        // n == 3: order the facet's points by angle around their centroid.
        Vector centroid(3, 0.0);
        for (const Vector &p : on)
            axpy(1.0 / static_cast<double>(on.size()), p, centroid);
        const std::vector<Vector> plane = orthogonal_complement(orthonormalize({a}), 3);
        std::sort(on.begin(), on.end(), [&](const Vector &x, const Vector &y) {
            const Vector dxv = sub(x, centroid), dyv = sub(y, centroid);
            return std::atan2(dot(dxv, plane[1]), dot(dxv, plane[0])) <
                   std::atan2(dot(dyv, plane[1]), dot(dyv, plane[0]));
        });
        for (std::size_t i = 1; i + 1 < on.size(); ++i) {
            const Vector &p0 = on[0], &p1 = on[i], &p2 = on[i + 1];
            const double det = p0[0] * (p1[1] * p2[2] - p1[2] * p2[1]) - p0[1] * (p1[0] * p2[2] - p1[2] * p2[0]) +
                               p0[2] * (p1[0] * p2[1] - p1[1] * p2[0]);
            vol += std::abs(det) / 6.0;
        }
    }
    return vol;
}

} // namespace qbl

#endif // QBL_POLYTOPE_HPP
