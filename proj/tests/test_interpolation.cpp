#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <numbers>

#include "qbl/interpolation.hpp"

using namespace qbl;

namespace {

const SearchBudget kBudget{2, 600};

NormPair line_pair(double a, double b) {
    return NormPair::with_constants(
        1, [a](std::span<const double> v) { return a * std::abs(v[0]); },
        [b](std::span<const double> v) { return b * std::abs(v[0]); }, 1.0, b / a, b / a);
}

// g_j(x) = ||w_j o x||_2
NormPair diagonal_l2_pair(const Vector &a, const Vector &b) {
    auto g = [](Vector w) -> Gauge {
        return [w](std::span<const double> v) {
            double s = 0.0;
            for (std::size_t i = 0; i < w.size(); ++i)
                s += w[i] * w[i] * v[i] * v[i];
            return std::sqrt(s);
        };
    };
    double lo = kInf, hi = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        lo = std::min(lo, b[i] / a[i]);
        hi = std::max(hi, b[i] / a[i]);
    }
    return NormPair::with_constants(a.size(), g(a), g(b), 1.0, lo, hi);
}

// separable minimization: each coordinate contributes a^2 t^2 b^2 x^2 / (a^2 + t^2 b^2)
double diagonal_l2_k2(const Vector &a, const Vector &b, double t, const Vector &x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * x[i] * a[i] * a[i] * t * t * b[i] * b[i] / (a[i] * a[i] + t * t * b[i] * b[i]);
    return std::sqrt(s);
}

// theta-norm of the diagonal pair: C_theta * ||a^{1-theta} b^theta o x||_2
double diagonal_l2_theta(const Vector &a, const Vector &b, double theta, const Vector &x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = std::pow(a[i], 1.0 - theta) * std::pow(b[i], theta);
        s += w * w * x[i] * x[i];
    }
    return theta_norm_line_constant(theta) * std::sqrt(s);
}

Vector positive_weights(RandomSource &rng, std::size_t n) {
    Vector w(n);
    for (double &x : w)
        x = std::exp(rng.uniform(-1.0, 1.0));
    return w;
}

} // namespace

TEST(KFunctional, EqualGaugesAtExponentR) {
    RandomSource rng(1);
    for (double p : {0.5, 2.0 / 3.0, 1.0}) {
        const QuasiNormedSpace x = QuasiNormedSpace::lp(p, 3);
        const NormPair pair = NormPair::equal(x);
        for (int k = 0; k < 10; ++k) {
            const Vector v = gaussian_sample(rng, 3);
            for (double t : {1e-3, 0.3, 1.0, 2.5, 1e3}) {
                const double want = std::min(1.0, t) * x.gauge(v);
                EXPECT_NEAR(k_functional(pair, p, t, v, kBudget).value, want, 1e-12 * want) << p << " " << t;
            }
        }
    }
}

TEST(KFunctional, ZeroVector) {
    const NormPair pair = NormPair::equal(QuasiNormedSpace::lp(0.5, 2));
    for (double t : {1e-4, 1.0, 1e4}) {
        EXPECT_EQ(k_functional(pair, 2.0, t, Vector{0, 0}, kBudget).value, 0.0);
        EXPECT_EQ(k_functional(pair, 0.5, t, Vector{0, 0}, kBudget).value, 0.0);
    }
}

TEST(KFunctional, LineClosedForm) {
    const NormPair pair = line_pair(1.0, 1.0);
    for (double x : {1.0, -2.5})
        for (double t : {1e-6, 1e-3, 0.1, 1.0, 7.0, 1e4, 1e6}) {
            const double want = std::abs(x) * t / std::sqrt(1.0 + t * t);
            EXPECT_NEAR(k_functional(pair, 2.0, t, Vector{x}, kBudget).value, want, 1e-9 * want) << t;
        }
}

TEST(KFunctional, DiagonalEuclideanClosedForm) {
    RandomSource rng(2);
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
        const Vector a = positive_weights(rng, n), b = positive_weights(rng, n);
        const NormPair pair = diagonal_l2_pair(a, b);
        const Vector x = gaussian_sample(rng, n);
        for (double t : {1e-2, 0.5, 1.0, 3.0, 1e2}) {
            const double want = diagonal_l2_k2(a, b, t, x);
            const KValue got = k_functional(pair, 2.0, t, x, kBudget);
            EXPECT_NEAR(got.value, want, 1e-7 * want) << k << " " << t;
            EXPECT_LE(got.lower, want * (1.0 + 1e-12));
        }
    }
}

TEST(KFunctional, ExponentSandwich) {
    // 2^{1/2-1/r} K_r <= K_2 <= K_r
    RandomSource rng(3);
    const QuasiNormedSpace x = QuasiNormedSpace::lp(0.5, 2);
    const NormPair pair = NormPair::equal(x);
    const double alpha = std::pow(2.0, 0.5 - 2.0);
    for (int k = 0; k < 20; ++k) {
        const Vector v = gaussian_sample(rng, 2);
        for (double t : {0.1, 1.0, 10.0}) {
            const double kr = std::min(1.0, t) * x.gauge(v);
            const double k2 = k_functional(pair, 2.0, t, v, kBudget).value;
            EXPECT_LE(k2, kr * (1.0 + 1e-12));
            EXPECT_GE(k2, alpha * kr * (1.0 - 1e-12));
        }
    }
}

TEST(KFunctional, MonotoneAndBoundedByEndpoints) {
    RandomSource rng(4);
    const NormPair pair = NormPair::from_spaces(QuasiNormedSpace::lp(1.0, 3), QuasiNormedSpace::lp(0.5, 3));
    for (int k = 0; k < 10; ++k) {
        const Vector v = gaussian_sample(rng, 3);
        double prev = 0.0;
        for (double t = 1e-3; t < 1e3; t *= 3.0) {
            const KValue kv = k_functional(pair, 2.0, t, v, kBudget);
            EXPECT_GE(kv.value, prev * (1.0 - 1e-9));
            EXPECT_LE(kv.value, std::min(pair.gauge0(v), t * pair.gauge1(v)) * (1.0 + 1e-12));
            EXPECT_LE(kv.lower, kv.value);
            prev = kv.value;
        }
    }
}

TEST(KFunctional, RTriangleInequality) {
    RandomSource rng(5);
    const double r = 0.5;
    const NormPair pair = NormPair::from_spaces(QuasiNormedSpace::euclidean(2), QuasiNormedSpace::lp(r, 2));
    for (int k = 0; k < 40; ++k) {
        const Vector x = gaussian_sample(rng, 2), y = gaussian_sample(rng, 2);
        const double t = std::exp(rng.uniform(-3.0, 3.0));
        const double kx = k_functional(pair, 2.0, t, x, kBudget).value;
        const double ky = k_functional(pair, 2.0, t, y, kBudget).value;
        const double kxy = k_functional(pair, 2.0, t, add(x, y), kBudget).value;
        EXPECT_LE(std::pow(kxy, r), (std::pow(kx, r) + std::pow(ky, r)) * (1.0 + 1e-9));
    }
}

TEST(KFunctional, RejectsBadInput) {
    const NormPair pair = NormPair::equal(QuasiNormedSpace::lp(0.5, 2));
    EXPECT_THROW(k_functional(pair, 2.0, 1.0, Vector{1, 0}, {2, 0}), DomainError);
    EXPECT_THROW(k_functional(pair, 2.0, 0.0, Vector{1, 0}, kBudget), DomainError);
    EXPECT_THROW(k_functional(pair, 0.25, 1.0, Vector{1, 0}, kBudget), DomainError);
    EXPECT_THROW(k_functional(pair, 2.0, 1.0, Vector{1, 0, 0}, kBudget), DimensionError);
}

TEST(ThetaNorm, LineClosedForm) {
    const NormPair pair = line_pair(1.0, 1.0);
    for (double theta : {0.25, 0.5, 0.75}) {
        ThetaParams params;
        params.theta = theta;
        for (double x : {1.0, -3.0}) {
            const double want = theta_norm_line_constant(theta) * std::abs(x);
            EXPECT_NEAR(theta_norm(pair, params, Vector{x}).value, want, 1e-4 * want) << theta;
        }
    }
    EXPECT_NEAR(theta_norm_line_constant(0.5), std::sqrt(std::numbers::pi / 8.0), 1e-15);
}

TEST(ThetaNorm, ZeroVector) {
    const NormPair pair = NormPair::equal(QuasiNormedSpace::lp(0.5, 2));
    EXPECT_EQ(theta_norm(pair, ThetaParams{}, Vector{0, 0}).value, 0.0);
}

TEST(ThetaNorm, DiagonalEuclideanClosedForm) {
    RandomSource rng(6);
    for (int k = 0; k < 6; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
        const Vector a = positive_weights(rng, n), b = positive_weights(rng, n);
        const Vector x = gaussian_sample(rng, n);
        ThetaParams params;
        params.theta = 0.25 + 0.25 * (k % 3);
        const double want = diagonal_l2_theta(a, b, params.theta, x);
        const ThetaNorm got = theta_norm(diagonal_l2_pair(a, b), params, x);
        EXPECT_NEAR(got.value, want, 1e-4 * want) << k;
        EXPECT_LE(got.lower, got.value);
    }
}

TEST(ThetaNorm, EqualGaugeSandwich) {
    RandomSource rng(7);
    const std::vector<QuasiNormedSpace> spaces{QuasiNormedSpace::lp(0.5, 2), QuasiNormedSpace::lp(1.0, 3),
                                               QuasiNormedSpace::weighted_lp(2.0 / 3.0, {1.0, 3.0}),
                                               QuasiNormedSpace::symmetric_polytope({{1, 0}, {0.5, 1}})};
    for (const QuasiNormedSpace &x : spaces)
        for (double theta : {0.25, 0.5, 0.75}) {
            ThetaParams params;
            params.theta = theta;
            const SandwichCheck c = equal_gauge_sandwich(x, params, gaussian_sample(rng, x.dim()));
            EXPECT_TRUE(c.pass) << x.describe() << " " << theta << " " << c.ratio;
        }
}

TEST(ThetaNorm, Homogeneous) {
    const NormPair pair = NormPair::from_spaces(QuasiNormedSpace::euclidean(2), QuasiNormedSpace::lp(0.5, 2));
    ThetaParams params;
    params.theta = 0.3;
    const Vector x{0.7, -1.2};
    const double base = theta_norm(pair, params, x).value;
    for (double lam : {-2.0, 0.1, 5.0})
        EXPECT_NEAR(theta_norm(pair, params, scaled(x, lam)).value, std::abs(lam) * base, 1e-6 * std::abs(lam) * base);
}

TEST(ThetaNorm, ThreadCountIndependent) {
    const NormPair pair = NormPair::from_spaces(QuasiNormedSpace::lp(1.0, 2), QuasiNormedSpace::lp(0.5, 2));
    ThetaParams params;
    const double one = theta_norm(pair, params, Vector{1.0, 0.4}).value;
    params.threads = 3;
    EXPECT_EQ(theta_norm(pair, params, Vector{1.0, 0.4}).value, one);
}

TEST(ThetaNorm, RejectsBadParams) {
    const NormPair pair = line_pair(1.0, 1.0);
    ThetaParams p;
    p.theta = 1.0;
    EXPECT_THROW(theta_norm(pair, p, Vector{1}), DomainError);
    p = ThetaParams{};
    p.t_max = 10.0;
    EXPECT_THROW(theta_norm(pair, p, Vector{1}), DomainError);
    p = ThetaParams{};
    p.budget.refine_evals = 0;
    EXPECT_THROW(theta_norm(pair, p, Vector{1}), DomainError);
}

TEST(OperatorInterpolation, LineIsEquality) {
    // on the line both sides equal |d| (a'/a)^{1-theta} (b'/b)^theta
    RandomSource rng(8);
    const NormPair src = line_pair(1.0, 3.0), tgt = line_pair(2.0, 0.5);
    Matrix u(1, 1);
    u(0, 0) = -1.5;
    ThetaParams params;
    params.theta = 0.4;
    const BoundCheck c = interp_operator_bound_check(u, src, tgt, 1.5 * 2.0, 1.5 * 0.5 / 3.0, params, 2, rng);
    EXPECT_TRUE(c.pass);
    EXPECT_NEAR(c.lhs, c.rhs, 1e-4 * c.rhs);
}

TEST(OperatorInterpolation, DiagonalOperators) {
    RandomSource rng(9);
    ThetaParams params;
    params.nodes = 200;
    for (int k = 0; k < 10; ++k) {
        const std::size_t n = 2;
        const Vector a = positive_weights(rng, n), b = positive_weights(rng, n);
        const Vector a2 = positive_weights(rng, n), b2 = positive_weights(rng, n);
        const Vector d = gaussian_sample(rng, n);
        double n0 = 0.0, n1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            n0 = std::max(n0, std::abs(d[i]) * a2[i] / a[i]);
            n1 = std::max(n1, std::abs(d[i]) * b2[i] / b[i]);
        }
        params.theta = 0.25 + 0.25 * (k % 3);
        const BoundCheck c = interp_operator_bound_check(Matrix::diagonal(d), diagonal_l2_pair(a, b),
                                                         diagonal_l2_pair(a2, b2), n0, n1, params, 3, rng);
        EXPECT_TRUE(c.pass) << k << " " << c.lhs << " " << c.rhs;
    }
}

TEST(OperatorInterpolation, IdentityAndZero) {
    RandomSource rng(10);
    const QuasiNormedSpace x = QuasiNormedSpace::lp(0.5, 2);
    const NormPair pair = NormPair::equal(x);
    ThetaParams params;
    params.nodes = 200;
    const BoundCheck id = interp_operator_bound_check(Matrix::identity(2), pair, pair, 1.0, 1.0, params, 2, rng);
    EXPECT_TRUE(id.pass);
    EXPECT_GE(id.lhs, 1.0 - 1e-6);
    const BoundCheck zero = interp_operator_bound_check(Matrix(2, 2), pair, pair, 0.0, 0.0, params, 2, rng);
    EXPECT_EQ(zero.lhs, 0.0);
    EXPECT_TRUE(zero.pass);
}

TEST(L2Sum, SingleBlockIsExact) {
    const NormPair pair = NormPair::from_spaces(QuasiNormedSpace::euclidean(2), QuasiNormedSpace::lp(0.5, 2));
    ThetaParams params;
    params.nodes = 200;
    const BoundCheck c = l2_sum_check(pair, params, {{0.3, -1.0}});
    EXPECT_DOUBLE_EQ(c.lhs, c.rhs);
    const BoundCheck z = l2_sum_check(pair, params, {{0.3, -1.0}, {0.0, 0.0}});
    EXPECT_TRUE(z.pass);
    EXPECT_NEAR(z.lhs, c.rhs, 1e-6 * c.rhs);
}

TEST(L2Sum, LineComponents) {
    RandomSource rng(11);
    const NormPair pair = line_pair(1.0, 2.0);
    ThetaParams params;
    params.theta = 0.6;
    for (int k = 0; k < 5; ++k) {
        const std::vector<Vector> xs{{rng.normal()}, {rng.normal()}};
        const BoundCheck c = l2_sum_check(pair, params, xs);
        // each block follows the closed form of the line pair
        const double want = diagonal_l2_theta({1.0}, {2.0}, 0.6, {std::hypot(xs[0][0], xs[1][0])});
        EXPECT_NEAR(c.rhs, want, 1e-4 * want);
        EXPECT_NEAR(c.lhs, want, 1e-4 * want);
        EXPECT_TRUE(c.pass);
    }
}

TEST(L2Sum, QuasiNormedBlocks) {
    RandomSource rng(12);
    const NormPair pair = NormPair::from_spaces(QuasiNormedSpace::lp(1.0, 2), QuasiNormedSpace::lp(0.5, 2));
    ThetaParams params;
    params.nodes = 200;
    const BoundCheck c = l2_sum_check(pair, params, {gaussian_sample(rng, 2), gaussian_sample(rng, 2)});
    EXPECT_TRUE(c.pass) << c.lhs << " " << c.rhs;
    EXPECT_THROW(l2_sum_check(pair, params, std::vector<Vector>(5, Vector{1, 0})), DimensionError);
}

TEST(EqualNormsType, Examples) {
    RandomSource rng(13);
    const QuasiNormedSpace line = QuasiNormedSpace::euclidean(1);
    EXPECT_NEAR(equal_norms_type_ratio(line, 2.0, std::vector<Vector>(5, Vector{1})), 1.0, 1e-15);
    const QuasiNormedSpace l = QuasiNormedSpace::lp(0.5, 2);
    EXPECT_NEAR(equal_norms_type_ratio(l, 1.5, {{0.3, 2.0}}), 1.0, 1e-15);
    const QuasiNormedSpace l1 = QuasiNormedSpace::lp(1.0, 2);
    EXPECT_NEAR(equal_norms_type_ratio(l1, 1.0, {{1, 0}, {0, 1}}), 1.0, 1e-15);
    const ConstantEstimate e = equal_norms_type(l, 1.0, 3, {16, 300}, rng);
    EXPECT_GE(e.value, 1.0);
    EXPECT_NEAR(equal_norms_type_ratio(l, 1.0, e.witness), e.value, 1e-12);
    EXPECT_THROW(equal_norms_type(l, 1.0, 13, {16, 300}, rng), DimensionError);
}

TEST(EnvelopeSweep, CompletesDeterministically) {
    ThetaParams params;
    params.nodes = 120;
    const auto a = envelope_distance_sweep(0.5, 0.25, 4, params);
    const auto b = envelope_distance_sweep(0.5, 0.25, 4, params);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].norm_ones, b[i].norm_ones);
        EXPECT_GE(a[i].envelope_lower, 1.0);
        EXPECT_GT(a[i].growth, 0.0);
    }
}
