#include <gtest/gtest.h>

#include <cmath>

#include "qbl/factorization.hpp"

using namespace qbl;

namespace {

const SearchBudget kBudget{32, 1500};

void expect_witness_factors(const OperatorSpec &u, const FactorizationWitness &f, double tol = 1e-9) {
    const Matrix vw = f.v * f.w;
    for (std::size_t i = 0; i < vw.rows(); ++i)
        for (std::size_t j = 0; j < vw.cols(); ++j)
            EXPECT_NEAR(vw(i, j), u.matrix(i, j), tol);
}

} // namespace

TEST(OperatorNorm, Examples) {
    RandomSource rng(1);
    const QuasiNormedSpace e3 = QuasiNormedSpace::euclidean(3);
    EXPECT_NEAR(op_norm(OperatorSpec::identity(e3)), 1.0, 1e-12);
    const QuasiNormedSpace l1 = QuasiNormedSpace::lp(1.0, 2), e2 = QuasiNormedSpace::euclidean(2);
    EXPECT_DOUBLE_EQ(op_norm(OperatorSpec(Matrix::identity(2), l1, e2)), 1.0);
    // (1,1)/sqrt(2) has l_{1/2} gauge (2 * 2^{-1/4})^2 = 2^{3/2}, the maximum on the sphere
    const QuasiNormedSpace lh = QuasiNormedSpace::lp(0.5, 2);
    const OperatorSpec id(Matrix::identity(2), e2, lh);
    const NormValue v = op_norm(id, kBudget, rng);
    EXPECT_EQ(v.kind, EstimateKind::certified_lower_bound);
    EXPECT_NEAR(v.value, std::pow(2.0, 1.5), 1e-9);
    EXPECT_THROW(op_norm(id), NotImplementedError);
    EXPECT_EQ(op_norm(OperatorSpec(Matrix(2, 2), e2, lh)), 0.0);
}

TEST(OperatorNorm, ExactReductionsAgreeWithSearch) {
    RandomSource rng(2);
    const std::vector<std::pair<QuasiNormedSpace, QuasiNormedSpace>> pairs{
        {QuasiNormedSpace::lp(0.5, 3), QuasiNormedSpace::lp(0.5, 2)},
        {QuasiNormedSpace::lp(2.0 / 3.0, 3), QuasiNormedSpace::lp(1.0, 3)},
        {QuasiNormedSpace::euclidean(3), QuasiNormedSpace::lp(kInf, 2)},
        {QuasiNormedSpace::lp(1.5, 2), QuasiNormedSpace::lp(1.0, 3)},
        {QuasiNormedSpace::weighted_lp(2.0, {1.0, 4.0}), QuasiNormedSpace::weighted_lp(2.0, {2.0, 1.0, 0.5})},
        {QuasiNormedSpace::lp(3.0, 2), QuasiNormedSpace::symmetric_polytope({{1, 0}, {1, 1}, {-0.5, 1}})},
        {QuasiNormedSpace::r_convex_atoms({{1, 0}, {0, 1}, {1, 1}}, 0.5), QuasiNormedSpace::lp(0.5, 2)},
    };
    for (const auto &[x, y] : pairs)
        for (int t = 0; t < 5; ++t) {
            const OperatorSpec u(gaussian_matrix(rng, y.dim(), x.dim()), x, y);
            const double exact = op_norm(u);
            const double searched = detail::search_norm(u.matrix, x, y, {64, 3000}, rng);
            EXPECT_LE(searched, exact * (1.0 + 1e-9)) << x.describe() << " -> " << y.describe();
            EXPECT_GE(searched, exact * 0.98) << x.describe() << " -> " << y.describe();
        }
}

TEST(OperatorNorm, DiagonalBetweenWeightedSequenceSpaces) {
    const QuasiNormedSpace x = QuasiNormedSpace::weighted_lp(0.5, {1.0, 4.0});
    const QuasiNormedSpace y = QuasiNormedSpace::weighted_lp(2.0, {1.0, 9.0});
    // scales: x -> (1, 16), y -> (1, 3)
    const OperatorSpec u(Matrix::diagonal(Vector{2.0, -8.0}), y, y);
    EXPECT_NEAR(op_norm(u), 8.0, 1e-12);
    const OperatorSpec v(Matrix::diagonal(Vector{2.0, -8.0}), QuasiNormedSpace::lp(1.5, 2), QuasiNormedSpace::lp(3.0, 2));
    EXPECT_NEAR(op_norm(v), 8.0, 1e-12);
    EXPECT_NEAR(op_norm(OperatorSpec(Matrix::diagonal(Vector{2.0, -8.0}), x, y)), std::max(2.0, 8.0 * 3.0 / 16.0),
                1e-12);
}

TEST(Gamma2, EuclideanIdentity) {
    RandomSource rng(3);
    for (std::size_t n = 1; n <= 6; ++n) {
        const OperatorSpec id = OperatorSpec::identity(QuasiNormedSpace::euclidean(n));
        const Gamma2Bound g = gamma2_upper(id, n, kBudget, rng);
        EXPECT_NEAR(g.upper, 1.0, 1e-6) << n;
        EXPECT_EQ(g.upper_kind, EstimateKind::upper_bound);
        expect_witness_factors(id, g.witness);
    }
}

TEST(Gamma2, SquareAndCrossPolytope) {
    RandomSource rng(4);
    for (double p : {kInf, 1.0}) {
        const OperatorSpec id = OperatorSpec::identity(QuasiNormedSpace::lp(p, 2));
        const Gamma2Bound g = gamma2_upper(id, 2, kBudget, rng);
        EXPECT_GE(g.upper, std::sqrt(2.0) - 1e-9);
        EXPECT_LE(g.upper, std::sqrt(2.0) + 0.01);
        EXPECT_GE(g.upper, g.lower);
        expect_witness_factors(id, g.witness);
        // norms reproducible from the evaluators
        EXPECT_NEAR(op_norm(OperatorSpec(g.witness.w, id.source, QuasiNormedSpace::euclidean(2))), g.witness.norm_w,
                    1e-9);
        EXPECT_NEAR(op_norm(OperatorSpec(g.witness.v, QuasiNormedSpace::euclidean(2), id.target)), g.witness.norm_v,
                    1e-9);
    }
}

TEST(Gamma2, HilbertTargetMatchesOperatorNorm) {
    RandomSource rng(5);
    const QuasiNormedSpace x = QuasiNormedSpace::lp(1.0, 3), h = QuasiNormedSpace::euclidean(3);
    for (int t = 0; t < 5; ++t) {
        const OperatorSpec u(gaussian_matrix(rng, 3, 3), x, h);
        const Gamma2Bound g = gamma2_upper(u, 3, kBudget, rng);
        EXPECT_NEAR(g.upper, g.lower, 1e-6 * g.lower);
        expect_witness_factors(u, g.witness, 1e-9 * std::max(1.0, g.upper));
    }
}

TEST(Gamma2, RankDeficientAndZero) {
    RandomSource rng(6);
    const QuasiNormedSpace e3 = QuasiNormedSpace::euclidean(3);
    Matrix m(3, 3);
    m(0, 1) = 2.0;
    m(2, 1) = -1.0;
    const OperatorSpec u(m, e3, e3);
    const Gamma2Bound g = gamma2_upper(u, 2, kBudget, rng);
    EXPECT_NEAR(g.upper, std::sqrt(5.0), 1e-9);
    EXPECT_EQ(g.witness.k, 2u);
    expect_witness_factors(u, g.witness);
    const Gamma2Bound z = gamma2_upper(OperatorSpec(Matrix(3, 3), e3, e3), 1, kBudget, rng);
    EXPECT_EQ(z.upper, 0.0);
    EXPECT_THROW(gamma2_upper(OperatorSpec::identity(e3), 2, kBudget, rng), DimensionError);
}

TEST(EuclideanDistance, Examples) {
    RandomSource rng(7);
    const DistanceBracket e = euclidean_distance(QuasiNormedSpace::euclidean(3), kBudget, rng);
    EXPECT_NEAR(e.lower, 1.0, 1e-9);
    EXPECT_NEAR(e.upper, 1.0, 1e-6);
    for (double p : {kInf, 1.0}) {
        const DistanceBracket d = euclidean_distance(QuasiNormedSpace::lp(p, 2), kBudget, rng);
        EXPECT_LE(d.upper, std::sqrt(2.0) + 0.01);
        EXPECT_GE(d.lower, 1.0);
        EXPECT_LE(d.lower, d.upper);
    }
}

TEST(EuclideanDistance, JohnBoundOnPolytopes) {
    RandomSource rng(8);
    for (int t = 0; t < 6; ++t) {
        const std::size_t n = 2 + static_cast<std::size_t>(t % 2);
        const QuasiNormedSpace x = random_symmetric_polytope(rng, n, n + 2);
        const DistanceBracket d = euclidean_distance(x, {8, 800}, rng);
        EXPECT_EQ(d.upper_kind, EstimateKind::upper_bound);
        EXPECT_LE(d.upper, std::sqrt(static_cast<double>(n)) * (1.0 + 1e-6));
        EXPECT_LE(d.lower, d.upper);
    }
}

TEST(EnvelopeDistance, Examples) {
    RandomSource rng(9);
    EXPECT_EQ(envelope_distance(QuasiNormedSpace::lp(1.5, 3), kBudget, rng).value, 1.0);
    EXPECT_EQ(envelope_distance(QuasiNormedSpace::symmetric_polytope({{1, 0}, {0, 1}}), kBudget, rng).value, 1.0);
    const ConstantEstimate a = envelope_distance(QuasiNormedSpace::lp(0.5, 3), kBudget, rng);
    EXPECT_NEAR(a.value, 3.0, 1e-9);
    const ConstantEstimate b = envelope_distance(QuasiNormedSpace::lp(2.0 / 3.0, 2), kBudget, rng);
    EXPECT_NEAR(b.value, std::sqrt(2.0), 1e-9);
    EXPECT_NEAR(envelope_distance_lp(0.5, 3), 3.0, 1e-12);
    EXPECT_NEAR(envelope_distance_lp(2.0 / 3.0, 2), std::sqrt(2.0), 1e-12);
}

TEST(EnvelopeDistance, ReachesClosedForm) {
    RandomSource rng(10);
    for (double p : {0.5, 2.0 / 3.0, 0.4})
        for (std::size_t n = 2; n <= 4; ++n) {
            const QuasiNormedSpace x = QuasiNormedSpace::lp(p, n);
            const double want = envelope_distance_lp(p, n);
            const ConstantEstimate e = envelope_distance(x, kBudget, rng);
            EXPECT_GE(e.value, 0.98 * want);
            EXPECT_LE(e.value, want * (1.0 + 1e-9));
        }
}

TEST(Delta, Examples) {
    RandomSource rng(11);
    const QuasiNormedSpace poly = QuasiNormedSpace::symmetric_polytope({{1, 0}, {0.3, 1}});
    const DeltaBracket one = delta_upper(OperatorSpec::identity(poly), kBudget, rng);
    EXPECT_NEAR(one.upper, 1.0, 1e-12);
    EXPECT_EQ(one.upper_kind, EstimateKind::upper_bound);
    const QuasiNormedSpace x = QuasiNormedSpace::lp(0.5, 3);
    const DeltaBracket to_env = delta_upper(OperatorSpec(Matrix::identity(3), x, envelope(x)), kBudget, rng);
    EXPECT_NEAR(to_env.upper, 1.0, 1e-12);
    const DeltaBracket self = delta_upper(OperatorSpec::identity(x), kBudget, rng);
    EXPECT_NEAR(self.upper, 3.0, 1e-6);
    EXPECT_NEAR(self.upper, envelope_distance(x, kBudget, rng).value, 1e-6);
}

TEST(GaussianMean, Examples) {
    RandomSource rng(12);
    for (std::size_t n : {1u, 3u, 5u}) {
        const QuasiNormedSpace e = QuasiNormedSpace::euclidean(n);
        const MeanEstimate m = gaussian_mean(OperatorSpec::identity(e), 100'000, rng);
        EXPECT_NEAR(m.value, std::sqrt(double(n)), 3.0 * m.std_error) << n;
    }
    const QuasiNormedSpace e2 = QuasiNormedSpace::euclidean(2);
    const MeanEstimate d = gaussian_mean(OperatorSpec(Matrix::diagonal(Vector{3.0, 4.0}), e2, e2), 100'000, rng);
    EXPECT_NEAR(d.value, 5.0, 3.0 * d.std_error);
    EXPECT_EQ(gaussian_mean(OperatorSpec(Matrix(2, 2), e2, e2), 10'000, rng).value, 0.0);
    EXPECT_THROW(gaussian_mean(OperatorSpec::identity(QuasiNormedSpace::lp(1.0, 2)), 10'000, rng), DomainError);
}

TEST(GaussianMean, AdditiveOverOrthogonalSums) {
    RandomSource rng(13);
    const Matrix a = gaussian_matrix(rng, 2, 2), b = gaussian_matrix(rng, 2, 2);
    Matrix ab(4, 4);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            ab(i, j) = a(i, j);
            ab(i + 2, j + 2) = b(i, j);
        }
    const QuasiNormedSpace e2 = QuasiNormedSpace::euclidean(2), e4 = QuasiNormedSpace::euclidean(4);
    const MeanEstimate la = gaussian_mean(OperatorSpec(a, e2, e2), 100'000, rng);
    const MeanEstimate lb = gaussian_mean(OperatorSpec(b, e2, e2), 100'000, rng);
    const MeanEstimate lab = gaussian_mean(OperatorSpec(ab, e4, e4), 100'000, rng);
    const double lhs = lab.value * lab.value, rhs = la.value * la.value + lb.value * lb.value;
    const double se = std::sqrt(std::pow(2 * lab.value * lab.std_error, 2) + std::pow(2 * la.value * la.std_error, 2) +
                                std::pow(2 * lb.value * lb.std_error, 2));
    EXPECT_NEAR(lhs, rhs, 3.0 * se);
}

TEST(ApproxNumbers, Examples) {
    RandomSource rng(14);
    const QuasiNormedSpace e3 = QuasiNormedSpace::euclidean(3);
    const OperatorSpec d(Matrix::diagonal(Vector{3.0, 2.0, 1.0}), e3, e3);
    const NormValue a2 = approx_numbers(d, 2, kBudget, rng);
    EXPECT_NEAR(a2.value, 2.0, 1e-12);
    EXPECT_EQ(a2.kind, EstimateKind::exact);
    Matrix r1(3, 3);
    r1(0, 0) = 1.0;
    EXPECT_EQ(approx_numbers(OperatorSpec(r1, e3, e3), 2, kBudget, rng).value, 0.0);
    const QuasiNormedSpace linf = QuasiNormedSpace::lp(kInf, 3);
    const OperatorSpec u(gaussian_matrix(rng, 3, 3), e3, linf);
    EXPECT_NEAR(approx_numbers(u, 1, kBudget, rng).value, op_norm(u), 1e-12);
}

TEST(ApproxNumbers, EuclideanComparison) {
    // ||y||_2 / sqrt(m) <= ||y||_inf <= ||y||_2 sandwiches a_k between s_k / sqrt(m) and s_k
    RandomSource rng(15);
    const QuasiNormedSpace e3 = QuasiNormedSpace::euclidean(3), linf = QuasiNormedSpace::lp(kInf, 3);
    for (int t = 0; t < 4; ++t) {
        const Matrix m = gaussian_matrix(rng, 3, 3);
        const Vector s = singular_values(m);
        double prev = kInf;
        for (std::size_t k = 1; k <= 3; ++k) {
            const NormValue a = approx_numbers(OperatorSpec(m, e3, linf), k, kBudget, rng);
            EXPECT_LE(a.value, s[k - 1] * (1.0 + 1e-9));
            EXPECT_GE(a.value, s[k - 1] / std::sqrt(3.0) * (1.0 - 1e-9));
            EXPECT_LE(a.value, prev * (1.0 + 1e-9));
            prev = a.value;
        }
    }
}

TEST(WeakCotype, EuclideanProfile) {
    RandomSource rng(16);
    const WeakCotypeProfile p = weak_cotype2_profile(QuasiNormedSpace::euclidean(4), 4, 3, kBudget, rng);
    ASSERT_EQ(p.rows.size(), 12u);
    for (const WeakCotypeRow &row : p.rows) {
        EXPECT_GT(row.ratio, 0.0);
        EXPECT_LE(row.ratio, p.value);
        // a_k sqrt(k) <= ||s||_2 = l(u) for Euclidean targets, up to sampling error
        EXPECT_LE(row.ratio, 1.1);
    }
}

TEST(Boundedness, HilbertCases) {
    RandomSource rng(17);
    const auto rows = boundedness_experiment({{QuasiNormedSpace::euclidean(3), QuasiNormedSpace::euclidean(3)},
                                              {QuasiNormedSpace::lp(1.0, 3), QuasiNormedSpace::euclidean(3)}},
                                             3, FactorThrough::hilbert, kBudget, rng);
    ASSERT_EQ(rows.size(), 6u);
    for (const BoundednessRow &r : rows)
        EXPECT_NEAR(r.ratio, 1.0, 1e-6) << r.source << " -> " << r.target;
    RandomSource again(17);
    const auto rows2 = boundedness_experiment({{QuasiNormedSpace::euclidean(3), QuasiNormedSpace::euclidean(3)},
                                               {QuasiNormedSpace::lp(1.0, 3), QuasiNormedSpace::euclidean(3)}},
                                              3, FactorThrough::hilbert, kBudget, again);
    for (std::size_t i = 0; i < rows.size(); ++i)
        EXPECT_EQ(rows[i].factor, rows2[i].factor);
}

TEST(Boundedness, EnvelopeFactorization) {
    RandomSource rng(18);
    const auto rows = boundedness_experiment({{QuasiNormedSpace::lp(1.0, 2), QuasiNormedSpace::lp(0.5, 2)}}, 3,
                                             FactorThrough::envelope, kBudget, rng);
    for (const BoundednessRow &r : rows)
        EXPECT_NEAR(r.ratio, 1.0, 1e-12); // r = 1 source is its own envelope
}

TEST(KConvexityExponent, Candidates) {
    const PhiCandidates h = phi_candidates(0.5);
    EXPECT_FALSE(h.stated.has_value());
    const PhiCandidates t = phi_candidates(1.0 / 3.0);
    EXPECT_NEAR(*t.stated, 2.0, 1e-12);
    EXPECT_NEAR(t.envelope_chain, 0.8, 1e-12);
    EXPECT_NEAR(t.interpolation, 0.4, 1e-12);
    RandomSource rng(19);
    const KConvexityRow row = kconvexity_against_distance(QuasiNormedSpace::lp(0.5, 2), 2, {8, 300}, rng);
    EXPECT_GE(row.k_lower, 1.0 - 1e-12);
    EXPECT_GE(row.d_upper, row.d_lower);
    EXPECT_FALSE(row.normalized_stated.has_value());
}

TEST(QuotientVolumes, FullDimensionMatchesSpace) {
    const QuasiNormedSpace x = QuasiNormedSpace::lp(1.0, 3);
    const RandomSource rng(20);
    MonteCarloOptions opt;
    opt.samples = 20'000;
    const auto rows = quotient_outer_volume_ratios(x, 2, rng, opt);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows.back().quotient_dim, 3u);
    EXPECT_NEAR(rows.back().vr_star.value, vr_star(x, RandomSource(0)).value, 1e-12);
    for (const QuotientVolumeRow &r : rows)
        EXPECT_GE(r.vr_star.upper, 1.0 - 1e-9);
}
