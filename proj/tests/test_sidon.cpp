#include <gtest/gtest.h>

#include <cmath>

#include "qbl/geometry.hpp"
#include "qbl/sidon.hpp"

using namespace qbl;

namespace {

// weighted quasi-norms and random polytopes in dimension 2 or 3
QuasiNormedSpace random_space(RandomSource &rng, int i) {
    const std::size_t dim = 2 + rng.below(2);
    if (i % 3 == 2)
        return random_symmetric_polytope(rng, dim, dim + 2);
    const double p = 0.3 + 3.0 * rng.uniform();
    Vector w(dim);
    for (double &c : w)
        c = 0.5 + rng.uniform();
    return QuasiNormedSpace::weighted_lp(p, w);
}

std::vector<Vector> random_tuple(RandomSource &rng, std::size_t n, std::size_t dim) {
    std::vector<Vector> xs;
    for (std::size_t i = 0; i < n; ++i)
        xs.push_back(gaussian_sample(rng, dim));
    return xs;
}

} // namespace

TEST(FiniteAbelianGroup, ElementsAndLimits) {
    const FiniteAbelianGroup g({2, 3, 4});
    EXPECT_EQ(g.order(), 24u);
    EXPECT_EQ(g.period(), 12u);
    EXPECT_EQ(g.element(0), (std::vector<std::uint32_t>{0, 0, 0}));
    EXPECT_EQ(g.element(1), (std::vector<std::uint32_t>{1, 0, 0}));
    EXPECT_EQ(g.element(23), (std::vector<std::uint32_t>{1, 2, 3}));
    EXPECT_THROW(g.element(24), DomainError);
    EXPECT_THROW(FiniteAbelianGroup({}), DimensionError);
    EXPECT_THROW(FiniteAbelianGroup({1}), DomainError);
    EXPECT_THROW(FiniteAbelianGroup::cube(13), DimensionError);
    EXPECT_NO_THROW(FiniteAbelianGroup::cube(12));
}

TEST(Character, ValuesAreUnimodular) {
    const FiniteAbelianGroup z4({4});
    const Character g1(z4, {1});
    const Complex expect[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (std::uint32_t x = 0; x < 4; ++x) {
        const Complex v = g1.value(z4, {x});
        EXPECT_EQ(v.re, expect[x].re);
        EXPECT_EQ(v.im, expect[x].im);
    }
    const FiniteAbelianGroup g({3, 5});
    const Character c(g, {2, 3});
    EXPECT_FALSE(c.is_real(g));
    for (std::uint64_t i = 0; i < g.order(); ++i) {
        const Complex v = c.value(g, g.element(i));
        EXPECT_NEAR(std::hypot(v.re, v.im), 1.0, 1e-15);
    }
    EXPECT_TRUE(Character(z4, {2}).is_real(z4));
    EXPECT_THROW(Character(z4, {1, 1}), DimensionError);
}

TEST(Character, OrthonormalInL2) {
    for (const auto &factors : {std::vector<std::uint32_t>{2, 2, 2}, {4, 2}, {3, 5}, {6}, {2, 4, 8}, {16, 16}}) {
        const FiniteAbelianGroup g(factors);
        ASSERT_LE(g.order(), 256u);
        // the dual group is isomorphic to G: enumerate exponents the same way
        std::vector<Character> dual;
        for (std::uint64_t i = 0; i < g.order(); ++i)
            dual.emplace_back(g, g.element(i));
        const std::size_t step = g.order() > 64 ? 7 : 1;
        for (std::size_t a = 0; a < dual.size(); a += step)
            for (std::size_t b = 0; b < dual.size(); ++b) {
                const Complex ip = character_inner_product(g, dual[a], dual[b]);
                EXPECT_NEAR(ip.re, a == b ? 1.0 : 0.0, 1e-12) << g.describe();
                EXPECT_NEAR(ip.im, 0.0, 1e-12);
            }
    }
}

TEST(SpectralSet, Distinctness) {
    const FiniteAbelianGroup z4({4});
    EXPECT_THROW(SpectralSet(z4, {Character(z4, {1}), Character(z4, {5})}), DomainError);
    EXPECT_THROW(SpectralSet(z4, {}), DimensionError);
    const FiniteAbelianGroup g = FiniteAbelianGroup::cube(11);
    EXPECT_THROW(SpectralSet::coordinates(g), DimensionError);
}

TEST(SidonConstant, Examples) {
    const FiniteAbelianGroup z22 = FiniteAbelianGroup::cube(2);
    EXPECT_NEAR(sidon_constant(z22, SpectralSet::coordinates(z22)).value, 1.0, 1e-9);
    EXPECT_NEAR(sidon_constant(z22, SpectralSet(z22, {Character(z22, {1, 1})})).value, 1.0, 1e-9);

    // All of the dual: nu is forced by Fourier inversion, nu(g) = 4^{-1} sum_gamma eps_gamma gamma(g).
    // One minus sign gives |nu(g)| = 1/2 everywhere, i.e. norm 2; no pattern does better than that.
    std::vector<Character> all;
    for (std::uint64_t i = 0; i < 4; ++i)
        all.emplace_back(z22, z22.element(i));
    const SidonConstant s = sidon_constant(z22, SpectralSet(z22, all));
    EXPECT_NEAR(s.value, 2.0, 1e-9);
    double mass = 0.0;
    for (double v : s.measure)
        mass += std::abs(v);
    EXPECT_NEAR(mass, 2.0, 1e-9);

    EXPECT_THROW(sidon_constant(FiniteAbelianGroup({4}), SpectralSet(FiniteAbelianGroup({4}),
                                                                      {Character(FiniteAbelianGroup({4}), {1})})),
                 NotImplementedError);
}

TEST(SidonConstant, CoordinateCharactersAndLowerBound) {
    for (std::size_t n = 1; n <= 4; ++n) {
        const FiniteAbelianGroup g = FiniteAbelianGroup::cube(n);
        EXPECT_NEAR(sidon_constant(g, SpectralSet::coordinates(g)).value, 1.0, 1e-6) << n;
    }
    // any set: |eps_gamma| = |nu^(gamma)| <= ||nu||_1
    const FiniteAbelianGroup g = FiniteAbelianGroup::cube(3);
    const SpectralSet e(g, {Character(g, {1, 1, 0}), Character(g, {0, 1, 1}), Character(g, {1, 0, 1}),
                            Character(g, {1, 1, 1})});
    EXPECT_GE(sidon_constant(g, e).value, 1.0 - 1e-9);
}

TEST(CpRatio, CoordinateCharactersAreRademachers) {
    RandomSource rng(2024);
    for (int i = 0; i < 20; ++i) {
        const QuasiNormedSpace x = random_space(rng, i);
        const std::size_t n = 1 + rng.below(4);
        const FiniteAbelianGroup g = FiniteAbelianGroup::cube(n);
        const SpectralSet e = SpectralSet::coordinates(g);
        const auto xs = random_tuple(rng, n, x.dim());
        for (double p : {0.5, 1.0, 2.0, kInf}) {
            const CpRatio c = cp_ratio(g, e, x, p, xs);
            EXPECT_EQ(c.group_side, c.rademacher_side) << x.describe() << " p=" << p;
            EXPECT_EQ(c.ratio, 1.0);
        }
    }
}

TEST(CpRatio, Examples) {
    // single character, single vector
    RandomSource rng(5);
    const QuasiNormedSpace x = QuasiNormedSpace::lp(0.5, 3);
    const FiniteAbelianGroup g({3, 4});
    const SpectralSet one(g, {Character(g, {0, 2})});
    for (double p : {0.5, 2.0, kInf})
        EXPECT_NEAR(cp_ratio(g, one, x, p, random_tuple(rng, 1, 3)).ratio, 1.0, 1e-14);

    const FiniteAbelianGroup z4({4});
    const QuasiNormedSpace line = QuasiNormedSpace::euclidean(1);
    const CpRatio c = cp_ratio(z4, SpectralSet(z4, {Character(z4, {1})}), line, 2.0, {{-1.7}});
    EXPECT_NEAR(c.group_side, 1.7, 1e-15);
    EXPECT_NEAR(c.ratio, 1.0, 1e-15);

    EXPECT_THROW(cp_ratio(z4, SpectralSet(z4, {Character(z4, {1})}), line, 2.0, {{1.0}, {2.0}}), DimensionError);
    EXPECT_THROW(cp_ratio(z4, SpectralSet(z4, {Character(z4, {1})}), line, 2.0, {{0.0}}), DegenerateError);
}

TEST(CpRatio, ScalarParseval) {
    // orthonormal characters: both sides equal (sum |x_k|^2)^{1/2} at p = 2
    RandomSource rng(8);
    const FiniteAbelianGroup g = FiniteAbelianGroup::cube(4);
    const SpectralSet e(g, {Character(g, {1, 1, 0, 0}), Character(g, {0, 1, 1, 1}), Character(g, {1, 0, 0, 1}),
                            Character(g, {0, 0, 1, 0})});
    const QuasiNormedSpace line = QuasiNormedSpace::euclidean(1);
    for (int t = 0; t < 10; ++t) {
        const auto xs = random_tuple(rng, 4, 1);
        const CpRatio c = cp_ratio(g, e, line, 2.0, xs);
        double s = 0.0;
        for (const Vector &v : xs)
            s += v[0] * v[0];
        EXPECT_NEAR(c.group_side, std::sqrt(s), 1e-13);
        EXPECT_NEAR(c.ratio, 1.0, 1e-13);
    }
}

TEST(CpRatio, TranslationInvariance) {
    RandomSource rng(31);
    const FiniteAbelianGroup g = FiniteAbelianGroup::cube(4);
    const SpectralSet e(g, {Character(g, {1, 1, 0, 0}), Character(g, {0, 1, 1, 0}), Character(g, {0, 0, 0, 1})});
    const Character chi(g, {1, 0, 1, 1});
    const SpectralSet moved = e.translated(g, chi);
    // real translations in a group with complex characters
    const FiniteAbelianGroup h({4, 2});
    const SpectralSet f(h, {Character(h, {1, 0}), Character(h, {1, 1})});
    const SpectralSet f_moved = f.translated(h, Character(h, {2, 1}));
    for (int i = 0; i < 10; ++i) {
        const QuasiNormedSpace x = random_space(rng, i);
        const auto xs = random_tuple(rng, 3, x.dim());
        const auto ys = random_tuple(rng, 2, x.dim());
        for (double p : {0.5, 1.0, 2.0, kInf}) {
            EXPECT_EQ(cp_ratio(g, e, x, p, xs).group_side, cp_ratio(g, moved, x, p, xs).group_side);
            EXPECT_EQ(cp_ratio(h, f, x, p, ys).group_side, cp_ratio(h, f_moved, x, p, ys).group_side);
        }
    }
}

TEST(SidonRegularity, Examples) {
    const SearchBudget budget{8, 200};
    RandomSource rng(77);
    const FiniteAbelianGroup g = FiniteAbelianGroup::cube(3);
    const QuasiNormedSpace x = QuasiNormedSpace::lp(0.5, 2);
    const RegularityEstimate r = sidon_regularity_experiment(g, SpectralSet::coordinates(g), x, 1.0, budget, rng);
    EXPECT_EQ(r.constant, 1.0);
    ASSERT_TRUE(r.sidon.has_value());
    EXPECT_NEAR(*r.sidon, 1.0, 1e-9);
    EXPECT_GE(r.cotype2_lower, 1.0 - 1e-12);

    const FiniteAbelianGroup z4({4});
    const RegularityEstimate single =
        sidon_regularity_experiment(z4, SpectralSet(z4, {Character(z4, {1})}), QuasiNormedSpace::euclidean(1), 2.0,
                                    budget, rng);
    EXPECT_NEAR(single.constant, 1.0, 1e-14);
    EXPECT_FALSE(single.sidon.has_value());

    const FiniteAbelianGroup g4 = FiniteAbelianGroup::cube(4);
    const SpectralSet e(g4, {Character(g4, {1, 1, 0, 0}), Character(g4, {0, 1, 1, 1})});
    const RegularityEstimate scalar =
        sidon_regularity_experiment(g4, e, QuasiNormedSpace::euclidean(1), 2.0, budget, rng);
    EXPECT_NEAR(scalar.constant, 1.0, 1e-12);
    EXPECT_NEAR(*scalar.sidon, 1.0, 1e-9);
}
