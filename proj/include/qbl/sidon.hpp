/**
 *  @file qbl/sidon.hpp
 *  @brief Finite abelian groups, their characters, Sidon constants of small
 *  character sets, and comparison of character sums with Rademacher sums in
 *  a quasi-normed space.
 */

#ifndef QBL_SIDON_HPP
#define QBL_SIDON_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qbl/lp.hpp"
#include "qbl/numkernel.hpp"
#include "qbl/randsigns.hpp"
#include "qbl/spaces.hpp"

namespace qbl {

inline constexpr std::size_t kMaxGroupOrder = 4096;
inline constexpr std::size_t kMaxSpectralSet = 10;
inline constexpr std::size_t kMaxRegularitySet = 8;

/// Z_{m_1} x ... x Z_{m_k}. Element index = sum x_j * (m_1 ... m_{j-1}),
/// so the first factor varies fastest.
class FiniteAbelianGroup {
  public:
    explicit FiniteAbelianGroup(std::vector<std::uint32_t> factors) : factors_(std::move(factors)) {
        if (factors_.empty())
            throw DimensionError("FiniteAbelianGroup: need at least one cyclic factor");
        std::uint64_t order = 1;
        for (std::uint32_t m : factors_) {
            if (m < 2)
                throw DomainError("FiniteAbelianGroup: cyclic factors must have order at least 2");
            order *= m;
            if (order > kMaxGroupOrder)
                throw DimensionError("FiniteAbelianGroup: order exceeds 4096");
        }
        order_ = order;
        period_ = 1;
        for (std::uint32_t m : factors_)
            period_ = std::lcm(period_, std::uint64_t{m});
    }

    /// Z_2^k.
    static FiniteAbelianGroup cube(std::size_t k) { return FiniteAbelianGroup(std::vector<std::uint32_t>(k, 2)); }

    const std::vector<std::uint32_t> &factors() const noexcept { return factors_; }
    std::size_t rank() const noexcept { return factors_.size(); }
    std::uint64_t order() const noexcept { return order_; }
    /// Exponent of the group: every character value is a period-th root of unity.
    std::uint64_t period() const noexcept { return period_; }

    bool is_cube() const {
        return std::all_of(factors_.begin(), factors_.end(), [](std::uint32_t m) { return m == 2; });
    }

    std::vector<std::uint32_t> element(std::uint64_t index) const {
        if (index >= order_)
            throw DomainError("FiniteAbelianGroup: element index out of range");
        std::vector<std::uint32_t> x(factors_.size());
        for (std::size_t j = 0; j < factors_.size(); ++j) {
            x[j] = static_cast<std::uint32_t>(index % factors_[j]);
            index /= factors_[j];
        }
        return x;
    }

    std::string describe() const {
        std::string s;
        for (std::size_t j = 0; j < factors_.size(); ++j)
            s += (j ? " x Z_" : "Z_") + std::to_string(factors_[j]);
        return s;
    }

  private:
    std::vector<std::uint32_t> factors_;
    std::uint64_t order_ = 1;
    std::uint64_t period_ = 1;
};

struct Complex {
    double re = 0.0;
    double im = 0.0;
};

/// gamma(x) = exp(2 pi i sum a_j x_j / m_j).
class Character {
  public:
    Character(const FiniteAbelianGroup &g, std::vector<std::uint32_t> exponents) : a_(std::move(exponents)) {
        if (a_.size() != g.rank())
            throw DimensionError("Character: exponent count does not match the group rank");
        for (std::size_t j = 0; j < a_.size(); ++j)
            a_[j] %= g.factors()[j];
    }

    /// The character that reads coordinate j of Z_2^k (or the generator of factor j).
    static Character coordinate(const FiniteAbelianGroup &g, std::size_t j) {
        std::vector<std::uint32_t> a(g.rank(), 0);
        a.at(j) = 1;
        return Character(g, std::move(a));
    }

    const std::vector<std::uint32_t> &exponents() const noexcept { return a_; }

    /// Phase numerator k with gamma(x) = exp(2 pi i k / period).
    std::uint64_t phase(const FiniteAbelianGroup &g, const std::vector<std::uint32_t> &x) const {
        const std::uint64_t l = g.period();
        std::uint64_t k = 0;
        for (std::size_t j = 0; j < a_.size(); ++j)
            k = (k + std::uint64_t{a_[j]} * x[j] % g.factors()[j] * (l / g.factors()[j])) % l;
        return k;
    }

    /// Values at quarter turns are exact.
    Complex value(const FiniteAbelianGroup &g, const std::vector<std::uint32_t> &x) const {
        const std::uint64_t l = g.period();
        const std::uint64_t k = phase(g, x);
        if (k == 0)
            return {1.0, 0.0};
        if (2 * k == l)
            return {-1.0, 0.0};
        if (4 * k == l)
            return {0.0, 1.0};
        if (4 * k == 3 * l)
            return {0.0, -1.0};
        const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(l);
        return {std::cos(t), std::sin(t)};
    }

    /// True when the character only takes the values +1 and -1.
    bool is_real(const FiniteAbelianGroup &g) const {
        for (std::size_t j = 0; j < a_.size(); ++j)
            if ((2 * std::uint64_t{a_[j]}) % g.factors()[j] != 0)
                return false;
        return true;
    }

    Character operator*(const Character &other) const {
        Character c = *this;
        for (std::size_t j = 0; j < a_.size(); ++j)
            c.a_[j] += other.a_[j]; // reduced lazily in phase()
        return c;
    }

    bool operator==(const Character &o) const = default;

  private:
    std::vector<std::uint32_t> a_;
};

/// Distinct characters E = {gamma_1..gamma_n} of a group.
class SpectralSet {
  public:
    SpectralSet(const FiniteAbelianGroup &g, std::vector<Character> chars) : chars_(std::move(chars)) {
        if (chars_.empty() || chars_.size() > kMaxSpectralSet)
            throw DimensionError("SpectralSet: size must lie in [1, 10]");
        // canonical exponents so that equality means equal characters
        for (Character &c : chars_) {
            std::vector<std::uint32_t> a = c.exponents();
            c = Character(g, std::move(a));
        }
        for (std::size_t i = 0; i < chars_.size(); ++i)
            for (std::size_t j = i + 1; j < chars_.size(); ++j)
                if (chars_[i] == chars_[j])
                    throw DomainError("SpectralSet: characters must be distinct");
    }

    /// The coordinate characters of Z_2^n: they are the Rademacher functions.
    static SpectralSet coordinates(const FiniteAbelianGroup &g) {
        std::vector<Character> cs;
        for (std::size_t j = 0; j < g.rank(); ++j)
            cs.push_back(Character::coordinate(g, j));
        return SpectralSet(g, std::move(cs));
    }

    std::size_t size() const noexcept { return chars_.size(); }
    const std::vector<Character> &characters() const noexcept { return chars_; }

    /// Every character multiplied by chi.
    SpectralSet translated(const FiniteAbelianGroup &g, const Character &chi) const {
        std::vector<Character> cs;
        for (const Character &c : chars_)
            cs.push_back(c * chi);
        return SpectralSet(g, std::move(cs));
    }

  private:
    std::vector<Character> chars_;
};

/// <gamma, gamma'> in L_2(G) with normalized counting measure.
inline Complex character_inner_product(const FiniteAbelianGroup &g, const Character &a, const Character &b) {
    double re = 0.0, im = 0.0;
    for (std::uint64_t i = 0; i < g.order(); ++i) {
        const auto x = g.element(i);
        const Complex u = a.value(g, x), v = b.value(g, x);
        re += u.re * v.re + u.im * v.im;
        im += u.im * v.re - u.re * v.im;
    }
    const double n = static_cast<double>(g.order());
    return {re / n, im / n};
}

struct SidonConstant {
    double value = 0.0;
    std::vector<int> worst_signs; // the sign pattern attaining the maximum
    Vector measure;               // a minimal-norm measure for that pattern
};

/// max over sign patterns eps of min { sum |nu(g)| : nu^(gamma) = eps_gamma, gamma in E }.
/// Exact (one LP per pattern) on Z_2^k, where the characters are real.
inline SidonConstant sidon_constant(const FiniteAbelianGroup &g, const SpectralSet &e) {
    if (!g.is_cube())
        throw NotImplementedError("sidon_constant: exact mode needs Z_2^k (real characters)");
    const std::size_t n = e.size();
    const std::size_t order = static_cast<std::size_t>(g.order());
    // nu = nu_plus - nu_minus, both nonnegative
    Matrix a(n, 2 * order);
    for (std::size_t gi = 0; gi < order; ++gi) {
        const auto x = g.element(gi);
        for (std::size_t k = 0; k < n; ++k) {
            const double v = e.characters()[k].value(g, x).re;
            a(k, gi) = v;
            a(k, order + gi) = -v;
        }
    }
    const Vector cost(2 * order, 1.0);
    SidonConstant out;
    out.value = -1.0;
    // nu -> -nu flips every sign, so the first sign can stay +1
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        Vector b(n);
        for (std::size_t k = 0; k < n; ++k)
            b[k] = (k > 0 && ((mask >> (k - 1)) & 1)) ? -1.0 : 1.0;
        const LpResult r = solve_lp(a, b, cost);
        if (r.status != LpStatus::optimal)
            throw DegenerateError("sidon_constant: interpolation problem infeasible (repeated character?)");
        if (r.objective > out.value) {
            out.value = r.objective;
            out.worst_signs.assign(b.begin(), b.end());
            out.measure.assign(order, 0.0);
            for (std::size_t gi = 0; gi < order; ++gi)
                out.measure[gi] = r.x[gi] - r.x[order + gi];
        }
    }
    return out;
}

struct CpRatio {
    double group_side = 0.0;      // ||sum x_k gamma_k||_{L_p(G, X)}
    double rademacher_side = 0.0; // ||sum x_k eps_k||_{L_p(D_n, X)}
    double ratio = 0.0;
};

/// Exact L_p(G, X) norm of sum x_k gamma_k. Complex values are evaluated in
/// X + X with gauge max(gauge(re), gauge(im)).
inline double character_sum_norm(const FiniteAbelianGroup &g, const SpectralSet &e, const QuasiNormedSpace &x,
                                 double p, const std::vector<Vector> &xs) {
    if (xs.size() != e.size())
        throw DimensionError("cp_ratio: vector count must equal the spectral set size");
    detail::check_tuple(xs, x.dim());
    detail::PowerMean mean(p);
    Vector re(x.dim()), im(x.dim());
    for (std::uint64_t gi = 0; gi < g.order(); ++gi) {
        const auto el = g.element(gi);
        std::fill(re.begin(), re.end(), 0.0);
        std::fill(im.begin(), im.end(), 0.0);
        bool complex = false;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const Complex c = e.characters()[k].value(g, el);
            // same accumulation as detail::signed_combination when c is +-1
            for (std::size_t j = 0; j < re.size(); ++j)
                re[j] += c.re * xs[k][j];
            if (c.im != 0.0) {
                complex = true;
                for (std::size_t j = 0; j < im.size(); ++j)
                    im[j] += c.im * xs[k][j];
            }
        }
        const double v = x.gauge(re);
        mean.add(complex ? std::max(v, x.gauge(im)) : v);
    }
    return mean.value();
}

inline CpRatio cp_ratio(const FiniteAbelianGroup &g, const SpectralSet &e, const QuasiNormedSpace &x, double p,
                        const std::vector<Vector> &xs) {
    CpRatio out;
    out.group_side = character_sum_norm(g, e, x, p, xs);
    out.rademacher_side =
        rademacher_average_exact([&](std::span<const double> v) { return x.gauge(v); }, xs, p);
    if (!(out.rademacher_side > 0.0))
        throw DegenerateError("cp_ratio: all vectors are zero");
    out.ratio = out.group_side / out.rademacher_side;
    return out;
}

struct RegularityEstimate {
    double group_over_rademacher = 0.0; // max of the ratio over searched tuples
    double rademacher_over_group = 0.0; // max of the reciprocal
    double constant = 0.0;              // the larger of the two
    std::optional<double> sidon;        // sidon_constant when exact mode applies
    double cotype2_lower = 0.0;         // N-vector cotype 2 lower bound of the space
    std::vector<Vector> witness;        // tuple attaining `constant`
};

/// Empirical C_p constant of E in X by search over vector tuples. Observational.
inline RegularityEstimate sidon_regularity_experiment(const FiniteAbelianGroup &g, const SpectralSet &e,
                                                      const QuasiNormedSpace &x, double p,
                                                      const SearchBudget &budget, RandomSource &rng) {
    if (e.size() > kMaxRegularitySet)
        throw DimensionError("sidon_regularity_experiment: at most 8 characters");
    auto safe = [&](const std::vector<Vector> &xs, bool invert) {
        try {
            const CpRatio c = cp_ratio(g, e, x, p, xs);
            if (invert)
                return c.group_side > 0.0 ? c.rademacher_side / c.group_side : 0.0;
            return c.ratio;
        } catch (const DegenerateError &) {
            return 0.0;
        }
    };
    const std::size_t n = e.size();
    const ConstantEstimate up =
        detail::maximize_tuple_ratio([&](const std::vector<Vector> &xs) { return safe(xs, false); }, n, x.dim(),
                                     budget, rng);
    const ConstantEstimate down =
        detail::maximize_tuple_ratio([&](const std::vector<Vector> &xs) { return safe(xs, true); }, n, x.dim(),
                                     budget, rng);
    RegularityEstimate out;
    out.group_over_rademacher = up.value;
    out.rademacher_over_group = down.value;
    out.constant = std::max(up.value, down.value);
    out.witness = up.value >= down.value ? up.witness : down.witness;
    if (g.is_cube())
        out.sidon = sidon_constant(g, e).value;
    out.cotype2_lower = cotype2_lower(OperatorSpec::identity(x), n, budget, rng).value;
    return out;
}

} // namespace qbl

#endif // QBL_SIDON_HPP
