#include <hausdorff/gaussian_derivatives.hpp>
#include <hausdorff/quadrature.hpp>
#include <hausdorff/test_function.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace hausdorff;

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

double numeric_l1(const TestFunction& f, double tol) {
    auto g = [&](std::span<const double> x) { return std::fabs(f(x)); };
    return integrate_space(g, f.dim(), tol).value;
}

// Random combination of shifted Gaussian-polynomial terms.
TestFunction random_function(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> c(-2, 2);
    std::uniform_real_distribution<double> s(-1, 1);
    std::vector<Monomial> terms;
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < count; ++i) {
        Monomial t;
        t.coef = c(rng);
        for (int l = 0; l < n; ++l) {
            t.shifts.push_back(s(rng));
            t.degrees.push_back(static_cast<int>(rng() % 3));
        }
        terms.push_back(t);
    }
    return TestFunction(n, terms, 0.5 + std::uniform_real_distribution<double>(0, 1.5)(rng));
}

}  // namespace

TEST(TestFunction, PresetValues) {
    EXPECT_EQ(preset_gauss(1)({0.0}), 1.0);
    EXPECT_NEAR(preset_gauss(2)({1.0, 1.0}), std::exp(-2.0), 1e-16);
    EXPECT_NEAR(preset_g1(1)({0.0}), -std::exp(-0.25), 1e-16);
    const auto g2 = preset_gm(2, 1);
    EXPECT_NEAR(g2({0.0}), std::exp(-0.75), 1e-12);
}

TEST(TestFunction, DerivativeExamples) {
    const auto d = differentiate(preset_gauss(1), {1});
    for (double x : {-2.0, -0.3, 0.0, 1.1}) EXPECT_NEAR(d({x}), -2 * x * std::exp(-x * x), 1e-15);
    const auto d2 = differentiate(preset_gauss(1), {2});
    for (double x : {-2.0, 0.0, 0.5}) EXPECT_NEAR(d2({x}), (4 * x * x - 2) * std::exp(-x * x), 1e-14);
    const auto mixed = differentiate(preset_gauss(2), {1, 1});
    EXPECT_NEAR(mixed({0.5, -1.0}), 4 * 0.5 * -1.0 * std::exp(-1.25), 1e-15);
}

TEST(TestFunction, DerivativesCommute) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 3;
        const auto f = random_function(rng, n);
        std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n)), ab(static_cast<std::size_t>(n));
        for (int l = 0; l < n; ++l) {
            a[static_cast<std::size_t>(l)] = static_cast<int>(rng() % 3);
            b[static_cast<std::size_t>(l)] = static_cast<int>(rng() % 3);
            ab[static_cast<std::size_t>(l)] = a[static_cast<std::size_t>(l)] + b[static_cast<std::size_t>(l)];
        }
        const auto lhs = differentiate(differentiate(f, a), b);
        const auto rhs = differentiate(differentiate(f, b), a);
        const auto direct = differentiate(f, ab);
        std::uniform_real_distribution<double> u(-2, 2);
        for (int p = 0; p < 10; ++p) {
            std::vector<double> x(static_cast<std::size_t>(n));
            for (double& v : x) v = u(rng);
            const double ref = direct(x);
            EXPECT_NEAR(lhs(x), ref, 1e-10 * std::max(1.0, std::fabs(ref)));
            EXPECT_NEAR(rhs(x), ref, 1e-10 * std::max(1.0, std::fabs(ref)));
        }
    }
}

TEST(TestFunction, DerivativeMatchesCentralDifference) {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 3;
        const auto f = random_function(rng, n);
        const int l = static_cast<int>(rng() % static_cast<unsigned>(n));
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(l)] = 1;
        const auto df = differentiate(f, e);
        std::vector<double> x(static_cast<std::size_t>(n));
        for (double& v : x) v = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
        const double h = 1e-5;
        auto xp = x, xm = x;
        xp[static_cast<std::size_t>(l)] += h;
        xm[static_cast<std::size_t>(l)] -= h;
        EXPECT_NEAR(df(x), (f(xp) - f(xm)) / (2 * h), 1e-7);
    }
}

TEST(TestFunction, CanonicalFormMergesTerms) {
    const auto g = preset_gauss(1);
    const auto twice = g + g;
    ASSERT_EQ(twice.terms().size(), 1u);
    EXPECT_EQ(twice.terms()[0].coef, 2.0);
    EXPECT_TRUE((g + g.scaled(-1.0)).is_zero());
    EXPECT_EQ(g + g, g.scaled(2.0));
}

TEST(TestFunction, L1ClosedForms) {
    EXPECT_NEAR(*l1_closed_form(preset_gauss(1)), kSqrtPi, 1e-15);
    EXPECT_NEAR(*l1_closed_form(preset_gauss(2)), std::numbers::pi, 1e-15);
    EXPECT_NEAR(*l1_closed_form(differentiate(preset_gauss(1), {1})), 2.0, 1e-15);
    EXPECT_NEAR(*l1_closed_form(dilate(preset_gauss(1), 2.0)), kSqrtPi / 2, 1e-15);
    EXPECT_FALSE(l1_closed_form(differentiate(preset_gauss(1), {2})).has_value());
}

TEST(TestFunction, L1ClosedFormAgreesWithQuadrature) {
    std::vector<TestFunction> fs{
        preset_gauss(1), preset_g1(1), preset_g1(2), preset_gm(3, 1),
        differentiate(preset_gauss(2), {1, 0}), differentiate(preset_gauss(2), {1, 1}),
        differentiate(preset_g1(1), {1}), dilate(differentiate(preset_g1(1), {1}), 1.7),
        dilate(preset_gauss(2), 0.6),
    };
    for (const auto& f : fs) {
        const auto exact = l1_closed_form(f);
        ASSERT_TRUE(exact.has_value()) << f.describe();
        EXPECT_NEAR(numeric_l1(f, 1e-11), *exact, 1e-8) << f.describe();
    }
}

TEST(TestFunction, WitnessAgreesWithSymbolicDerivative) {
    for (int n = 1; n <= 2; ++n) {
        for (int m = 1; m <= 4; ++m) {
            const WitnessFunction w(m, n);
            const auto gm = preset_gm(m, n);
            std::mt19937_64 rng(static_cast<std::uint64_t>(100 * n + m));
            std::uniform_real_distribution<double> u(-2, 3);
            for (const auto& gamma : multi_indices_up_to(n, m)) {
                bool fits = true;
                for (int g : gamma) fits = fits && g <= m;
                if (!fits) continue;
                const auto d = differentiate(gm, gamma);
                for (int p = 0; p < 20; ++p) {
                    std::vector<double> x(static_cast<std::size_t>(n));
                    for (double& v : x) v = u(rng);
                    const double want = w.derivative(gamma, x);
                    EXPECT_NEAR(d(x), want, 1e-12 * std::max(1.0, std::fabs(want)));
                }
            }
        }
    }
}

TEST(TestFunction, DilationScalesL1) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 2;
        const auto f = random_function(rng, n);
        const double lambda = 0.5 + 0.1 * trial;
        const double base = numeric_l1(f, 1e-10);
        const double dil = numeric_l1(dilate(f, lambda), 1e-10);
        EXPECT_NEAR(dil, base / std::pow(lambda, n), 1e-7 * std::max(1.0, base));
        // Chain rule through the scale.
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        e[0] = 1;
        std::vector<double> x(static_cast<std::size_t>(n), 0.3);
        std::vector<double> lx(static_cast<std::size_t>(n), 0.3 * lambda);
        EXPECT_NEAR(differentiate(dilate(f, lambda), e)(x), lambda * differentiate(f, e)(lx), 1e-12);
    }
}

TEST(TestFunction, Errors) {
    EXPECT_THROW((void)dilate(preset_gauss(1), 0.0), NonPositiveScale);
    EXPECT_THROW((void)dilate(preset_gauss(1), -1.0), NonPositiveScale);
    EXPECT_THROW((void)preset_gauss(2)({1.0}), Error);
    EXPECT_THROW((void)differentiate(preset_gauss(2), {1}), Error);
}

TEST(MultiIndices, Counts) {
    EXPECT_EQ(multi_indices_of_order(2, 2).size(), 3u);
    EXPECT_EQ(multi_indices_of_order(3, 2).size(), 6u);
    EXPECT_EQ(multi_indices_up_to(2, 2).size(), 6u);
    EXPECT_EQ(multi_indices_up_to(3, 3).size(), 20u);
    for (const auto& a : multi_indices_of_order(3, 4)) {
        int s = 0;
        for (int v : a) s += v;
        EXPECT_EQ(s, 4);
    }
}
