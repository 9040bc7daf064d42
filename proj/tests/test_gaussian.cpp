#include <hausdorff/gaussian_derivatives.hpp>

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace hausdorff;
using support::Big;

namespace {

std::vector<long long> as_ll(const HermiteFactor& f) {
    std::vector<long long> out;
    for (const auto& c : f.exact) out.push_back(c.convert_to<long long>());
    return out;
}

}  // namespace

TEST(HermiteFactor, FirstOrders) {
    const auto seq = hermite_factor_seq(3);
    ASSERT_EQ(seq.size(), 4u);
    EXPECT_EQ(as_ll(seq[0]), (std::vector<long long>{1}));
    EXPECT_EQ(as_ll(seq[1]), (std::vector<long long>{0, -2}));
    EXPECT_EQ(as_ll(seq[2]), (std::vector<long long>{-2, 0, 4}));
    EXPECT_EQ(as_ll(seq[3]), (std::vector<long long>{0, 12, 0, -8}));
}

TEST(HermiteFactor, LeadingSignLawUpToSixty) {
    const auto seq = hermite_factor_seq(kMaxHermiteOrder);
    for (int m = 0; m <= kMaxHermiteOrder; ++m) {
        const auto& f = seq[static_cast<std::size_t>(m)];
        EXPECT_EQ(f.degree(), m);
        EXPECT_NE(f.leading(), 0);
        const BigInt expected = (m % 2 == 0 ? BigInt(1) : BigInt(-1)) * (BigInt(1) << m);
        EXPECT_EQ(f.leading(), expected) << "m = " << m;
    }
}

TEST(HermiteFactor, OrderLimits) {
    EXPECT_THROW((void)hermite_factor_seq(61), OrderTooLarge);
    EXPECT_THROW((void)hermite_factor_seq(-1), OrderTooLarge);
    EXPECT_NO_THROW((void)hermite_factor(60));
}

TEST(HermiteFactor, MatchesMultiprecisionFiniteDifferences) {
    const auto seq = hermite_factor_seq(12);
    const Big h("1e-3");
    for (int m = 0; m <= 12; ++m) {
        for (double t : {-3.0, -1.0, 0.0, 0.7, 2.5}) {
            const double exact = seq[static_cast<std::size_t>(m)](t) * std::exp(-t * t);
            const double fd = support::fd_gauss_derivative(m, Big(t), h).convert_to<double>();
            const double scale = std::max(std::fabs(exact), 1e-6);
            EXPECT_LE(std::fabs(fd - exact) / scale, 1e-6) << "m=" << m << " t=" << t;
        }
    }
}

TEST(ShiftThreshold, KnownValues) {
    EXPECT_NEAR(shift_threshold(1), 0.5, 1e-12);
    EXPECT_NEAR(shift_threshold(2), std::sqrt(3.0) / 2.0, 1e-12);
    const double a3 = shift_threshold(3);
    EXPECT_GT(a3, 1.2);
    EXPECT_LT(a3, 1.3);
    // Independent Newton iteration on 8t^3 - 12t - 1.
    double t = 1.25;
    for (int i = 0; i < 50; ++i) t -= (8 * t * t * t - 12 * t - 1) / (24 * t * t - 12);
    EXPECT_NEAR(a3, t, 1e-12);
    EXPECT_THROW((void)shift_threshold(0), OrderMismatch);
}

TEST(ShiftThreshold, DefiningMaxProperty) {
    for (int m = 1; m <= 8; ++m) {
        const double a = shift_threshold(m);
        const auto seq = hermite_factor_seq(m);
        for (int s = 1; s <= 20000; ++s) {
            const double t = a + 1e-9 + 100.0 * s / 20000.0;
            for (int i = 1; i <= m; ++i) {
                const double v = (i % 2 == 0 ? 1.0 : -1.0) * seq[static_cast<std::size_t>(i)](t) - 1.0;
                ASSERT_GT(v, 0.0) << "m=" << m << " i=" << i << " t=" << t;
            }
        }
    }
}

TEST(WitnessFunction, FactorsAtLeastOneOnPositiveAxis) {
    for (int m = 1; m <= 6; ++m) {
        const WitnessFunction w(m, 1);
        for (int g = 0; g <= m; ++g) {
            for (int s = 1; s <= 5000; ++s) {
                const double t = 50.0 * s / 5000.0;
                const double v = (g % 2 == 0 ? 1.0 : -1.0) * w.factor(g)(t + w.shift());
                ASSERT_GE(v, 1.0 - 1e-12) << "m=" << m << " gamma=" << g << " t=" << t;
            }
        }
    }
}

TEST(WitnessFunction, Examples) {
    const WitnessFunction g1(1, 1);
    const std::vector<double> x0{0.0};
    const std::vector<int> d1{1};
    const std::vector<int> d0{0};
    EXPECT_NEAR(witness_derivative(g1, d1, x0), std::exp(-0.25), 1e-15);
    EXPECT_NEAR(witness_derivative(g1, d0, x0), -std::exp(-0.25), 1e-15);

    const WitnessFunction g2(2, 2);
    const std::vector<int> mixed{1, 1};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-6, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        EXPECT_GT(witness_derivative(g2, mixed, x), 0.0);
    }
    const std::vector<int> too_high{3, 0};
    const std::vector<double> x{1.0, 1.0};
    EXPECT_THROW((void)g2.derivative(too_high, x), OrderMismatch);
}

TEST(WitnessFunction, PositivityLowerBound) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int n = 1; n <= 3; ++n) {
        for (int m = 1; m <= 3; ++m) {
            const WitnessFunction w(m, n);
            for (int i = 0; i < 10000; ++i) {
                std::vector<double> x(static_cast<std::size_t>(n));
                for (double& c : x) c = u(rng);
                std::vector<int> gamma(static_cast<std::size_t>(n), 0);
                for (int r = 0; r < m; ++r) ++gamma[rng() % static_cast<unsigned>(n)];
                double floor = 1.0;
                for (double c : x) floor *= std::exp(-(c + w.shift()) * (c + w.shift()));
                const double v = w.derivative(gamma, x);
                ASSERT_GE(v, floor * (1.0 - 1e-12)) << "n=" << n << " m=" << m;
            }
        }
    }
}
