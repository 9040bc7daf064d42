#include <hausdorff/classical.hpp>
#include <hausdorff/hausdorff.hpp>
#include <hausdorff/kernel.hpp>
#include <hausdorff/test_function.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <vector>

using namespace hausdorff;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double at(const QuadratureResult& r) {
    EXPECT_TRUE(r.converged()) << r.note;
    return r.value;
}

std::vector<double> pt(std::initializer_list<double> v) { return v; }

// Brute-force expansion: sum over every choice of row index per factor.
std::map<std::vector<int>, double> brute_expansion(const Matrix& a, const std::vector<int>& alpha) {
    const int n = a.dim();
    std::vector<int> cols;
    for (int j = 0; j < n; ++j)
        for (int r = 0; r < alpha[static_cast<std::size_t>(j)]; ++r) cols.push_back(j);
    const int m = static_cast<int>(cols.size());
    std::map<std::vector<int>, double> out;
    long total = 1;
    for (int i = 0; i < m; ++i) total *= n;
    for (long code = 0; code < total; ++code) {
        long c = code;
        std::vector<int> beta(static_cast<std::size_t>(n), 0);
        double coef = 1.0;
        for (int f = 0; f < m; ++f) {
            const int row = static_cast<int>(c % n);
            c /= n;
            ++beta[static_cast<std::size_t>(row)];
            coef *= a(row, cols[static_cast<std::size_t>(f)]);
        }
        out[beta] += coef;
    }
    return out;
}

HausdorffOperator chi12_inverse() {
    return HausdorffOperator(make_kernel("chi(1,2)(y1)", "halfline(1,2)", 1), MatrixFamily::diagonal_inverse_norm(1));
}

}  // namespace

TEST(ApplyPoint, MassOneKernelWithIdentityIsIdentity) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int n = 1; n <= 2; ++n) {
        char vol[40];
        std::snprintf(vol, sizeof vol, "%.17g", unit_ball_volume(n));
        const std::string expr = "chi(0,1)(nrm(y))/" + std::string(vol);
        const auto k = make_kernel(expr, "annulus(0,1)", n);
        const HausdorffOperator op(k, MatrixFamily::constant(Matrix::identity(n)));
        const auto f = gauss_product(n, 0.3, 2.0) + differentiate(preset_g1(n), std::vector<int>(static_cast<std::size_t>(n), 1));
        for (int i = 0; i < 10; ++i) {
            std::vector<double> x(static_cast<std::size_t>(n));
            for (double& c : x) c = u(rng);
            EXPECT_NEAR(at(op.apply(f, x, 1e-10)), f(x), 1e-9);
        }
    }
}

TEST(ApplyPoint, HardyKernelWithInverseNorm) {
    const auto op = classical_operator(Classical::Hardy);
    const double oracle = std::sqrt(std::numbers::pi) / 2 * std::erf(1.0);
    EXPECT_NEAR(oracle, 0.7468241, 1e-7);
    EXPECT_NEAR(at(op.apply(preset_gauss(1), pt({1.0}), 1e-10)), oracle, 1e-9);
}

TEST(ApplyPoint, UnitSupportAtOrigin) {
    EXPECT_NEAR(at(chi12_inverse().apply(preset_gauss(1), pt({0.0}), 1e-10)), 1.0, 1e-10);
}

TEST(ApplyPoint, Linearity) {
    std::mt19937_64 rng(2);
    const double tol = 1e-9;
    const HausdorffOperator op1(make_kernel("exp(-nrm(y)^2)", "all", 1),
                                MatrixFamily::expression_entries(1, std::vector<std::string>{"1+y1^2"}));
    const HausdorffOperator op2(make_kernel("exp(-nrm(y)^2)", "annulus(0.5,2)", 2),
                                MatrixFamily::expression_entries(2, std::vector<std::string>{"1+y1^2", "0.3", "y2", "2"}));
    const auto f1 = gauss_product(1, 0.2, 1.0);
    const auto g1 = differentiate(gauss_product(1, -0.4, 3.0), {2});
    const auto f2 = gauss_product(2, 0.2, 1.0);
    const auto g2 = differentiate(gauss_product(2, -0.4, 3.0), {1, 0});
    for (double x : {-1.0, 0.0, 0.4, 2.0}) {
        const auto xs = pt({x});
        EXPECT_NEAR(at(op1.apply(f1 + g1, xs, tol)), at(op1.apply(f1, xs, tol)) + at(op1.apply(g1, xs, tol)), 2 * tol);
        const auto x2 = pt({x, 0.5 - x});
        EXPECT_NEAR(at(op2.apply(f2 + g2, x2, tol)), at(op2.apply(f2, x2, tol)) + at(op2.apply(g2, x2, tol)), 2 * tol);
    }
}

TEST(ApplyPoint, PositiveKernelAndFunctionGiveNonnegativeValues) {
    const double tol = 1e-9;
    const std::vector<HausdorffOperator> ops{
        classical_operator(Classical::Hardy),
        classical_operator(Classical::AdjointHardy),
        HausdorffOperator(make_kernel("abs(y1)*exp(-nrm(y)^2)", "all", 1),
                          MatrixFamily::expression_entries(1, std::vector<std::string>{"2+y1"})),
    };
    const auto f = gauss_product(1, 1.5, 1.0);
    for (const auto& op : ops) {
        for (double x = 0.1; x < 8; x *= 1.7) EXPECT_GE(at(op.apply(f, pt({x}), tol)), -tol);
    }
}

TEST(ConditionValue, Examples) {
    const auto adj = classical_operator(Classical::AdjointHardy).condition(0);
    EXPECT_EQ(adj.quad.status, Status::Converged);
    EXPECT_NEAR(adj.quad.value, 2.0, 1e-8);
    ASSERT_EQ(adj.breakdown.size(), 1u);
    EXPECT_NEAR(adj.breakdown[0].value, 1.0, 1e-8);

    for (int k = 0; k <= 2; ++k) {
        const auto h = classical_operator(Classical::Hardy).condition(k);
        EXPECT_EQ(h.quad.status, Status::Divergent) << k;
        EXPECT_EQ(h.quad.evidence.growth, Growth::Log) << k;
    }

    const HausdorffOperator chi(make_kernel("chi(1,2)(nrm(y))", "annulus(1,2)", 1), MatrixFamily::diagonal_inverse_norm(1));
    const auto c = chi.condition(1);
    EXPECT_EQ(c.quad.status, Status::Converged);
    EXPECT_NEAR(c.quad.value, 5.0, 1e-8);
    EXPECT_GE(c.quad.value, c.breakdown[0].value);
}

TEST(ConditionValue, NegativeKernelIsRejected) {
    const auto mf = MatrixFamily::diagonal_inverse_norm(1);
    const HausdorffOperator unasserted(make_kernel("1", "annulus(1,2)", 1, false), mf);
    EXPECT_THROW((void)unasserted.condition(0), NegativeKernel);
    const HausdorffOperator negative(make_kernel("y1", "annulus(1,2)", 1), mf);
    EXPECT_THROW((void)negative.condition(0), NegativeKernel);
    const auto k = make_kernel("y1", "annulus(1,2)", 1);
    EXPECT_THROW((void)k.check_nonneg(k.sample_support(1000)), NegativeKernel);
    const auto ok = make_kernel("exp(-nrm(y)^2)", "all", 2);
    EXPECT_GE(ok.check_nonneg(ok.sample_support(1000)), 0.0);
}

TEST(ConditionValue, DiagonalConsistencyWithDirectProbe) {
    struct Case {
        const char* expr;
        const char* support;
        int n;
        int k;
    };
    const Case cases[] = {
        {"chi(0,1)(y1)/y1", "halfline(0,1)", 1, 0},   {"chi(0,1)(y1)/y1", "halfline(0,1)", 1, 1},
        {"chi(0,1)(y1)/y1", "halfline(0,1)", 1, 2},   {"chi(1,inf)(y1)/y1^2", "halfline(1,inf)", 1, 0},
        {"chi(1,inf)(y1)/y1^2", "halfline(1,inf)", 1, 2}, {"1", "annulus(1,2)", 1, 3},
        {"exp(-nrm(y)^2)", "all", 1, 0},              {"exp(-nrm(y)^2)", "all", 1, 1},
        {"exp(-nrm(y)^2)", "all", 1, 2},              {"y1^(-0.5)", "halfline(0,1)", 1, 1},
        {"y1^(-0.5)", "halfline(0,1)", 1, 2},         {"exp(-nrm(y)^2)", "all", 2, 2},
        {"exp(-nrm(y)^2)", "all", 2, 3},              {"exp(-nrm(y)^2)", "all", 2, 4},
        {"nrm(y)^(-3)", "annulus(1,inf)", 2, 0},      {"nrm(y)^(-5)", "annulus(1,inf)", 2, 0},
    };
    for (const auto& c : cases) {
        const auto kernel = make_kernel(c.expr, c.support, c.n);
        const auto rep = HausdorffOperator(kernel, MatrixFamily::diagonal_inverse_norm(c.n)).condition(c.k);
        // int |y|^n (1 + |y|^-k) Phi(y) dy in polar form.
        auto direct = [&](double r) {
            std::vector<double> y(static_cast<std::size_t>(c.n), 0.0);
            double v = 0.0;
            for (double s : {1.0, -1.0}) {
                y[0] = s * r;
                v += kernel(y);
                if (c.n > 1) break;
            }
            const double shell = c.n == 1 ? 1.0 : 2 * std::numbers::pi * r;
            return shell * std::pow(r, c.n) * (1 + std::pow(r, -c.k)) * v;
        };
        const auto ref = improper_probe(direct, 0.0, kInf, 1e-10);
        EXPECT_EQ(rep.quad.status, ref.status) << c.expr << " k=" << c.k;
        EXPECT_NE(ref.status, Status::Inconclusive) << c.expr << " k=" << c.k;
    }
}

TEST(DirectionalExpansion, Examples) {
    const double a = 1.5, b = -2.0, c = 0.25, d = 3.0;
    const Matrix m{{a, b}, {c, d}};
    const auto e1 = directional_expansion(m, {1, 0});
    EXPECT_EQ(e1, (std::map<std::vector<int>, double>{{{1, 0}, a}, {{0, 1}, c}}));
    const auto e2 = directional_expansion(m, {1, 1});
    ASSERT_EQ(e2.size(), 3u);
    EXPECT_DOUBLE_EQ(e2.at({2, 0}), a * b);
    EXPECT_DOUBLE_EQ(e2.at({1, 1}), a * d + b * c);
    EXPECT_DOUBLE_EQ(e2.at({0, 2}), c * d);
    for (const auto& alpha : multi_indices_up_to(3, 4)) {
        const auto e = directional_expansion(Matrix::identity(3), alpha);
        ASSERT_EQ(e.size(), 1u);
        EXPECT_EQ(e.begin()->first, alpha);
        EXPECT_EQ(e.begin()->second, 1.0);
    }
    const std::vector<int> big{7, 6};
    EXPECT_THROW((void)directional_expansion(m, big), OrderTooLarge);
}

TEST(DirectionalExpansion, ChecksumAndBruteForce) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + trial % 3;
        Matrix a(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = u(rng);
        const int order = static_cast<int>(rng() % 6);
        const auto all = multi_indices_of_order(n, order);
        const auto& alpha = all[rng() % all.size()];
        const auto e = directional_expansion(a, alpha);
        double sum = 0.0;
        double mag = 0.0;
        for (const auto& [beta, c] : e) {
            sum += c;
            mag += std::fabs(c);
        }
        double want = 1.0;
        for (int j = 0; j < n; ++j) {
            double col = 0.0;
            for (int i = 0; i < n; ++i) col += a(i, j);
            want *= std::pow(col, alpha[static_cast<std::size_t>(j)]);
        }
        EXPECT_NEAR(sum, want, 1e-12 * std::max({1.0, std::fabs(want), mag}));
        if (trial % 10 == 0) {
            const auto brute = brute_expansion(a, alpha);
            for (const auto& [beta, c] : brute) {
                const auto it = e.find(beta);
                const double got = it == e.end() ? 0.0 : it->second;
                EXPECT_NEAR(got, c, 1e-12 * std::max(1.0, mag));
            }
        }
    }
}

TEST(DerivativeFormula, ZeroOrderMatchesApply) {
    const auto op = chi12_inverse();
    const auto cond = op.condition(2);
    const auto f = gauss_product(1, 0.3, 1.0);
    const std::vector<int> zero{0};
    for (double x : {-2.0, 0.0, 0.7, 3.0}) {
        const auto xs = pt({x});
        EXPECT_NEAR(at(derivative_formula_point(op, f, zero, xs, 1e-11, cond)), at(op.apply(f, xs, 1e-11)), 1e-10);
    }
}

TEST(DerivativeFormula, FirstOrderExamples) {
    const auto op = chi12_inverse();
    const auto cond = op.condition(1);
    ASSERT_TRUE(cond.converged());
    const std::vector<int> one{1};
    EXPECT_NEAR(at(derivative_formula_point(op, preset_gauss(1), one, pt({0.0}), 1e-10, cond)), 0.0, 1e-12);
    const auto oracle = integrate_line([](double t) { return (1 / t) * (-2 / t) * std::exp(-1 / (t * t)); }, 1.0, 2.0, 1e-13);
    EXPECT_NEAR(at(derivative_formula_point(op, preset_gauss(1), one, pt({1.0}), 1e-10, cond)), oracle.value, 1e-8);
}

TEST(DerivativeFormula, RefusesWithoutCondition) {
    const auto op = classical_operator(Classical::Hardy);
    const auto cond = op.condition(1);
    const std::vector<int> one{1};
    EXPECT_THROW((void)derivative_formula_point(op, preset_gauss(1), one, pt({1.0}), 1e-8, cond), PreconditionUnmet);
    const auto ok = chi12_inverse();
    const auto c0 = ok.condition(0);
    EXPECT_THROW((void)derivative_formula_point(ok, preset_gauss(1), one, pt({1.0}), 1e-8, c0), PreconditionUnmet);
}

TEST(DerivativeFormula, MatchesIndependentQuadratureOfChainRule) {
    // 1-D, A(t) = 1 + t^2 on Phi = exp(-t^2): D^2 H f(x) = int Phi a^2 f''(a x).
    const HausdorffOperator op(make_kernel("exp(-nrm(y)^2)", "all", 1),
                               MatrixFamily::expression_entries(1, std::vector<std::string>{"1+y1^2"}));
    const auto cond = op.condition(2);
    ASSERT_TRUE(cond.converged());
    const std::vector<int> two{2};
    for (double x : {-0.5, 0.3, 1.2}) {
        auto integrand = [x](double t) {
            const double a = 1 + t * t;
            const double z = a * x;
            return std::exp(-t * t) * a * a * (4 * z * z - 2) * std::exp(-z * z);
        };
        const double oracle = integrate_line(integrand, -kInf, kInf, 1e-13).value;
        EXPECT_NEAR(at(derivative_formula_point(op, preset_gauss(1), two, pt({x}), 1e-10, cond)), oracle, 1e-8);
    }
}

TEST(DerivativeFormula, GradientAndHessianAgreeWithExpansion) {
    const HausdorffOperator op(make_kernel("exp(-nrm(y)^2)", "annulus(0.5,2)", 2),
                               MatrixFamily::expression_entries(2, std::vector<std::string>{"1+y1^2", "0.3", "y2", "2"}));
    const auto cond = op.condition(2, 1e-8);
    ASSERT_TRUE(cond.converged());
    const auto f = gauss_product(2, std::vector<double>{0.2, -0.1}, 1.0);
    const auto x = pt({0.4, -0.3});
    const double tol = 1e-8;
    const auto grad = gradient_point(op, f, x, tol, cond);
    for (int j = 0; j < 2; ++j) {
        std::vector<int> e{0, 0};
        e[static_cast<std::size_t>(j)] = 1;
        EXPECT_NEAR(at(grad[static_cast<std::size_t>(j)]), at(derivative_formula_point(op, f, e, x, tol, cond)), 4 * tol);
    }
    const auto hess = hessian_point(op, f, x, tol, cond);
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            std::vector<int> e{0, 0};
            ++e[static_cast<std::size_t>(p)];
            ++e[static_cast<std::size_t>(q)];
            EXPECT_NEAR(at(hess[static_cast<std::size_t>(p * 2 + q)]), at(derivative_formula_point(op, f, e, x, tol, cond)),
                        4 * tol);
        }
    }
    EXPECT_NEAR(hess[1].value, hess[2].value, 4 * tol);
}

TEST(Conjugation, IdentityPartsAreTrivial) {
    const auto f = gauss_product(2, 0.4, 1.0);
    const auto c = reduce_conjugate(Matrix::identity(2), MatrixFamily::diagonal_inverse_norm(2), Matrix::identity(2), f);
    const auto x = pt({0.3, -1.2});
    EXPECT_EQ(c.transform(x), x);
    EXPECT_EQ(c.F(x), f(x));
    EXPECT_THROW((void)reduce_conjugate(Matrix(2), MatrixFamily::diagonal_inverse_norm(2), Matrix::identity(2), f),
                 SingularConstantPart);
}

TEST(Conjugation, OneDimensionalIdentity) {
    const auto kernel = make_kernel("chi(1,2)(nrm(y))", "annulus(1,2)", 1);
    const auto p = MatrixFamily::diagonal_inverse_norm(1);
    const auto f = preset_gauss(1);
    const auto c = reduce_conjugate(Matrix{{2.0}}, p, Matrix{{3.0}}, f);
    const HausdorffOperator lhs(kernel, p);
    const HausdorffOperator rhs(kernel, c.conjugated);
    const auto x = pt({1.0});
    const auto tx = c.transform(x);
    EXPECT_NEAR(at(lhs.apply(f, x, 1e-10)), at(rhs.apply(c.F, tx, 1e-10)), 1e-8);
}

TEST(Conjugation, TwoDimensionalRandomSuite) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const auto kernel = make_kernel("exp(-nrm(y)^2)", "all", 2);
    const auto p = MatrixFamily::diagonal_inverse_norm(2);
    const auto f = gauss_product(2, std::vector<double>{0.3, -0.2}, 1.0);
    const HausdorffOperator lhs(kernel, p);
    for (int i = 0; i < 10; ++i) {
        const Matrix lam{{1 + u(rng), u(rng)}, {u(rng), 1 + u(rng)}};
        const Matrix q{{1.5 + u(rng), u(rng)}, {u(rng), 0.8 + u(rng)}};
        const auto c = reduce_conjugate(lam, p, q, f);
        const HausdorffOperator rhs(kernel, c.conjugated);
        const auto x = pt({2 * u(rng), 2 * u(rng)});
        EXPECT_NEAR(at(lhs.apply(f, x, 1e-8)), at(rhs.apply(c.F, c.transform(x), 1e-8)), 1e-6) << "case " << i;
    }
}
