#pragma once

// H_{Phi,A} f(x) = int Phi(y) f(A(y) x) dy, the condition integral
// C_k = int |det A|^{-1} (1 + ||A||^k) Phi dy, the directional expansion of
// prod_j (sum_i a_ij d_i)^{alpha_j}, and the Lambda/Q conjugation.

#include <hausdorff/errors.hpp>
#include <hausdorff/kernel.hpp>
#include <hausdorff/matrix.hpp>
#include <hausdorff/matrix_family.hpp>
#include <hausdorff/quadrature.hpp>
#include <hausdorff/test_function.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hausdorff {

inline constexpr int kMaxExpansionOrder = 12;

inline int order_of(std::span<const int> alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

// Symbolic structure of prod_j (sum_i a_ij d_i)^{alpha_j} for a fixed alpha.
class ExpansionPlan {
public:
    ExpansionPlan(int n, std::span<const int> alpha) : n_(n), alpha_(alpha.begin(), alpha.end()) {
        if (static_cast<int>(alpha.size()) != n) throw Error("expansion: multi-index has wrong length");
        for (int a : alpha)
            if (a < 0) throw Error("expansion: negative multi-index component");
        m_ = order_of(alpha);
        if (m_ > kMaxExpansionOrder) {
            throw OrderTooLarge("expansion order " + std::to_string(m_) + " exceeds " + std::to_string(kMaxExpansionOrder));
        }
        levels_.reserve(static_cast<std::size_t>(m_) + 1);
        for (int d = 0; d <= m_; ++d) levels_.push_back(multi_indices_of_order(n, d));
        next_.resize(static_cast<std::size_t>(m_));
        for (int d = 0; d < m_; ++d) {
            std::map<std::vector<int>, int> index;
            const auto& up = levels_[static_cast<std::size_t>(d) + 1];
            for (std::size_t i = 0; i < up.size(); ++i) index.emplace(up[i], static_cast<int>(i));
            const auto& cur = levels_[static_cast<std::size_t>(d)];
            auto& tab = next_[static_cast<std::size_t>(d)];
            tab.resize(cur.size() * static_cast<std::size_t>(n));
            for (std::size_t b = 0; b < cur.size(); ++b) {
                for (int i = 0; i < n; ++i) {
                    auto beta = cur[b];
                    ++beta[static_cast<std::size_t>(i)];
                    tab[b * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = index.at(beta);
                }
            }
        }
    }

    int dim() const noexcept { return n_; }
    int order() const noexcept { return m_; }
    const std::vector<int>& alpha() const noexcept { return alpha_; }
    const std::vector<std::vector<int>>& betas() const { return levels_.back(); }

    // c_beta(A) aligned with betas().
    void coefficients(const Matrix& a, std::vector<double>& out) const {
        std::vector<double> cur{1.0};
        std::vector<double> nxt;
        int d = 0;
        for (int j = 0; j < n_; ++j) {
            for (int r = 0; r < alpha_[static_cast<std::size_t>(j)]; ++r, ++d) {
                const auto& tab = next_[static_cast<std::size_t>(d)];
                nxt.assign(levels_[static_cast<std::size_t>(d) + 1].size(), 0.0);
                for (std::size_t b = 0; b < cur.size(); ++b) {
                    if (cur[b] == 0.0) continue;
                    for (int i = 0; i < n_; ++i) {
                        const double aij = a(i, j);
                        if (aij != 0.0) nxt[static_cast<std::size_t>(tab[b * static_cast<std::size_t>(n_) + static_cast<std::size_t>(i)])] += cur[b] * aij;
                    }
                }
                cur.swap(nxt);
            }
        }
        out = std::move(cur);
    }

private:
    int n_;
    int m_ = 0;
    std::vector<int> alpha_;
    std::vector<std::vector<std::vector<int>>> levels_;
    std::vector<std::vector<int>> next_;
};

// beta -> c_beta with |beta| = |alpha|; exact zeros are omitted.
inline std::map<std::vector<int>, double> directional_expansion(const Matrix& a, std::span<const int> alpha) {
    const ExpansionPlan plan(a.dim(), alpha);
    std::vector<double> c;
    plan.coefficients(a, c);
    std::map<std::vector<int>, double> out;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) out.emplace(plan.betas()[i], c[i]);
    return out;
}

inline std::map<std::vector<int>, double> directional_expansion(const Matrix& a, std::initializer_list<int> alpha) {
    return directional_expansion(a, std::span<const int>(alpha.begin(), alpha.size()));
}

// D^beta f for every |beta| = |alpha|, paired with the expansion plan.
struct DerivativeTable {
    ExpansionPlan plan;
    std::vector<TestFunction> dbeta;

    DerivativeTable(const TestFunction& f, std::span<const int> alpha) : plan(f.dim(), alpha) {
        dbeta.reserve(plan.betas().size());
        for (const auto& b : plan.betas()) dbeta.push_back(differentiate(f, b));
    }

    // sum_beta c_beta (D^beta f)(z)
    double combine(const std::vector<double>& c, std::span<const double> z) const {
        double acc = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i)
            if (c[i] != 0.0) acc += c[i] * dbeta[i](z);
        return acc;
    }
};

struct ConditionReport {
    int k = 0;
    QuadratureResult quad;                  // C_k
    std::vector<QuadratureResult> breakdown;  // int |det A|^{-1} ||A||^j Phi, j = 0..k

    bool converged() const noexcept { return quad.status == Status::Converged; }
};

class HausdorffOperator {
public:
    HausdorffOperator(KernelSpec kernel, MatrixFamily family)
        : kernel_(std::move(kernel)), family_(std::move(family)), memo_(std::make_shared<Memo>()) {
        if (kernel_.n != family_.dim()) {
            throw Error("kernel dimension " + std::to_string(kernel_.n) + " does not match matrix dimension " +
                        std::to_string(family_.dim()));
        }
    }

    const KernelSpec& kernel() const noexcept { return kernel_; }
    const MatrixFamily& family() const noexcept { return family_; }
    int dim() const noexcept { return kernel_.n; }

    // y -> Phi(y) f(A(y) x) depends on |y| only.
    bool radial_integrand() const { return kernel_.is_radial() && family_.is_radial(); }

    // H f(x) for any callable f(span<const double>) -> double.
    template <class F>
    QuadratureResult apply(const F& f, std::span<const double> x, double tol) const {
        check_point(x);
        const int n = dim();
        if (family_.is_constant()) {
            const Matrix a = constant_value();
            const auto z = a * x;
            const double fz = f(std::span<const double>(z));
            return scale_mass(fz, tol);
        }
        Matrix a(n);
        std::vector<double> z(static_cast<std::size_t>(n));
        auto g = [&](std::span<const double> y) {
            const double phi = kernel_.expr.eval(y);
            if (phi == 0.0) return 0.0;
            family_.evaluate_into(y, a);
            a.apply(x, z);
            return phi * f(std::span<const double>(z));
        };
        return integrate_support(g, tol);
    }

    // D^alpha H f(x) = int Phi(y) sum_beta c_beta(A(y)) (D^beta f)(A(y) x) dy.
    QuadratureResult derivative(const DerivativeTable& table, std::span<const double> x, double tol) const {
        check_point(x);
        const int n = dim();
        if (table.plan.dim() != n) throw Error("derivative table dimension mismatch");
        if (family_.is_constant()) {
            const Matrix a = constant_value();
            const auto& c = constant_coefficients(table.plan);
            const auto z = a * x;
            return scale_mass(table.combine(c, z), tol);
        }
        Matrix a(n);
        std::vector<double> z(static_cast<std::size_t>(n));
        std::vector<double> c;
        auto g = [&](std::span<const double> y) {
            const double phi = kernel_.expr.eval(y);
            if (phi == 0.0) return 0.0;
            family_.evaluate_into(y, a);
            a.apply(x, z);
            table.plan.coefficients(a, c);
            return phi * table.combine(c, z);
        };
        return integrate_support(g, tol);
    }

    // int Phi(y) h(y, A(y)) dy over supp Phi.
    template <class H>
    QuadratureResult integrate_against(const H& h, double tol) const {
        Matrix a(dim());
        auto g = [&](std::span<const double> y) {
            const double phi = kernel_.expr.eval(y);
            if (phi == 0.0) return 0.0;
            family_.evaluate_into(y, a);
            return phi * h(y, static_cast<const Matrix&>(a));
        };
        return integrate_support(g, tol);
    }

    // C_k with the per-order breakdown, classified by the improper probe.
    ConditionReport condition(int k, double tol = 1e-10, const ProbeSchedule& schedule = ProbeSchedule::geometric()) const {
        if (k < 0) throw Error("condition order must be non-negative");
        if (!kernel_.nonneg) throw NegativeKernel("condition integral needs a kernel asserted nonnegative");
        kernel_.check_nonneg(kernel_.sample_support(1000));
        ConditionReport rep;
        rep.k = k;
        rep.quad = probe_weight([k](double fro) { return 1.0 + std::pow(fro, k); }, schedule, tol);
        for (int j = 0; j <= k; ++j) {
            rep.breakdown.push_back(probe_weight([j](double fro) { return std::pow(fro, j); }, schedule, tol));
        }
        return rep;
    }

    // int Phi over supp Phi.
    QuadratureResult mass(double tol) const {
        std::lock_guard lock(memo_->mu);
        if (!memo_->mass || memo_->mass_tol > tol) {
            auto g = [&](std::span<const double> y) { return kernel_.expr.eval(y); };
            memo_->mass = integrate_support(g, tol);
            memo_->mass_tol = tol;
        }
        return *memo_->mass;
    }

private:
    struct Memo {
        std::mutex mu;
        std::optional<QuadratureResult> mass;
        double mass_tol = 0.0;
        std::map<std::vector<int>, std::vector<double>> coefficients;
    };

    void check_point(std::span<const double> x) const {
        if (static_cast<int>(x.size()) != dim()) throw Error("evaluation point has wrong dimension");
    }

    Matrix constant_value() const {
        const std::vector<double> y(static_cast<std::size_t>(dim()), 1.0);
        return family_(y);
    }

    const std::vector<double>& constant_coefficients(const ExpansionPlan& plan) const {
        std::lock_guard lock(memo_->mu);
        auto it = memo_->coefficients.find(plan.alpha());
        if (it == memo_->coefficients.end()) {
            std::vector<double> c;
            plan.coefficients(constant_value(), c);
            it = memo_->coefficients.emplace(plan.alpha(), std::move(c)).first;
        }
        return it->second;
    }

    QuadratureResult scale_mass(double factor, double tol) const {
        // Tight enough that the scaled error stays below tol for |factor| <= 1e3.
        QuadratureResult r = mass(std::min(tol, 1e-12));
        r.value *= factor;
        r.err_est *= std::fabs(factor);
        return r;
    }

    template <class G>
    QuadratureResult integrate_support(G& g, double tol) const {
        const PolarIntegrator polar(kernel_, radial_integrand(), tol * 1e-2);
        QuadOptions opt;
        opt.abs_tol = tol;
        auto res = polar.integrate(g, opt);
        return res;
    }

    template <class W>
    QuadratureResult probe_weight(W weight, const ProbeSchedule& schedule, double tol) const {
        const int n = dim();
        Matrix a(n);
        auto g = [&](std::span<const double> y) {
            const double phi = kernel_.expr.eval(y);
            if (phi == 0.0) return 0.0;
            family_.evaluate_into(y, a);
            const double det = std::fabs(determinant(a));
            if (det == 0.0) throw SingularMatrix("A(y) is singular inside supp Phi");
            return phi * weight(frobenius_norm(a)) / det;
        };
        const PolarIntegrator polar(kernel_, radial_integrand(), tol * 1e-2);
        try {
            return polar.probe(g, schedule, tol);
        } catch (const NegativeValueDetected& e) {
            throw NegativeKernel(e.what());
        }
    }

    KernelSpec kernel_;
    MatrixFamily family_;
    std::shared_ptr<Memo> memo_;
};

template <class F>
QuadratureResult apply_point(const KernelSpec& kernel, const MatrixFamily& family, const F& f,
                             std::span<const double> x, double tol) {
    return HausdorffOperator(kernel, family).apply(f, x, tol);
}

inline ConditionReport condition_value(const KernelSpec& kernel, const MatrixFamily& family, int k, double tol = 1e-10,
                                       const ProbeSchedule& schedule = ProbeSchedule::geometric()) {
    return HausdorffOperator(kernel, family).condition(k, tol, schedule);
}

inline void require_condition(const ConditionReport& cond, int order) {
    if (!cond.converged()) {
        throw PreconditionUnmet("condition integral C_" + std::to_string(cond.k) + " is " + to_string(cond.quad.status));
    }
    if (cond.k < order) {
        throw PreconditionUnmet("condition report has order " + std::to_string(cond.k) + " < " + std::to_string(order));
    }
}

inline QuadratureResult derivative_formula_point(const HausdorffOperator& op, const TestFunction& f,
                                                 std::span<const int> alpha, std::span<const double> x, double tol,
                                                 const ConditionReport& cond) {
    require_condition(cond, order_of(alpha));
    return op.derivative(DerivativeTable(f, alpha), x, tol);
}

// grad H f(x) = int Phi(y) (grad f)(A(y) x)^T A(y) dy, one entry per component.
inline std::vector<QuadratureResult> gradient_point(const HausdorffOperator& op, const TestFunction& f,
                                                    std::span<const double> x, double tol,
                                                    const ConditionReport& cond) {
    require_condition(cond, 1);
    const int n = op.dim();
    std::vector<TestFunction> grad;
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = 1;
        grad.push_back(differentiate(f, e));
    }
    std::vector<double> z(static_cast<std::size_t>(n));
    std::vector<QuadratureResult> out;
    for (int j = 0; j < n; ++j) {
        auto comp = [&](std::span<const double>, const Matrix& a) {
            a.apply(x, z);
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += grad[static_cast<std::size_t>(i)](z) * a(i, j);
            return s;
        };
        out.push_back(op.integrate_against(comp, tol));
    }
    return out;
}

// Hess H f(x) = int Phi(y) A(y)^T (Hess f)(A(y) x) A(y) dy, row-major.
inline std::vector<QuadratureResult> hessian_point(const HausdorffOperator& op, const TestFunction& f,
                                                   std::span<const double> x, double tol,
                                                   const ConditionReport& cond) {
    require_condition(cond, 2);
    const int n = op.dim();
    std::vector<TestFunction> hess;
    for (int i = 0; i < n; ++i) {
        for (int l = 0; l < n; ++l) {
            std::vector<int> e(static_cast<std::size_t>(n), 0);
            ++e[static_cast<std::size_t>(i)];
            ++e[static_cast<std::size_t>(l)];
            hess.push_back(differentiate(f, e));
        }
    }
    std::vector<double> z(static_cast<std::size_t>(n));
    std::vector<QuadratureResult> out;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            auto comp = [&](std::span<const double>, const Matrix& a) {
                a.apply(x, z);
                double s = 0.0;
                for (int i = 0; i < n; ++i)
                    for (int l = 0; l < n; ++l)
                        s += a(i, p) * hess[static_cast<std::size_t>(i * n + l)](z) * a(l, q);
                return s;
            };
            out.push_back(op.integrate_against(comp, tol));
        }
    }
    return out;
}

// x -> f(M x)
struct LinearPullback {
    TestFunction f;
    Matrix m;

    double operator()(std::span<const double> x) const {
        const auto z = m * x;
        return f(std::span<const double>(z));
    }
};

struct Conjugation {
    LinearPullback F;        // F(x) = f(Lambda^{-1} x)
    Matrix q_inverse;        // transform x -> Q^{-1} x
    MatrixFamily conjugated;  // Lambda P Q

    std::vector<double> transform(std::span<const double> x) const { return q_inverse * x; }
};

// H_{Phi,P} f(x) = H_{Phi,Lambda P Q} F(Q^{-1} x).
inline Conjugation reduce_conjugate(const Matrix& lambda, const MatrixFamily& p, const Matrix& q, const TestFunction& f) {
    LU llu(lambda);
    if (llu.singular()) throw SingularConstantPart("Lambda is singular");
    LU qlu(q);
    if (qlu.singular()) throw SingularConstantPart("Q is singular");
    if (lambda.dim() != p.dim() || q.dim() != p.dim() || f.dim() != p.dim()) {
        throw Error("reduce_conjugate: dimension mismatch");
    }
    return Conjugation{LinearPullback{f, llu.inverse()}, qlu.inverse(), MatrixFamily::decomposed(lambda, p, q)};
}

}  // namespace hausdorff
