#pragma once

// W^{k,1} norms, finite-difference derivative oracles, the interchange check,
// the boundedness certificate and the truncation blow-up witness.

#include <hausdorff/errors.hpp>
#include <hausdorff/hausdorff.hpp>
#include <hausdorff/kernel.hpp>
#include <hausdorff/matrix_family.hpp>
#include <hausdorff/quadrature.hpp>
#include <hausdorff/test_function.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace hausdorff {

struct SobolevNorm {
    int k = 0;
    std::vector<std::vector<int>> alphas;
    std::vector<QuadratureResult> parts;  // ||D^alpha f||_1, aligned with alphas
    double total = 0.0;
    Status status = Status::Converged;

    double l1() const { return parts.empty() ? 0.0 : parts.front().value; }
};

namespace detail {

template <class PartFn>
SobolevNorm sum_over_alphas(int n, int k, PartFn part) {
    if (k < 0) throw Error("Sobolev order must be non-negative");
    SobolevNorm s;
    s.k = k;
    s.alphas = multi_indices_up_to(n, k);
    for (const auto& a : s.alphas) {
        auto r = part(a);
        s.total += r.value;
        s.status = combine(s.status, r.status);
        s.parts.push_back(std::move(r));
    }
    return s;
}

}  // namespace detail

inline SobolevNorm wk1_norm(const TestFunction& f, int k, double tol) {
    const int n = f.dim();
    return detail::sum_over_alphas(n, k, [&](const std::vector<int>& a) {
        const TestFunction g = differentiate(f, a);
        if (g.is_zero()) return QuadratureResult{};
        return integrate_space([&](std::span<const double> x) { return std::fabs(g(x)); }, n, tol);
    });
}

// Per-alpha L1 norms of D^alpha H f, each point evaluated by the derivative
// formula; `inner_tol` defaults to tol * 1e-3.
inline SobolevNorm wk1_norm_operator_image(const HausdorffOperator& op, const TestFunction& f, int k, double tol,
                                           const ConditionReport& cond, double inner_tol = 0.0) {
    require_condition(cond, k);
    const int n = op.dim();
    if (inner_tol <= 0.0) inner_tol = tol * 1e-3;
    return detail::sum_over_alphas(n, k, [&](const std::vector<int>& a) {
        const DerivativeTable table(f, a);
        Status inner = Status::Converged;
        auto g = [&](std::span<const double> x) {
            const auto r = op.derivative(table, x, inner_tol);
            inner = combine(inner, r.status);
            return std::fabs(r.value);
        };
        auto r = integrate_space(g, n, tol);
        if (inner != Status::Converged) {
            r.status = combine(r.status, Status::Inconclusive);
            r.note = "a pointwise derivative integral did not converge";
        }
        return r;
    });
}

// Uniform grid, row-major with the last axis fastest.
struct Grid {
    std::vector<int> shape;
    std::vector<double> lower;
    double h = 0.0;
    std::vector<double> values;

    int dim() const noexcept { return static_cast<int>(shape.size()); }

    std::size_t size() const {
        std::size_t s = 1;
        for (int m : shape) s *= static_cast<std::size_t>(m);
        return s;
    }

    std::vector<double> point(std::size_t flat) const {
        std::vector<double> x(shape.size());
        for (int l = dim() - 1; l >= 0; --l) {
            const auto m = static_cast<std::size_t>(shape[static_cast<std::size_t>(l)]);
            x[static_cast<std::size_t>(l)] = lower[static_cast<std::size_t>(l)] + h * static_cast<double>(flat % m);
            flat /= m;
        }
        return x;
    }

    template <class F>
    static Grid sample(F&& f, std::span<const double> lo, std::span<const double> hi, double h) {
        if (lo.size() != hi.size() || lo.empty()) throw Error("grid: bad bounds");
        if (!(h > 0.0)) throw Error("grid: spacing must be positive");
        Grid g;
        g.h = h;
        g.lower.assign(lo.begin(), lo.end());
        for (std::size_t l = 0; l < lo.size(); ++l) {
            const double count = std::round((hi[l] - lo[l]) / h);
            if (count < 0) throw Error("grid: upper bound below lower bound");
            g.shape.push_back(static_cast<int>(count) + 1);
        }
        g.values.resize(g.size());
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            const auto x = g.point(i);
            g.values[i] = f(std::span<const double>(x));
        }
        return g;
    }
};

inline constexpr int kMaxFdOrder = 4;

namespace detail {

// One stencil along `axis`: order 1 -> (f(x+h) - f(x-h)) / 2h,
// order 2 -> (f(x+h) - 2 f(x) + f(x-h)) / h^2. Trims one node per side.
inline Grid stencil_along(const Grid& in, int axis, int order) {
    Grid out = in;
    const auto ax = static_cast<std::size_t>(axis);
    out.shape[ax] -= 2;
    out.lower[ax] += in.h;
    out.values.assign(out.size(), 0.0);
    std::size_t stride = 1;
    for (std::size_t l = ax + 1; l < in.shape.size(); ++l) stride *= static_cast<std::size_t>(in.shape[l]);
    const auto m_in = static_cast<std::size_t>(in.shape[ax]);
    const auto m_out = static_cast<std::size_t>(out.shape[ax]);
    const std::size_t outer = in.values.size() / (m_in * stride);
    const double h = in.h;
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < m_out; ++i) {
            for (std::size_t s = 0; s < stride; ++s) {
                const double lo = in.values[(o * m_in + i) * stride + s];
                const double mid = in.values[(o * m_in + i + 1) * stride + s];
                const double hi = in.values[(o * m_in + i + 2) * stride + s];
                out.values[(o * m_out + i) * stride + s] = order == 1 ? (hi - lo) / (2.0 * h) : (hi - 2.0 * mid + lo) / (h * h);
            }
        }
    }
    return out;
}

}  // namespace detail

// Second-order central differences for D^alpha, composed per axis.
inline Grid fd_weak_derivative(const Grid& samples, std::span<const int> alpha) {
    if (static_cast<int>(alpha.size()) != samples.dim()) throw Error("fd: multi-index has wrong length");
    for (int l = 0; l < samples.dim(); ++l) {
        const int a = alpha[static_cast<std::size_t>(l)];
        if (a < 0 || a > kMaxFdOrder) {
            throw OrderTooLarge("fd order " + std::to_string(a) + " outside 0.." + std::to_string(kMaxFdOrder));
        }
        if (samples.shape[static_cast<std::size_t>(l)] < 2 * a + 1) {
            throw GridTooCoarse("axis " + std::to_string(l) + " has " +
                                std::to_string(samples.shape[static_cast<std::size_t>(l)]) + " points, need " +
                                std::to_string(2 * a + 1));
        }
    }
    Grid g = samples;
    for (int l = 0; l < samples.dim(); ++l) {
        int a = alpha[static_cast<std::size_t>(l)];
        for (; a >= 2; a -= 2) g = detail::stencil_along(g, l, 2);
        if (a == 1) g = detail::stencil_along(g, l, 1);
    }
    return g;
}

struct GridSpec {
    std::vector<double> lower;
    std::vector<double> upper;
    double h = 1e-2;
};

struct InterchangeReport {
    double max_abs_discrepancy = 0.0;
    bool pass = false;
    std::size_t nodes = 0;
    std::vector<double> worst_point;
    Status quadrature = Status::Converged;
};

// Finite differences of grid samples of H f against the derivative formula
// at every interior node.
inline InterchangeReport verify_interchange(const HausdorffOperator& op, const TestFunction& f,
                                            std::span<const int> alpha, const GridSpec& spec, double tol,
                                            const ConditionReport& cond, double quad_tol = 1e-12) {
    require_condition(cond, order_of(alpha));
    InterchangeReport rep;
    auto apply = [&](std::span<const double> x) {
        const auto r = op.apply(f, x, quad_tol);
        rep.quadrature = combine(rep.quadrature, r.status);
        return r.value;
    };
    const Grid samples = Grid::sample(apply, spec.lower, spec.upper, spec.h);
    const Grid fd = fd_weak_derivative(samples, alpha);
    const DerivativeTable table(f, alpha);
    for (std::size_t i = 0; i < fd.values.size(); ++i) {
        const auto x = fd.point(i);
        const auto r = op.derivative(table, x, quad_tol);
        rep.quadrature = combine(rep.quadrature, r.status);
        const double d = std::fabs(r.value - fd.values[i]);
        if (d > rep.max_abs_discrepancy || rep.worst_point.empty()) {
            rep.max_abs_discrepancy = d;
            rep.worst_point = x;
        }
    }
    rep.nodes = fd.values.size();
    rep.pass = rep.quadrature == Status::Converged && rep.max_abs_discrepancy <= tol;
    return rep;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

// max over m <= k of #{|alpha| = m} * n^{m/2}: bounds
// sum_{|alpha|=m} sum_beta |c_beta(A)| ||D^beta f|| by this factor times
// ||A||^m sum_{|beta|=m} ||D^beta f||.
inline double kappa(int n, int k) {
    if (n < 1 || k < 0) throw Error("kappa: need n >= 1 and k >= 0");
    double best = 1.0;
    for (int m = 0; m <= k; ++m) best = std::max(best, binomial(n + m - 1, m) * std::pow(n, 0.5 * m));
    return best;
}

enum class Verdict { Bounded, Unbounded, Inconclusive };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Bounded: return "Bounded";
        case Verdict::Unbounded: return "Unbounded";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct CertificatePreconditions {
    bool nonneg_checked = false;
    double min_kernel_value = std::numeric_limits<double>::quiet_NaN();
    double eta_margin = std::numeric_limits<double>::quiet_NaN();
    double min_inner_entry = std::numeric_limits<double>::quiet_NaN();
    int samples_used = 0;
};

struct Certificate {
    Verdict verdict = Verdict::Inconclusive;
    int k = 0;
    double constant = std::numeric_limits<double>::quiet_NaN();  // C_k when Bounded
    ConditionReport condition;
    std::string reason;
    CertificatePreconditions preconditions;
};

struct CertifyOptions {
    double eta_floor = 1e-6;
    double tol = 1e-10;
    int samples = 1000;
    std::uint64_t seed = 1;
    ProbeSchedule schedule = ProbeSchedule::geometric();
};

// Never throws: failures become Inconclusive with a reason.
inline Certificate certify(const KernelSpec& kernel, const MatrixFamily& family, int k, const CertifyOptions& opt = {}) {
    Certificate c;
    c.k = k;
    try {
        if (!kernel.nonneg) {
            c.reason = "kernel is not asserted nonnegative";
            return c;
        }
        const auto samples = kernel.sample_support(opt.samples, opt.seed);
        c.preconditions.samples_used = static_cast<int>(samples.size());
        c.preconditions.min_kernel_value = kernel.check_nonneg(samples);
        c.preconditions.nonneg_checked = true;

        c.preconditions.eta_margin = eta_margin(family, samples);
        if (!(c.preconditions.eta_margin >= opt.eta_floor)) {
            c.reason = "eta margin " + std::to_string(c.preconditions.eta_margin) + " below floor " +
                       std::to_string(opt.eta_floor) + " on sampled supp Phi";
            return c;
        }

        // Membership A = Lambda P Q with P >= 0 entrywise on supp Phi.
        if (std::holds_alternative<MatrixFamily::Decomposed>(family.variant())) {
            c.preconditions.min_inner_entry = family.min_inner_entry(samples);
        } else if (std::holds_alternative<MatrixFamily::ExpressionEntries>(family.variant()) && !family.is_constant()) {
            double lo = std::numeric_limits<double>::infinity();
            for (const auto& y : samples) {
                const Matrix a = family(y);
                for (double v : a.data()) lo = std::min(lo, v);
            }
            c.preconditions.min_inner_entry = lo;
        }
        if (c.preconditions.min_inner_entry < -kNonnegSlack) {
            c.reason = "matrix entries change sign on sampled supp Phi; factorisation with P >= 0 not established";
            return c;
        }

        c.condition = HausdorffOperator(kernel, family).condition(k, opt.tol, opt.schedule);
        switch (c.condition.quad.status) {
            case Status::Converged:
                c.verdict = Verdict::Bounded;
                c.constant = c.condition.quad.value;
                break;
            case Status::Divergent:
                c.verdict = Verdict::Unbounded;
                c.reason = "condition integral diverges at the " + c.condition.quad.evidence.end + " end";
                break;
            case Status::Inconclusive:
                c.reason = c.condition.quad.note.empty() ? "condition integral inconclusive" : c.condition.quad.note;
                break;
        }
    } catch (const std::exception& e) {
        c.verdict = Verdict::Inconclusive;
        c.reason = e.what();
    }
    return c;
}

struct WitnessRow {
    double radius = 0.0;
    double s = 0.0;      // condition value of the truncated kernel
    double w = 0.0;      // W^{k,1} norm of H f for the truncated kernel
    double ratio = std::numeric_limits<double>::quiet_NaN();
    Status status = Status::Converged;
};

struct WitnessTable {
    int k = 0;
    std::vector<WitnessRow> rows;
    int fit_window = 0;
    double log_offset = 0.0;     // c in S ~ ln R + c over the window
    double log_residual = 0.0;   // max relative misfit of ln R + c over the window
    double slope = 0.0;          // free least-squares slope of S against ln R
    double intercept = 0.0;
    bool w_increasing = false;
    double ratio_min = std::numeric_limits<double>::quiet_NaN();
    double ratio_max = std::numeric_limits<double>::quiet_NaN();
    Growth growth = Growth::Unknown;
};

inline constexpr int kWitnessFitWindow = 5;

inline TestFunction witness_function(int k, int n) { return k == 0 ? preset_gauss(n) : preset_gm(k, n); }

// S_j and W_j for the kernels Phi * chi(1/R_j < |y| < R_j).
inline WitnessTable blowup_witness(const KernelSpec& kernel, const MatrixFamily& family, int k,
                                   std::span<const double> radii, double tol) {
    if (!kernel.nonneg) throw PreconditionUnmet("blow-up witness needs a nonnegative kernel");
    if (radii.empty()) throw Error("blow-up witness needs at least one radius");
    WitnessTable t;
    t.k = k;
    const TestFunction f = witness_function(k, kernel.n);
    for (double radius : radii) {
        if (!(radius >= 1.0)) throw Error("witness radii must be >= 1");
        WitnessRow row;
        row.radius = radius;
        const KernelSpec trunc = kernel.truncated(1.0 / radius, radius);
        if (!trunc.support.empty()) {
            const HausdorffOperator op(trunc, family);
            const auto cond = op.condition(k, tol);
            row.s = cond.quad.value;
            row.status = cond.quad.status;
            if (cond.converged()) {
                const auto w = wk1_norm_operator_image(op, f, k, std::max(tol, 1e-8), cond);
                row.w = w.total;
                row.status = combine(row.status, w.status);
            }
            if (row.s > 0.0) row.ratio = row.w / row.s;
        }
        t.rows.push_back(row);
    }

    const std::size_t m = t.rows.size();
    const std::size_t first = m > static_cast<std::size_t>(kWitnessFitWindow) ? m - kWitnessFitWindow : 0;
    t.fit_window = static_cast<int>(m - first);
    double sum_c = 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = first; i < m; ++i) {
        const double lx = std::log(t.rows[i].radius);
        const double s = t.rows[i].s;
        sum_c += s - lx;
        sx += lx;
        sy += s;
        sxx += lx * lx;
        sxy += lx * s;
    }
    const double cnt = static_cast<double>(m - first);
    t.log_offset = sum_c / cnt;
    const double den = cnt * sxx - sx * sx;
    if (den != 0.0) {
        t.slope = (cnt * sxy - sx * sy) / den;
        t.intercept = (sy - t.slope * sx) / cnt;
    }
    t.log_residual = 0.0;
    for (std::size_t i = first; i < m; ++i) {
        const double fit = std::log(t.rows[i].radius) + t.log_offset;
        const double s = t.rows[i].s;
        t.log_residual = std::max(t.log_residual, s != 0.0 ? std::fabs(s - fit) / std::fabs(s) : std::fabs(fit));
    }
    t.w_increasing = true;
    for (std::size_t i = 1; i < m; ++i) t.w_increasing = t.w_increasing && t.rows[i].w > t.rows[i - 1].w;
    for (const auto& r : t.rows) {
        if (std::isnan(r.ratio)) continue;
        t.ratio_min = std::isnan(t.ratio_min) ? r.ratio : std::min(t.ratio_min, r.ratio);
        t.ratio_max = std::isnan(t.ratio_max) ? r.ratio : std::max(t.ratio_max, r.ratio);
    }
    t.growth = t.log_residual <= 0.02 ? Growth::Log : Growth::Unknown;
    return t;
}

}  // namespace hausdorff
