#pragma once

// Hardy operator Hf(x) = (1/x) int_0^x f and its adjoint
// H*f(x) = int_x^inf f(t)/t dt, directly and as Hausdorff operators with
// Psi(t) = chi_(1,inf)(t)/t^2 and Psi*(t) = chi_(0,1)(t)/t.

#include <hausdorff/errors.hpp>
#include <hausdorff/hausdorff.hpp>
#include <hausdorff/kernel.hpp>
#include <hausdorff/quadrature.hpp>
#include <hausdorff/sobolev.hpp>
#include <hausdorff/test_function.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace hausdorff {

enum class Classical { Hardy, AdjointHardy };

inline const char* to_string(Classical c) { return c == Classical::Hardy ? "H" : "H*"; }

inline KernelSpec hardy_kernel() { return make_kernel("chi(1,inf)(y1)/y1^2", "halfline(1,inf)", 1); }
inline KernelSpec adjoint_hardy_kernel() { return make_kernel("chi(0,1)(y1)/y1", "halfline(0,1)", 1); }

inline KernelSpec classical_kernel(Classical c) {
    return c == Classical::Hardy ? hardy_kernel() : adjoint_hardy_kernel();
}

inline HausdorffOperator classical_operator(Classical c) {
    return HausdorffOperator(classical_kernel(c), MatrixFamily::diagonal_inverse_norm(1));
}

template <class F>
double hardy_point(const F& f, double x, double tol) {
    if (!(x > 0.0)) throw NonPositivePoint("Hardy operator needs x > 0");
    QuadOptions opt;
    opt.abs_tol = tol * x;
    const auto r = integrate_line([&](double t) { return static_cast<double>(f(t)); }, 0.0, x, opt);
    if (!r.converged()) throw Error("Hardy average did not converge: " + r.note);
    return r.value / x;
}

template <class F>
double adjoint_hardy_point(const F& f, double x, double tol) {
    if (!(x > 0.0)) throw NonPositivePoint("adjoint Hardy operator needs x > 0");
    auto g = [&](double t) { return static_cast<double>(f(t)) / t; };
    const auto probe = improper_probe([&](double t) { return std::fabs(g(t)); }, x, std::numeric_limits<double>::infinity(),
                                      ProbeSchedule::geometric(), tol);
    if (probe.status == Status::Divergent) throw DivergentTail("f(t)/t is not integrable at infinity");
    if (probe.status != Status::Converged) throw DivergentTail("integrability of f(t)/t at infinity not established");
    QuadOptions opt;
    opt.abs_tol = tol;
    opt.rel_tol = 1e-12;
    const auto r = integrate_line(g, x, std::numeric_limits<double>::infinity(), opt);
    if (!r.converged()) throw DivergentTail("tail integral did not converge: " + r.note);
    return r.value;
}

inline std::function<double(double)> as_line_function(const TestFunction& f) {
    if (f.dim() != 1) throw Error("classical operators act on functions of one variable");
    return [f](double t) { return f(std::span<const double>(&t, 1)); };
}

// max over points of |H_Psi f(x) - Hf(x)| (or the adjoint pair).
inline double hausdorff_equivalence_check(Classical which, const TestFunction& f, std::span<const double> points,
                                          double tol) {
    const auto op = classical_operator(which);
    const auto line = as_line_function(f);
    double worst = 0.0;
    for (double x : points) {
        if (!(x > 0.0)) throw NonPositivePoint("equivalence points must be positive");
        const auto h = op.apply(f, std::span<const double>(&x, 1), tol * 1e-2);
        if (!h.converged()) throw Error("Hausdorff form did not converge at x = " + std::to_string(x));
        const double c = which == Classical::Hardy ? hardy_point(line, x, tol * 1e-2) : adjoint_hardy_point(line, x, tol * 1e-2);
        worst = std::max(worst, std::fabs(h.value - c));
    }
    return worst;
}

struct PropositionRow {
    Classical which;
    int k;
    Certificate certificate;
};

// certify for (Psi, k) and (Psi*, k), k = 0..k_max.
inline std::vector<PropositionRow> proposition_report(int k_max, const CertifyOptions& opt = {}) {
    if (k_max < 0) throw Error("k_max must be non-negative");
    std::vector<PropositionRow> rows;
    const auto diag = MatrixFamily::diagonal_inverse_norm(1);
    for (Classical c : {Classical::Hardy, Classical::AdjointHardy}) {
        const auto kernel = classical_kernel(c);
        for (int k = 0; k <= k_max; ++k) rows.push_back({c, k, certify(kernel, diag, k, opt)});
    }
    return rows;
}

}  // namespace hausdorff
