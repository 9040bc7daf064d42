#pragma once

// Kernels Phi(y) with their radial supports, and polar integration over
// supp Phi: int g = int_{r0}^{r1} r^{n-1} int_{S^{n-1}} g(r w) dsigma(w) dr.

#include <hausdorff/errors.hpp>
#include <hausdorff/expr.hpp>
#include <hausdorff/matrix.hpp>
#include <hausdorff/quadrature.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hausdorff {

struct Support {
    enum class Kind { All, Annulus, HalfLine };
    Kind kind = Kind::All;
    double r_min = 0.0;
    double r_max = std::numeric_limits<double>::infinity();

    // Only y with positive first coordinate (1-D half-lines).
    bool positive_only() const noexcept { return kind == Kind::HalfLine; }

    static Support all() { return {}; }

    static Support annulus(double r0, double r1) {
        if (!(r0 >= 0.0) || !(r1 > r0)) throw Error("annulus needs 0 <= r0 < r1");
        return {Kind::Annulus, r0, r1};
    }

    static Support halfline(double a, double b) {
        if (!(a >= 0.0) || !(b > a)) throw Error("halfline needs 0 <= a < b");
        return {Kind::HalfLine, a, b};
    }

    // Intersection with the shell r0 < |y| < r1.
    Support truncated(double r0, double r1) const {
        Support s = *this;
        s.r_min = std::max(r_min, r0);
        s.r_max = std::min(r_max, r1);
        if (s.kind == Kind::All) s.kind = Kind::Annulus;
        if (!(s.r_max > s.r_min)) s.r_max = s.r_min;
        return s;
    }

    bool empty() const noexcept { return !(r_max > r_min); }

    bool contains(std::span<const double> y) const {
        double s = 0.0;
        for (double c : y) s += c * c;
        const double r = std::sqrt(s);
        if (positive_only() && !(y[0] > 0.0)) return false;
        if (kind == Kind::All) return true;
        return r > r_min && r < r_max;
    }

    std::vector<std::string> singularities() const {
        std::vector<std::string> out;
        if (r_min == 0.0) out.emplace_back("origin");
        if (std::isinf(r_max)) out.emplace_back("infinity");
        return out;
    }

    std::string describe() const {
        auto num = [](double v) {
            if (std::isinf(v)) return std::string("inf");
            char buf[32];
            auto res = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, res.ptr);
        };
        switch (kind) {
            case Kind::All: return "all";
            case Kind::Annulus: return "annulus(" + num(r_min) + "," + num(r_max) + ")";
            case Kind::HalfLine: return "halfline(" + num(r_min) + "," + num(r_max) + ")";
        }
        return "?";
    }
};

// "all" | "annulus(r0,r1)" | "halfline(a,b)"; bounds may be "inf".
inline Support parse_support(std::string_view text, int n) {
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    auto number = [&](std::string_view s) {
        s = trim(s);
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
            throw Error("support: bad number '" + std::string(s) + "'");
        }
        return v;
    };
    text = trim(text);
    if (text == "all") return Support::all();
    const auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')') throw Error("support: cannot parse '" + std::string(text) + "'");
    const auto name = trim(text.substr(0, open));
    const auto inside = text.substr(open + 1, text.size() - open - 2);
    const auto comma = inside.find(',');
    if (comma == std::string_view::npos) throw Error("support: expected two bounds in '" + std::string(text) + "'");
    const double a = number(inside.substr(0, comma));
    const double b = number(inside.substr(comma + 1));
    if (name == "annulus") return Support::annulus(a, b);
    if (name == "halfline") {
        if (n != 1) throw Error("support: halfline is only defined for n = 1");
        return Support::halfline(a, b);
    }
    throw Error("support: unknown shape '" + std::string(name) + "'");
}

inline constexpr double kNonnegSlack = 1e-12;

struct KernelSpec {
    int n = 1;
    Expr expr;
    Support support;
    bool nonneg = true;

    std::vector<std::string> singularities() const { return support.singularities(); }

    double operator()(std::span<const double> y) const { return support.contains(y) ? expr.eval(y) : 0.0; }

    bool is_radial() const { return expr.is_radial() && !support.positive_only(); }

    KernelSpec truncated(double r0, double r1) const {
        KernelSpec k = *this;
        k.support = support.truncated(r0, r1);
        return k;
    }

    // Deterministic points of supp Phi: radii from a van der Corput sequence
    // mapped onto (r_min, r_max), directions from a counter-based RNG.
    std::vector<std::vector<double>> sample_support(int count, std::uint64_t seed = 1) const {
        std::vector<std::vector<double>> pts;
        pts.reserve(static_cast<std::size_t>(count));
        CounterRng rng{seed};
        for (int i = 0; i < count; ++i) {
            double u = 0.0;
            double f = 0.5;
            for (unsigned v = static_cast<unsigned>(i + 1); v; v >>= 1, f *= 0.5)
                if (v & 1u) u += f;
            double r;
            if (std::isinf(support.r_max)) {
                r = support.r_min + u / (1.0 - u);
            } else {
                r = support.r_min + (support.r_max - support.r_min) * u;
            }
            if (!(r > support.r_min)) r = std::nextafter(support.r_min, support.r_max);
            std::vector<double> y(static_cast<std::size_t>(n));
            if (n == 1) {
                const bool neg = !support.positive_only() && rng.uniform(static_cast<std::uint64_t>(i), 0) < 0.5;
                y[0] = neg ? -r : r;
            } else {
                double s = 0.0;
                for (int l = 0; l < n; ++l) {
                    y[static_cast<std::size_t>(l)] = rng.normal(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(l));
                    s += y[static_cast<std::size_t>(l)] * y[static_cast<std::size_t>(l)];
                }
                const double scale = r / std::sqrt(s);
                for (double& c : y) c *= scale;
            }
            pts.push_back(std::move(y));
        }
        return pts;
    }

    // Minimum of Phi over the samples; throws NegativeKernel below -1e-12.
    double check_nonneg(const std::vector<std::vector<double>>& samples) const {
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& y : samples) {
            const double v = expr.eval(y);
            lo = std::min(lo, v);
            if (v < -kNonnegSlack) throw NegativeKernel("kernel takes the value " + std::to_string(v) + " on its support");
        }
        return lo;
    }

    std::string describe() const { return expr.source() + " on " + support.describe(); }
};

inline KernelSpec make_kernel(std::string_view expr, std::string_view support, int n, bool nonneg = true) {
    KernelSpec k;
    k.n = n;
    k.expr = Expr::parse(expr, n);
    k.support = parse_support(support, n);
    k.nonneg = nonneg;
    return k;
}

namespace detail {

// int over S^{m-1} of g(prefix, w) with w = (cos t, sin t w'), Jacobian
// sin^{m-2} t; the point is written into y[offset..] scaled by `scale`.
template <class G>
double sphere_recursive(G& g, std::vector<double>& y, int offset, int m, double scale, double tol, Status& worst) {
    const auto o = static_cast<std::size_t>(offset);
    if (m == 1) {
        y[o] = scale;
        double v = g(y);
        y[o] = -scale;
        v += g(y);
        return v;
    }
    if (m == 2) {
        auto ring = [&](double t) {
            y[o] = scale * std::cos(t);
            y[o + 1] = scale * std::sin(t);
            return g(y);
        };
        QuadOptions opt;
        opt.abs_tol = tol;
        opt.rel_tol = 1e-12;
        const auto r = integrate_line(ring, 0.0, 2.0 * std::numbers::pi, opt);
        worst = combine(worst, r.status);
        return r.value;
    }
    auto slice = [&](double t) {
        const double s = std::sin(t);
        y[o] = scale * std::cos(t);
        const double w = std::pow(s, m - 2);
        if (w == 0.0) return 0.0;
        return w * sphere_recursive(g, y, offset + 1, m - 1, scale * s, tol, worst);
    };
    QuadOptions opt;
    opt.abs_tol = tol;
    opt.rel_tol = 1e-12;
    const auto r = integrate_line(slice, 0.0, std::numbers::pi, opt);
    worst = combine(worst, r.status);
    return r.value;
}

}  // namespace detail

// Polar integration of g over supp Phi. With `radial` set, g is assumed to
// depend on |y| only and the sphere integral collapses to |S^{n-1}| g(r e_1).
class PolarIntegrator {
public:
    PolarIntegrator(const KernelSpec& kernel, bool radial, double angular_tol = 1e-12)
        : kernel_(kernel), radial_(radial && !kernel.support.positive_only()), angular_tol_(angular_tol) {}

    template <class G>
    double profile(G& g, double r, Status& worst) const {
        const int n = kernel_.n;
        std::vector<double> y(static_cast<std::size_t>(n), 0.0);
        if (kernel_.support.positive_only()) {
            y[0] = r;
            return g(std::span<const double>(y));
        }
        auto gg = [&](const std::vector<double>& p) { return static_cast<double>(g(std::span<const double>(p))); };
        if (radial_) {
            y[0] = r;
            const double v = gg(y);
            if (v == 0.0) return 0.0;
            return sphere_area(n) * std::pow(r, n - 1) * v;
        }
        const double s = detail::sphere_recursive(gg, y, 0, n, r, angular_tol_, worst);
        return std::pow(r, n - 1) * s;
    }

    template <class G>
    QuadratureResult integrate(G&& g, const QuadOptions& opt) const {
        const auto& s = kernel_.support;
        if (s.empty()) return {};
        Status worst = Status::Converged;
        auto h = [&](double r) { return profile(g, r, worst); };
        auto res = integrate_line(h, s.r_min, s.r_max, opt);
        res.status = combine(res.status, worst);
        if (worst != Status::Converged && res.note.empty()) res.note = "an angular integral did not converge";
        return res;
    }

    template <class G>
    QuadratureResult integrate(G&& g, double tol) const {
        QuadOptions opt;
        opt.abs_tol = tol;
        return integrate(std::forward<G>(g), opt);
    }

    // improper_probe on the radial profile.
    template <class G>
    QuadratureResult probe(G&& g, const ProbeSchedule& schedule, double tol) const {
        const auto& s = kernel_.support;
        if (s.empty()) return {};
        Status worst = Status::Converged;
        auto h = [&](double r) { return profile(g, r, worst); };
        auto res = improper_probe(h, s.r_min, s.r_max, schedule, tol);
        if (worst != Status::Converged && res.status == Status::Converged) {
            res.status = Status::Inconclusive;
            res.note = "an angular integral did not converge";
        }
        return res;
    }

    bool radial() const noexcept { return radial_; }

private:
    const KernelSpec& kernel_;
    bool radial_;
    double angular_tol_;
};

}  // namespace hausdorff
