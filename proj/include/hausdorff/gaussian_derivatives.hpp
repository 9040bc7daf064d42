#pragma once

// Derivatives of g(t) = exp(-t^2): g^(m) = P_m(t) g(t) with
// P_0 = 1 and P_m = P_{m-1}' - 2t P_{m-1}. Coefficients are exact integers.

#include <hausdorff/errors.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace hausdorff {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr int kMaxHermiteOrder = 60;

struct HermiteFactor {
    int order = 0;
    std::vector<BigInt> exact;   // exact[j] multiplies t^j
    std::vector<double> coeffs;  // the same, rounded to double

    double operator()(double t) const {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
        return acc;
    }

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    const BigInt& leading() const { return exact.back(); }
};

inline std::vector<HermiteFactor> hermite_factor_seq(int m) {
    if (m < 0) throw OrderTooLarge("hermite order must be non-negative");
    if (m > kMaxHermiteOrder) {
        throw OrderTooLarge("hermite order " + std::to_string(m) + " exceeds " +
                            std::to_string(kMaxHermiteOrder));
    }
    std::vector<HermiteFactor> seq;
    seq.reserve(static_cast<std::size_t>(m) + 1);
    std::vector<BigInt> cur{BigInt(1)};
    for (int l = 0; l <= m; ++l) {
        HermiteFactor f;
        f.order = l;
        f.exact = cur;
        f.coeffs.reserve(cur.size());
        for (const auto& c : cur) f.coeffs.push_back(c.convert_to<double>());
        seq.push_back(std::move(f));

        // next = cur' - 2 t cur
        std::vector<BigInt> next(cur.size() + 1, BigInt(0));
        for (std::size_t j = 1; j < cur.size(); ++j) next[j - 1] += cur[j] * static_cast<int>(j);
        for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] -= 2 * cur[j];
        cur = std::move(next);
    }
    return seq;
}

inline HermiteFactor hermite_factor(int m) { return hermite_factor_seq(m).back(); }

namespace detail {

// Largest positive root of q (positive leading coefficient), scanning down
// from a root bound in steps of `step` and refining by bisection.
inline double largest_positive_root(std::span<const double> q, double step = 1e-3, double xtol = 0.0) {
    // Cauchy bound, tightened by the Fujiwara bound when smaller.
    const double lead = q.back();
    const std::size_t deg = q.size() - 1;
    double cauchy = 0.0;
    double fujiwara = 0.0;
    for (std::size_t j = 0; j < deg; ++j) {
        const double r = std::fabs(q[j] / lead);
        cauchy = std::max(cauchy, r);
        const double k = static_cast<double>(deg - j);
        fujiwara = std::max(fujiwara, std::pow(j == 0 ? 0.5 * r : r, 1.0 / k));
    }
    const double bound = std::min(1.0 + cauchy, 2.0 * fujiwara) + step;

    auto eval = [&](double t) {
        double acc = 0.0;
        for (auto it = q.rbegin(); it != q.rend(); ++it) acc = acc * t + *it;
        return acc;
    };

    const auto steps = static_cast<long>(std::ceil(bound / step));
    double hi = steps * step;
    double fhi = eval(hi);
    for (long s = steps - 1; s >= 0; --s) {
        const double lo = s * step;
        const double flo = eval(lo);
        if ((flo <= 0.0) != (fhi <= 0.0)) {
            double a = lo;
            double b = hi;
            double fa = flo;
            while (b - a > xtol) {
                const double mid = 0.5 * (a + b);
                if (mid <= a || mid >= b) break;
                const double fm = eval(mid);
                if ((fm <= 0.0) == (fa <= 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            const double root = 0.5 * (a + b);
            return root > 0.0 ? root : 0.0;
        }
        hi = lo;
        fhi = flo;
    }
    return 0.0;
}

}  // namespace detail

// a_m: the largest positive root over i = 1..m of (-1)^i P_i(t) - 1, or 0.
inline double shift_threshold(int m) {
    if (m < 1) throw OrderMismatch("shift threshold needs m >= 1");
    const auto seq = hermite_factor_seq(m);
    double a = 0.0;
    for (int i = 1; i <= m; ++i) {
        std::vector<double> q = seq[static_cast<std::size_t>(i)].coeffs;
        if (i % 2 == 1) {
            for (double& c : q) c = -c;
        }
        q[0] -= 1.0;
        a = std::max(a, detail::largest_positive_root(q));
    }
    return a;
}

// G_m(x) = (-1)^m prod_l g(x_l + a_m).
class WitnessFunction {
public:
    WitnessFunction(int m, int n) : m_(m), n_(n), shift_(shift_threshold(m)), factors_(hermite_factor_seq(m)) {
        if (n < 1) throw Error("witness dimension must be positive");
    }

    int order() const noexcept { return m_; }
    int dim() const noexcept { return n_; }
    double shift() const noexcept { return shift_; }
    double sign() const noexcept { return m_ % 2 == 0 ? 1.0 : -1.0; }
    const HermiteFactor& factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }

    // D^gamma G_m(x), exact.
    double derivative(std::span<const int> gamma, std::span<const double> x) const {
        if (static_cast<int>(gamma.size()) != n_ || static_cast<int>(x.size()) != n_) {
            throw Error("witness derivative: dimension mismatch");
        }
        double v = sign();
        for (int l = 0; l < n_; ++l) {
            const int gl = gamma[static_cast<std::size_t>(l)];
            if (gl < 0 || gl > m_) {
                throw OrderMismatch("component order " + std::to_string(gl) + " outside 0.." + std::to_string(m_));
            }
            const double t = x[static_cast<std::size_t>(l)] + shift_;
            v *= factors_[static_cast<std::size_t>(gl)](t) * std::exp(-t * t);
        }
        return v;
    }

    double operator()(std::span<const double> x) const {
        const std::vector<int> zero(static_cast<std::size_t>(n_), 0);
        return derivative(zero, x);
    }

private:
    int m_;
    int n_;
    double shift_;
    std::vector<HermiteFactor> factors_;
};

inline double witness_derivative(const WitnessFunction& w, std::span<const int> gamma, std::span<const double> x) {
    return w.derivative(gamma, x);
}

}  // namespace hausdorff
