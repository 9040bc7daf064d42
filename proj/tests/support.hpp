#pragma once

// Generators and independent oracles shared by the unit tests and the
// acceptance suite.

#include <hausdorff/matrix.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <cstdio>
#include <random>
#include <string>

namespace hausdorff::support {

using Big = boost::multiprecision::cpp_bin_float_50;

// Random well-formed expressions over y1..y_dim.
class ExprGen {
public:
    ExprGen(std::uint64_t seed, int dim) : rng_(seed), dim_(dim) {}

    std::string make(int depth) {
        const int pick = depth <= 0 ? static_cast<int>(rng_() % 3) : static_cast<int>(rng_() % 13);
        switch (pick) {
            case 0: return number();
            case 1: return "y" + std::to_string(1 + rng_() % static_cast<unsigned>(dim_));
            case 2: return "nrm(y)";
            case 3: return "(" + make(depth - 1) + ")+" + make(depth - 1);
            case 4: return make(depth - 1) + "-" + make(depth - 1);
            case 5: return make(depth - 1) + "*" + make(depth - 1);
            case 6: return make(depth - 1) + "/(" + make(depth - 1) + ")";
            case 7: return "abs(" + make(depth - 1) + ")^" + small_int();
            case 8: return "-" + make(depth - 1);
            case 9: return "exp(-abs(" + make(depth - 1) + "))";
            case 10: return "min(" + make(depth - 1) + "," + make(depth - 1) + ")";
            case 11: return "max(" + make(depth - 1) + "," + make(depth - 1) + ")";
            default: return "chi(" + number() + ",inf)(" + make(depth - 1) + ")";
        }
    }

private:
    std::string number() {
        std::uniform_real_distribution<double> u(-4, 4);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6g", u(rng_));
        std::string s(buf);
        return s[0] == '-' ? "(" + s + ")" : s;
    }
    std::string small_int() { return std::to_string(rng_() % 4); }

    std::mt19937_64 rng_;
    int dim_;
};

inline Matrix random_matrix(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Matrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = g(rng);
    return m;
}

// Largest singular value of a 2x2 matrix in closed form.
inline double opnorm_2x2(const Matrix& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    return std::sqrt(0.5 * (s + std::sqrt(std::max(0.0, s * s - 4 * det * det))));
}

// Central m-th difference of exp(-t^2), Richardson-extrapolated, in 50 digits.
inline Big fd_gauss_derivative(int m, const Big& t, const Big& h) {
    auto central = [&](const Big& step) {
        Big acc = 0;
        Big binom = 1;
        for (int k = 0; k <= m; ++k) {
            const Big x = t + (Big(m) / 2 - k) * step;
            const Big term = binom * exp(-x * x);
            acc += (k % 2 == 0) ? term : Big(-term);
            binom = binom * (m - k) / (k + 1);
        }
        return Big(acc / pow(step, m));
    };
    return (4 * central(h / 2) - central(h)) / 3;
}

}  // namespace hausdorff::support
