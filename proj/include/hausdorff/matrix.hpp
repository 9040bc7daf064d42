#pragma once

#include <hausdorff/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace hausdorff {

// Dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n, double fill = 0.0) : n_(n), a_(static_cast<std::size_t>(n * n), fill) {}

    Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(static_cast<int>(rows.size())) {
        a_.reserve(static_cast<std::size_t>(n_ * n_));
        for (const auto& r : rows) {
            if (static_cast<int>(r.size()) != n_) throw Error("matrix rows must form a square");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static Matrix from_row_major(int n, std::span<const double> values) {
        if (static_cast<int>(values.size()) != n * n) {
            throw Error("expected " + std::to_string(n * n) + " entries, got " + std::to_string(values.size()));
        }
        Matrix m(n);
        std::copy(values.begin(), values.end(), m.a_.begin());
        return m;
    }

    static Matrix identity(int n) {
        Matrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(std::span<const double> d) {
        Matrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int dim() const noexcept { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * n_ + j)]; }
    std::span<const double> data() const noexcept { return a_; }

    Matrix transposed() const {
        Matrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix scaled(double s) const {
        Matrix m = *this;
        for (double& v : m.a_) v *= s;
        return m;
    }

    friend Matrix operator*(const Matrix& x, const Matrix& y) {
        if (x.n_ != y.n_) throw Error("matrix dimension mismatch");
        Matrix r(x.n_);
        for (int i = 0; i < x.n_; ++i)
            for (int k = 0; k < x.n_; ++k) {
                const double xik = x(i, k);
                for (int j = 0; j < x.n_; ++j) r(i, j) += xik * y(k, j);
            }
        return r;
    }

    void apply(std::span<const double> x, std::span<double> out) const {
        for (int i = 0; i < n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * x[static_cast<std::size_t>(j)];
            out[static_cast<std::size_t>(i)] = s;
        }
    }

    std::vector<double> operator*(std::span<const double> x) const {
        std::vector<double> out(static_cast<std::size_t>(n_));
        apply(x, out);
        return out;
    }

    double column_norm(int j) const {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    bool all_finite() const {
        return std::all_of(a_.begin(), a_.end(), [](double v) { return std::isfinite(v); });
    }

private:
    int n_ = 0;
    std::vector<double> a_;
};

// LU factorisation with partial pivoting.
class LU {
public:
    explicit LU(const Matrix& m) : lu_(m), perm_(static_cast<std::size_t>(m.dim())) {
        const int n = m.dim();
        for (int i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
        for (int k = 0; k < n; ++k) {
            int p = k;
            for (int i = k + 1; i < n; ++i)
                if (std::fabs(lu_(i, k)) > std::fabs(lu_(p, k))) p = i;
            if (lu_(p, k) == 0.0) {
                singular_ = true;
                continue;
            }
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
                sign_ = -sign_;
            }
            for (int i = k + 1; i < n; ++i) {
                lu_(i, k) /= lu_(k, k);
                const double f = lu_(i, k);
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const noexcept { return singular_; }

    double determinant() const {
        if (singular_) return 0.0;
        double d = sign_;
        for (int i = 0; i < lu_.dim(); ++i) d *= lu_(i, i);
        return d;
    }

    std::vector<double> solve(std::span<const double> b) const {
        if (singular_) throw SingularMatrix("cannot solve with a singular matrix");
        const int n = lu_.dim();
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double s = b[static_cast<std::size_t>(perm_[static_cast<std::size_t>(i)])];
            for (int j = 0; j < i; ++j) s -= lu_(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = x[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s / lu_(i, i);
        }
        return x;
    }

    Matrix inverse() const {
        const int n = lu_.dim();
        Matrix inv(n);
        std::vector<double> e(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            std::fill(e.begin(), e.end(), 0.0);
            e[static_cast<std::size_t>(j)] = 1.0;
            const auto col = solve(e);
            for (int i = 0; i < n; ++i) inv(i, j) = col[static_cast<std::size_t>(i)];
        }
        return inv;
    }

private:
    Matrix lu_;
    std::vector<int> perm_;
    double sign_ = 1.0;
    bool singular_ = false;
};

inline double determinant(const Matrix& m) { return LU(m).determinant(); }

inline Matrix inverse(const Matrix& m) {
    LU lu(m);
    if (lu.singular()) throw SingularMatrix("matrix is singular");
    return lu.inverse();
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return std::sqrt(s);
}

// Largest singular value by power iteration on B^T B.
inline double operator_norm(const Matrix& b, double rel_tol = 1e-10, int max_iter = 10000) {
    const int n = b.dim();
    const Matrix btb = b.transposed() * b;
    // Start from the column of B^T B with the largest norm.
    int best = 0;
    for (int j = 1; j < n; ++j)
        if (btb.column_norm(j) > btb.column_norm(best)) best = j;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = btb(i, best);
    double norm_v = 0.0;
    for (double x : v) norm_v += x * x;
    norm_v = std::sqrt(norm_v);
    if (norm_v == 0.0) return 0.0;
    for (double& x : v) x /= norm_v;

    double lambda = 0.0;
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int it = 0; it < max_iter; ++it) {
        btb.apply(v, w);
        double rq = 0.0;
        double nw = 0.0;
        for (int i = 0; i < n; ++i) {
            rq += v[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
            nw += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
        }
        nw = std::sqrt(nw);
        if (nw == 0.0) return 0.0;
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / nw;
        const bool done = it > 0 && std::fabs(rq - lambda) <= rel_tol * std::fabs(rq);
        lambda = rq;
        if (done) break;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

struct MatrixStats {
    double fro = 0.0;
    double opn = 0.0;
    double det = 0.0;
    std::vector<double> colnorms;
};

inline MatrixStats matrix_stats(const Matrix& b) {
    if (!b.all_finite()) throw NonFinite("matrix has non-finite entries");
    MatrixStats s;
    s.fro = frobenius_norm(b);
    s.opn = operator_norm(b);
    s.det = determinant(b);
    for (int j = 0; j < b.dim(); ++j) s.colnorms.push_back(b.column_norm(j));
    return s;
}

// |det B| / prod_j ||B_j||.
inline double eta_ratio(const Matrix& b) {
    double prod = 1.0;
    for (int j = 0; j < b.dim(); ++j) {
        const double c = b.column_norm(j);
        if (c == 0.0) throw SingularColumn("column " + std::to_string(j + 1) + " vanishes");
        prod *= c;
    }
    return std::fabs(determinant(b)) / prod;
}

// Columns B_j / (n ||B_j||).
inline Matrix normalize_columns(const Matrix& b) {
    const int n = b.dim();
    Matrix r = b;
    for (int j = 0; j < n; ++j) {
        const double c = b.column_norm(j);
        if (c == 0.0) throw SingularColumn("column " + std::to_string(j + 1) + " vanishes");
        for (int i = 0; i < n; ++i) r(i, j) = b(i, j) / (n * c);
    }
    return r;
}

inline double unit_ball_volume(int n) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Surface area of S^{n-1}.
inline double sphere_area(int n) { return n * unit_ball_volume(n); }

// Counter-based generator: the k-th uniform of draw `index` depends only on
// (seed, index, k), so any partition of the draws gives the same stream.
struct CounterRng {
    std::uint64_t seed;

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    double uniform(std::uint64_t index, std::uint64_t k) const {
        const std::uint64_t h = mix(mix(seed ^ mix(index)) + k * 0xd1b54a32d192ed03ULL);
        return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;  // in (0, 1)
    }

    double normal(std::uint64_t index, std::uint64_t k) const {
        // Box-Muller on the pair (2k, 2k+1); the cosine branch only.
        const double u1 = uniform(index, 2 * k);
        const double u2 = uniform(index, 2 * k + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
};

struct ConeMeasure {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t samples = 0;
};

// Monte Carlo surface measure of B(0,inf)^n intersected with S^{n-1}, i.e. the
// unit vectors u with every component of B^{-1}u positive.
inline ConeMeasure cone_measure(const Matrix& b, std::uint64_t n_samples, std::uint64_t seed,
                                unsigned threads = 0) {
    if (n_samples == 0) throw Error("cone_measure needs at least one sample");
    LU lu(b);
    if (lu.singular()) throw SingularMatrix("cone_measure: matrix is singular");
    const Matrix binv = lu.inverse();
    const int n = b.dim();
    const CounterRng rng{seed};

    auto count = [&](std::uint64_t begin, std::uint64_t end) {
        std::uint64_t hits = 0;
        std::vector<double> u(static_cast<std::size_t>(n));
        std::vector<double> v(static_cast<std::size_t>(n));
        for (std::uint64_t s = begin; s < end; ++s) {
            for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = rng.normal(s, static_cast<std::uint64_t>(i));
            // Normalisation does not change signs of B^{-1}u.
            binv.apply(u, v);
            bool inside = true;
            for (double x : v) inside = inside && x > 0.0;
            hits += inside ? 1 : 0;
        }
        return hits;
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_samples));
    std::uint64_t hits = 0;
    if (threads <= 1) {
        hits = count(0, n_samples);
    } else {
        std::vector<std::uint64_t> partial(threads, 0);
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (n_samples + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t lo = t * chunk;
            const std::uint64_t hi = std::min(n_samples, lo + chunk);
            pool.emplace_back([&, t, lo, hi] { partial[t] = lo < hi ? count(lo, hi) : 0; });
        }
        for (auto& th : pool) th.join();
        for (auto p : partial) hits += p;
    }

    const double area = sphere_area(n);
    const double p = static_cast<double>(hits) / static_cast<double>(n_samples);
    ConeMeasure r;
    r.hits = hits;
    r.samples = n_samples;
    r.estimate = p * area;
    r.std_error = area * std::sqrt(p * (1.0 - p) / static_cast<double>(n_samples));
    return r;
}

// The explicit lower bound n |det A~| V_n / 2^n on the cone measure.
inline double cone_lower_bound(const Matrix& b) {
    const int n = b.dim();
    const double det_tilde = std::fabs(determinant(normalize_columns(b)));
    return n * det_tilde * unit_ball_volume(n) / std::ldexp(1.0, n);
}

}  // namespace hausdorff
