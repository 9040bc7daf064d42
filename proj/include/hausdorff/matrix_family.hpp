#pragma once

#include <hausdorff/errors.hpp>
#include <hausdorff/expr.hpp>
#include <hausdorff/matrix.hpp>

#include <cmath>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hausdorff {

// y -> A(y), an n x n matrix-valued map.
class MatrixFamily {
public:
    struct DiagonalInverseNorm {};
    struct Constant {
        Matrix value;
    };
    struct ExpressionEntries {
        std::vector<Expr> entries;  // row-major n*n
    };
    struct Decomposed {
        Matrix lambda;
        std::shared_ptr<const MatrixFamily> inner;
        Matrix q;
    };
    using Variant = std::variant<DiagonalInverseNorm, Constant, ExpressionEntries, Decomposed>;

    // A(y) = diag(1/|y|, ..., 1/|y|).
    static MatrixFamily diagonal_inverse_norm(int n) { return MatrixFamily(n, DiagonalInverseNorm{}); }

    static MatrixFamily constant(Matrix m) {
        if (!m.all_finite()) throw NonFinite("constant matrix has non-finite entries");
        const int n = m.dim();
        return MatrixFamily(n, Constant{std::move(m)});
    }

    static MatrixFamily expression_entries(int n, std::vector<Expr> entries) {
        if (static_cast<int>(entries.size()) != n * n) {
            throw Error("expected " + std::to_string(n * n) + " matrix entries, got " +
                        std::to_string(entries.size()));
        }
        for (const auto& e : entries) {
            if (e.dim() != n) throw Error("matrix entry dimension does not match the family");
        }
        return MatrixFamily(n, ExpressionEntries{std::move(entries)});
    }

    static MatrixFamily expression_entries(int n, const std::vector<std::string>& texts) {
        std::vector<Expr> entries;
        entries.reserve(texts.size());
        for (const auto& t : texts) entries.push_back(Expr::parse(t, n));
        return expression_entries(n, std::move(entries));
    }

    // A(y) = Lambda P(y) Q with constant invertible Lambda and Q.
    static MatrixFamily decomposed(Matrix lambda, MatrixFamily p, Matrix q) {
        const int n = p.dim();
        if (lambda.dim() != n || q.dim() != n) throw Error("decomposed family: dimension mismatch");
        if (determinant(lambda) == 0.0) throw SingularConstantPart("Lambda is singular");
        if (determinant(q) == 0.0) throw SingularConstantPart("Q is singular");
        if (std::holds_alternative<Decomposed>(p.v_)) throw Error("decomposed family: P may not itself be decomposed");
        return MatrixFamily(
            n, Decomposed{std::move(lambda), std::make_shared<const MatrixFamily>(std::move(p)), std::move(q)});
    }

    int dim() const noexcept { return n_; }
    const Variant& variant() const noexcept { return v_; }

    bool is_constant() const {
        return std::visit(
            [](const auto& v) -> bool {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    return true;
                } else if constexpr (std::is_same_v<T, ExpressionEntries>) {
                    for (const auto& e : v.entries)
                        if (!e.is_constant()) return false;
                    return true;
                } else if constexpr (std::is_same_v<T, Decomposed>) {
                    return v.inner->is_constant();
                } else {
                    return false;
                }
            },
            v_);
    }

    // Depends on y only through |y|.
    bool is_radial() const {
        return std::visit(
            [](const auto& v) -> bool {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, ExpressionEntries>) {
                    for (const auto& e : v.entries)
                        if (e.uses_coordinates()) return false;
                    return true;
                } else if constexpr (std::is_same_v<T, Decomposed>) {
                    return v.inner->is_radial();
                } else {
                    return true;
                }
            },
            v_);
    }

    void evaluate_into(std::span<const double> y, Matrix& out) const {
        if (static_cast<int>(y.size()) != n_) throw Error("matrix family evaluated at a point of wrong dimension");
        if (out.dim() != n_) out = Matrix(n_);
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, DiagonalInverseNorm>) {
                    double s = 0.0;
                    for (double c : y) s += c * c;
                    if (s == 0.0) throw SingularMatrix("diag(1/|y|) is undefined at y = 0");
                    const double inv = 1.0 / std::sqrt(s);
                    for (int i = 0; i < n_; ++i)
                        for (int j = 0; j < n_; ++j) out(i, j) = i == j ? inv : 0.0;
                } else if constexpr (std::is_same_v<T, Constant>) {
                    out = v.value;
                } else if constexpr (std::is_same_v<T, ExpressionEntries>) {
                    for (int i = 0; i < n_; ++i)
                        for (int j = 0; j < n_; ++j)
                            out(i, j) = v.entries[static_cast<std::size_t>(i * n_ + j)].eval(y);
                } else {
                    Matrix p(n_);
                    v.inner->evaluate_into(y, p);
                    out = v.lambda * p * v.q;
                }
            },
            v_);
    }

    Matrix operator()(std::span<const double> y) const {
        Matrix m(n_);
        evaluate_into(y, m);
        return m;
    }

    // Smallest entry of P(y) over the samples; +inf unless decomposed.
    double min_inner_entry(const std::vector<std::vector<double>>& samples) const {
        const auto* d = std::get_if<Decomposed>(&v_);
        double lo = std::numeric_limits<double>::infinity();
        if (!d) return lo;
        Matrix p(n_);
        for (const auto& y : samples) {
            d->inner->evaluate_into(y, p);
            for (double v : p.data()) lo = std::min(lo, v);
        }
        return lo;
    }

    std::string describe() const {
        return std::visit(
            [&](const auto& v) -> std::string {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, DiagonalInverseNorm>) {
                    return "diag-inverse-norm";
                } else if constexpr (std::is_same_v<T, Constant>) {
                    return "constant";
                } else if constexpr (std::is_same_v<T, ExpressionEntries>) {
                    return "expr";
                } else {
                    return "decomposed(" + v.inner->describe() + ")";
                }
            },
            v_);
    }

private:
    MatrixFamily(int n, Variant v) : n_(n), v_(std::move(v)) {
        if (n < 1) throw Error("matrix family dimension must be positive");
    }

    int n_ = 0;
    Variant v_;
};

// Minimum over samples of |det A(y)| / prod_j ||A_j(y)||.
inline double eta_margin(const MatrixFamily& fam, const std::vector<std::vector<double>>& samples) {
    double margin = std::numeric_limits<double>::infinity();
    Matrix a(fam.dim());
    for (const auto& y : samples) {
        fam.evaluate_into(y, a);
        margin = std::min(margin, eta_ratio(a));
    }
    return margin;
}

}  // namespace hausdorff
