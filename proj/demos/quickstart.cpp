// Build an operator, certify it, apply it and compare both sides of the
// W^{k,1} inequality.

#include <hausdorff/classical.hpp>
#include <hausdorff/sobolev.hpp>

#include <cstdio>
#include <vector>

using namespace hausdorff;

int main() {
    const auto kernel = make_kernel("chi(1,2)(nrm(y))", "annulus(1,2)", 1);
    const auto family = MatrixFamily::diagonal_inverse_norm(1);
    const HausdorffOperator op(kernel, family);

    for (int k = 0; k <= 2; ++k) {
        const auto cert = certify(kernel, family, k);
        std::printf("k=%d  %s  C_k=%.10g\n", k, to_string(cert.verdict), cert.condition.quad.value);
    }

    const auto f = preset_gauss(1);
    for (double x : {0.0, 0.5, 1.0, 2.0}) {
        const std::vector<double> p{x};
        std::printf("H f(%.1f) = %.12f\n", x, op.apply(f, p, 1e-12).value);
    }

    const int k = 1;
    const auto cond = op.condition(k);
    const double lhs = wk1_norm_operator_image(op, f, k, 1e-9, cond).total;
    const double rhs = kappa(1, k) * cond.quad.value * wk1_norm(f, k, 1e-10).total;
    std::printf("||Hf||_{W^{1,1}} = %.8f <= %.8f\n", lhs, rhs);

    for (const auto& row : proposition_report(1)) {
        std::printf("%-2s k=%d  %s\n", to_string(row.which), row.k, to_string(row.certificate.verdict));
    }
    return 0;
}
