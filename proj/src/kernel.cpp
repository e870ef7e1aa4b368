#include "kfv/kernel.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "kfv/error.hpp"

namespace kfv {
namespace {

constexpr double kGl4Nodes[4] = {-0.8611363115940526, -0.3399810435848563,
                                 0.3399810435848563, 0.8611363115940526};
constexpr double kGl4Weights[4] = {0.3478548451374538, 0.6521451548625461,
                                   0.6521451548625461, 0.3478548451374538};

double gl4_panel(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double rad = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < 4; ++q) s += kGl4Weights[q] * f(mid + rad * kGl4Nodes[q]);
    return s * rad;
}

double gl4_composite(const std::function<double(double)>& f, double a, double b, long panels) {
    const double w = (b - a) / panels;
    double s = 0.0;
    for (long p = 0; p < panels; ++p) s += gl4_panel(f, a + p * w, a + (p + 1) * w);
    return s;
}

} // namespace

Kernel Kernel::zero(double L) {
    if (L <= 0.0) throw KernelError("kernel domain half-length must be positive");
    Kernel k;
    k.L_ = L;
    k.sup_ = 0.0;
    return k;
}

Kernel Kernel::quadratic(double coefficient, double L) {
    if (L <= 0.0) throw KernelError("kernel domain half-length must be positive");
    Kernel k;
    k.coeffs_ = {0.0, coefficient};
    k.L_ = L;
    k.sup_ = std::abs(coefficient) * L;
    return k;
}

Kernel Kernel::polynomial(std::vector<double> dcoeffs, double L) {
    if (L <= 0.0) throw KernelError("kernel domain half-length must be positive");
    while (!dcoeffs.empty() && dcoeffs.back() == 0.0) dcoeffs.pop_back();
    Kernel k;
    k.coeffs_ = std::move(dcoeffs);
    k.L_ = L;
    // sum_m |c_m| L^m dominates sup |K'| on (-L, L).
    double bound = 0.0;
    double pw = 1.0;
    for (double c : k.coeffs_) {
        bound += std::abs(c) * pw;
        pw *= L;
    }
    k.sup_ = bound;
    return k;
}

Kernel Kernel::callable(std::function<double(double)> dk, double L, double quad_tol) {
    if (L <= 0.0) throw KernelError("kernel domain half-length must be positive");
    if (!(quad_tol > 0.0)) throw KernelError("quadrature tolerance must be positive");
    Kernel k;
    k.fn_ = std::move(dk);
    k.L_ = L;
    k.tol_ = quad_tol;
    // Sampled sup bound over (-L, L).
    const int n = 4096;
    double sup = 0.0;
    for (int s = 0; s <= n; ++s) {
        const double x = -L + 2.0 * L * s / n;
        const double val = std::abs(k.fn_(x));
        if (!std::isfinite(val)) {
            throw KernelError("kernel derivative is non-finite at x = " + std::to_string(x));
        }
        sup = std::max(sup, val);
    }
    k.sup_ = sup;
    return k;
}

double Kernel::derivative(double x) const {
    if (fn_) return fn_(x);
    double r = 0.0;
    for (size_t m = coeffs_.size(); m-- > 0;) r = r * x + coeffs_[m];
    return r;
}

double Kernel::primitive(double u) const {
    if (fn_) throw KernelError("primitive requires a polynomial kernel");
    double r = 0.0;
    for (size_t m = coeffs_.size(); m-- > 0;) r = r * u + coeffs_[m] / static_cast<double>(m + 1);
    return r * u;
}

double cw_constant(const KernelSet& ks) {
    const double L = ks.k11.half_length();
    if (ks.k12.half_length() != L || ks.k21.half_length() != L || ks.k22.half_length() != L) {
        throw KernelError("all four kernels must share the same domain half-length");
    }
    const double row_f = ks.k11.sup_norm_on_domain() + ks.k12.sup_norm_on_domain();
    const double row_g = ks.k22.sup_norm_on_domain() + ks.k21.sup_norm_on_domain();
    return std::max(row_f, row_g);
}

WeightTable WeightTable::build(const Mesh& mesh, const Kernel& kernel) {
    const int nx = mesh.nx();
    const auto& xc = mesh.x_centers();
    const auto& xif = mesh.x_interfaces();

    WeightTable table;
    table.nx_ = nx;
    table.w_.assign(static_cast<size_t>(nx) * nx, 0.0);

    if (kernel.is_polynomial()) {
        // Exact cell integrals: int_a^b K'(x_i - y) dy = P(x_i - a) - P(x_i - b).
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nx; ++i) {
            for (int k = 0; k < nx; ++k) {
                table.w_[static_cast<size_t>(i) * nx + k] =
                    kernel.primitive(xc[i] - xif[k]) - kernel.primitive(xc[i] - xif[k + 1]);
            }
        }
        return table;
    }

    const double tol = kernel.quad_tol();
    constexpr int kMaxRounds = 14;
    std::atomic<long> failed{-1};
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) {
        for (int k = 0; k < nx; ++k) {
            if (failed.load(std::memory_order_relaxed) >= 0) continue;
            const double a = xif[k];
            const double b = xif[k + 1];
            auto f = [&](double y) { return kernel.derivative(xc[i] - y); };
            double prev = gl4_composite(f, a, b, 1);
            bool converged = false;
            for (int r = 1; r <= kMaxRounds; ++r) {
                const double cur = gl4_composite(f, a, b, 1L << r);
                if (std::abs(cur - prev) < tol) {
                    prev = cur;
                    converged = true;
                    break;
                }
                prev = cur;
            }
            if (!converged) {
                long cell = static_cast<long>(i) * nx + k;
                long expected = -1;
                failed.compare_exchange_strong(expected, cell);
                continue;
            }
            table.w_[static_cast<size_t>(i) * nx + k] = prev;
        }
    }
    if (long cell = failed.load(); cell >= 0) {
        throw KernelError("weight-table quadrature did not converge for cell (i=" +
                          std::to_string(cell / nx) + ", k=" + std::to_string(cell % nx) + ")");
    }
    return table;
}

WeightTables WeightTables::build(const Mesh& mesh, const KernelSet& ks) {
    return WeightTables{WeightTable::build(mesh, ks.k11), WeightTable::build(mesh, ks.k12),
                        WeightTable::build(mesh, ks.k21), WeightTable::build(mesh, ks.k22)};
}

} // namespace kfv
