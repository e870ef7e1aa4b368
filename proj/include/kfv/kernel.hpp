#pragma once

#include <functional>
#include <vector>

#include "kfv/mesh.hpp"

namespace kfv {

/// Derivative K' of an interaction potential, evaluable on [-2L, 2L]
/// (differences x_i - y range over that interval), with a sup-norm bound
/// over the spatial domain (-L, L).
///
/// Polynomial kernels carry their coefficients so that cell integrals use the
/// closed-form antiderivative; generic callables declare a quadrature
/// tolerance and are integrated with refined Gauss-Legendre rules.
class Kernel {
public:
    static Kernel zero(double L);
    /// K'(x) = coefficient * x (potential coefficient * x^2 / 2).
    static Kernel quadratic(double coefficient, double L);
    /// K'(x) = sum_m dcoeffs[m] * x^m.
    static Kernel polynomial(std::vector<double> dcoeffs, double L);
    static Kernel callable(std::function<double(double)> dk, double L, double quad_tol = 1e-12);

    double derivative(double x) const;
    /// Antiderivative of K', polynomial kernels only.
    double primitive(double u) const;

    bool is_polynomial() const { return !fn_; }
    double sup_norm_on_domain() const { return sup_; }
    double half_length() const { return L_; }
    double quad_tol() const { return tol_; }

private:
    Kernel() = default;
    std::vector<double> coeffs_;
    std::function<double(double)> fn_;
    double L_ = 0.0;
    double sup_ = 0.0;
    double tol_ = 1e-12;
};

struct KernelSet {
    Kernel k11, k12, k21, k22;
};

/// C_W = max{ ||K'_11|| + ||K'_12||, ||K'_22|| + ||K'_21|| } over (-L, L).
double cw_constant(const KernelSet& ks);

/// w[i][k] = integral of K'(x_i - y) over the x-cell k. Precomputed once per
/// mesh; the interaction term becomes a matrix-vector product per species.
class WeightTable {
public:
    static WeightTable build(const Mesh& mesh, const Kernel& kernel);

    double at(int i, int k) const { return w_[static_cast<size_t>(i) * nx_ + k]; }
    int nx() const { return nx_; }

private:
    int nx_ = 0;
    std::vector<double> w_;
};

struct WeightTables {
    WeightTable w11, w12, w21, w22;
    static WeightTables build(const Mesh& mesh, const KernelSet& ks);
};

} // namespace kfv
