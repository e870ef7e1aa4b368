#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "kfv/kernel.hpp"
#include "kfv/mesh.hpp"

namespace kfv {

/// Row-major (i, j) field of cell averages on a phase-space mesh.
struct Field {
    int nx = 0, nv = 0;
    std::vector<double> a;

    Field() = default;
    Field(int nx_, int nv_) : nx(nx_), nv(nv_), a(static_cast<size_t>(nx_) * nv_, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * nv + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * nv + j]; }
};

/// Cell-averaged densities of both species at one time level.
struct PhaseState {
    long n = 0;
    double t = 0.0;
    Field f, g;
};

/// Per-x-cell densities rho_i = sum_j dv_j f_ij (eta for g), summed in
/// ascending j order so results are bit-reproducible.
struct MacroDensity {
    std::vector<double> rho, eta;
};

/// Drift values at x-cell centers.
struct InteractionField {
    std::vector<double> ups_f, ups_g;
};

using Evaluator = std::function<double(double, double)>;

/// Cell averages of an initial datum via tensor-product 3x3 Gauss-Legendre
/// quadrature. Values in (-1e-15, 0) are clamped to 0; non-finite evaluator
/// output raises StateError naming the cell.
Field discretize_component(const Mesh& mesh, const Evaluator& p0, const char* name);
PhaseState discretize_initial(const Mesh& mesh, const Evaluator& f0, const Evaluator& g0);

MacroDensity macro_density(const PhaseState& state, const Mesh& mesh);

/// ups_f[i] = sum_k (rho_k w11[i][k] + eta_k w12[i][k]), ascending k;
/// ups_g[i] = sum_k (eta_k w22[i][k] + rho_k w21[i][k]).
InteractionField interaction(const WeightTables& w, const MacroDensity& md);

/// sum_i dx_i (sum_j dv_j p_ij), fixed ascending order in both loops.
double total_mass(const Field& p, const Mesh& mesh);

/// CSV dump: header i,j,x_center,v_center,dx,dv,f,g; rows lexicographic in
/// (i, j); floats with 17 significant digits.
void write_snapshot_csv(std::ostream& os, const PhaseState& state, const Mesh& mesh);

} // namespace kfv
