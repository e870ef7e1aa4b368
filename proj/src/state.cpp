#include "kfv/state.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "kfv/error.hpp"
#include "kfv/io.hpp"

namespace kfv {
namespace {

constexpr double kG3Nodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double kG3Weights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

} // namespace

Field discretize_component(const Mesh& mesh, const Evaluator& p0, const char* name) {
    const int nx = mesh.nx();
    const int nv = mesh.nv();
    Field out(nx, nv);
    for (int i = 0; i < nx; ++i) {
        const double xm = mesh.x_center(i);
        const double xr = 0.5 * mesh.dx(i);
        for (int j = 0; j < nv; ++j) {
            const double vm = mesh.v_center(j);
            const double vr = 0.5 * mesh.dv(j);
            double avg = 0.0;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    avg += 0.25 * kG3Weights[a] * kG3Weights[b] *
                           p0(xm + xr * kG3Nodes[a], vm + vr * kG3Nodes[b]);
                }
            }
            if (!std::isfinite(avg)) {
                throw StateError(std::string(name) + " evaluator produced a non-finite cell average at (i=" +
                                 std::to_string(i) + ", j=" + std::to_string(j) + ")");
            }
            if (avg > -1e-15 && avg < 0.0) avg = 0.0; // quadrature noise on nonnegative data
            out(i, j) = avg;
        }
    }
    return out;
}

PhaseState discretize_initial(const Mesh& mesh, const Evaluator& f0, const Evaluator& g0) {
    PhaseState s;
    s.n = 0;
    s.t = 0.0;
    s.f = discretize_component(mesh, f0, "f0");
    s.g = discretize_component(mesh, g0, "g0");
    return s;
}

MacroDensity macro_density(const PhaseState& state, const Mesh& mesh) {
    const int nx = mesh.nx();
    const int nv = mesh.nv();
    MacroDensity md;
    md.rho.assign(nx, 0.0);
    md.eta.assign(nx, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) {
        double r = 0.0, e = 0.0;
        for (int j = 0; j < nv; ++j) {
            r += mesh.dv(j) * state.f(i, j);
            e += mesh.dv(j) * state.g(i, j);
        }
        md.rho[i] = r;
        md.eta[i] = e;
    }
    return md;
}

InteractionField interaction(const WeightTables& w, const MacroDensity& md) {
    const int nx = static_cast<int>(md.rho.size());
    InteractionField ups;
    ups.ups_f.assign(nx, 0.0);
    ups.ups_g.assign(nx, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) {
        double uf = 0.0, ug = 0.0;
        for (int k = 0; k < nx; ++k) {
            uf += md.rho[k] * w.w11.at(i, k) + md.eta[k] * w.w12.at(i, k);
            ug += md.eta[k] * w.w22.at(i, k) + md.rho[k] * w.w21.at(i, k);
        }
        ups.ups_f[i] = uf;
        ups.ups_g[i] = ug;
    }
    return ups;
}

double total_mass(const Field& p, const Mesh& mesh) {
    double mass = 0.0;
    for (int i = 0; i < p.nx; ++i) {
        double row = 0.0;
        for (int j = 0; j < p.nv; ++j) row += mesh.dv(j) * p(i, j);
        mass += mesh.dx(i) * row;
    }
    return mass;
}

void write_snapshot_csv(std::ostream& os, const PhaseState& state, const Mesh& mesh) {
    os << "i,j,x_center,v_center,dx,dv,f,g\n";
    for (int i = 0; i < mesh.nx(); ++i) {
        for (int j = 0; j < mesh.nv(); ++j) {
            os << i << ',' << j << ',' << fmt17(mesh.x_center(i)) << ',' << fmt17(mesh.v_center(j))
               << ',' << fmt17(mesh.dx(i)) << ',' << fmt17(mesh.dv(j)) << ','
               << fmt17(state.f(i, j)) << ',' << fmt17(state.g(i, j)) << '\n';
        }
    }
}

} // namespace kfv
