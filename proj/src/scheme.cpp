#include "kfv/scheme.hpp"

#include <cmath>
#include <sstream>

#include "kfv/error.hpp"

namespace kfv {
namespace {

inline double pos_part(double x) { return x > 0.0 ? x : 0.0; }
inline double neg_part(double x) { return x < 0.0 ? -x : 0.0; }

// Upwind stencil update for one species. Periodic index wrap in x realizes
// the virtual-cell boundary condition; the velocity boundary terms are the
// flux-form no-flux conditions written out, so both step forms share the
// exact same boundary algebra.
void convex_update(const Field& p, Field& out, const Mesh& mesh,
                   const std::vector<double>& drift, double dt) {
    const int nx = p.nx;
    const int nv = p.nv;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i) {
        const double u = drift[i];
        const double up = pos_part(u);
        const double um = neg_part(u);
        const double ax = dt / mesh.dx(i);
        const int il = (i == 0) ? nx - 1 : i - 1;
        const int ir = (i == nx - 1) ? 0 : i + 1;
        for (int j = 0; j < nv; ++j) {
            const double vj = mesh.v_center(j);
            const double vp = pos_part(vj);
            const double vm = neg_part(vj);
            const double av = dt / mesh.dv(j);
            const bool has_above = (j < nv - 1);
            const bool has_below = (j > 0);
            const double out_v = (has_above ? um : 0.0) + (has_below ? up : 0.0);
            double val = (1.0 - ax * (vp + vm) - av * out_v) * p(i, j);
            val += ax * (vp * p(il, j) + vm * p(ir, j));
            if (has_above) val += av * up * p(i, j + 1);
            if (has_below) val += av * um * p(i, j - 1);
            out(i, j) = val;
        }
    }
}

} // namespace

std::string CflReport::describe() const {
    std::ostringstream ss;
    ss << "worst cell (i=" << i << ", j=" << j << ", species=" << species
       << ") has CFL number " << worst << " > " << limit;
    return ss.str();
}

double max_stable_dt(const Mesh& mesh, double cw, double xi) {
    return (1.0 - xi) * mesh.alpha() * mesh.h() / (mesh.v_max_abs() + cw);
}

CflReport cfl_check(double dt, const Mesh& mesh, const InteractionField& ups, double xi) {
    CflReport rep;
    rep.limit = 1.0 - xi;
    const int nx = mesh.nx();
    const int nv = mesh.nv();
    for (int s = 0; s < 2; ++s) {
        const std::vector<double>& drift = (s == 0) ? ups.ups_f : ups.ups_g;
        for (int i = 0; i < nx; ++i) {
            const double dxi = mesh.dx(i);
            const double au = std::abs(drift[i]);
            for (int j = 0; j < nv; ++j) {
                const double number = dt * (std::abs(mesh.v_center(j)) / dxi + au / mesh.dv(j));
                if (number > rep.worst) {
                    rep.worst = number;
                    rep.i = i;
                    rep.j = j;
                    rep.species = (s == 0) ? 'f' : 'g';
                }
            }
        }
    }
    rep.ok = rep.worst <= rep.limit;
    return rep;
}

SpeciesFluxes compute_fluxes(const Field& p, const Mesh& mesh,
                             const std::vector<double>& drift, double dt) {
    const int nx = p.nx;
    const int nv = p.nv;
    SpeciesFluxes fl;
    fl.nx = nx;
    fl.nv = nv;
    fl.xf.assign(static_cast<size_t>(nx + 1) * nv, 0.0);
    fl.vf.assign(static_cast<size_t>(nx) * (nv + 1), 0.0);

    // x-interfaces: m = 1..nx between cells m-1 and m (wrap at m = nx);
    // m = 0 mirrors m = nx so the periodicity invariant holds bit-exactly.
    for (int m = 1; m <= nx; ++m) {
        const int il = m - 1;
        const int ir = (m == nx) ? 0 : m;
        for (int j = 0; j < nv; ++j) {
            const double vj = mesh.v_center(j);
            fl.xf[static_cast<size_t>(m) * nv + j] =
                dt * mesh.dv(j) * (p(il, j) * pos_part(vj) - p(ir, j) * neg_part(vj));
        }
    }
    for (int j = 0; j < nv; ++j) {
        fl.xf[j] = fl.xf[static_cast<size_t>(nx) * nv + j];
    }

    // v-interfaces: m = 1..nv-1 interior; outermost stay zero (no-flux).
    for (int i = 0; i < nx; ++i) {
        const double u = drift[i];
        const double up = pos_part(u);
        const double um = neg_part(u);
        for (int m = 1; m < nv; ++m) {
            fl.vf[static_cast<size_t>(i) * (nv + 1) + m] =
                dt * mesh.dx(i) * (p(i, m - 1) * um - p(i, m) * up);
        }
    }
    return fl;
}

PhaseState step_flux_form(const PhaseState& state, const Mesh& mesh,
                          const InteractionField& ups, double dt) {
    const int nx = mesh.nx();
    const int nv = mesh.nv();
    PhaseState next;
    next.n = state.n + 1;
    next.t = state.t + dt;
    next.f = Field(nx, nv);
    next.g = Field(nx, nv);

    const Field* in[2] = {&state.f, &state.g};
    Field* out[2] = {&next.f, &next.g};
    const std::vector<double>* drift[2] = {&ups.ups_f, &ups.ups_g};
    for (int s = 0; s < 2; ++s) {
        const SpeciesFluxes fl = compute_fluxes(*in[s], mesh, *drift[s], dt);
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < nv; ++j) {
                const double div = fl.xflux(i + 1, j) - fl.xflux(i, j) +
                                   fl.vflux(i, j + 1) - fl.vflux(i, j);
                (*out[s])(i, j) = (*in[s])(i, j) - div / mesh.cell_measure(i, j);
            }
        }
    }
    return next;
}

PhaseState step_convex_form(const PhaseState& state, const Mesh& mesh,
                            const InteractionField& ups, double dt) {
    PhaseState next;
    next.n = state.n + 1;
    next.t = state.t + dt;
    next.f = Field(mesh.nx(), mesh.nv());
    next.g = Field(mesh.nx(), mesh.nv());
    convex_update(state.f, next.f, mesh, ups.ups_f, dt);
    convex_update(state.g, next.g, mesh, ups.ups_g, dt);
    return next;
}

Simulation::Simulation(const Mesh& mesh, const WeightTables& weights, PhaseState initial,
                       double dt, double T, double xi, bool recheck_cfl, StepForm form)
    : mesh_(&mesh),
      weights_(&weights),
      state_(std::move(initial)),
      dt_(dt),
      T_(T),
      xi_(xi),
      recheck_(recheck_cfl),
      form_(form) {
    if (!(dt_ > 0.0)) throw Error("time step must be positive");
    if (T_ < 0.0) throw Error("final time must be nonnegative");
    if (!(xi_ > 0.0 && xi_ < 1.0)) throw Error("CFL margin xi must lie in (0,1)");
    n_total_ = (T_ == 0.0) ? 0 : static_cast<long>(std::ceil(T_ / dt_ - 1e-9));
    if (T_ > 0.0 && n_total_ < 1) n_total_ = 1;
}

void Simulation::advance() {
    if (done()) return;
    const long n = state_.n;
    const MacroDensity md = macro_density(state_, *mesh_);
    ups_ = interaction(*weights_, md);

    const double t_next = (n + 1 == n_total_) ? T_ : dt_ * static_cast<double>(n + 1);
    const double dt_eff = t_next - state_.t;
    if (recheck_) {
        const CflReport rep = cfl_check(dt_eff, *mesh_, ups_, xi_);
        if (!rep.ok) throw CflError(n, rep.describe());
    }
    PhaseState next = (form_ == StepForm::FluxForm)
                          ? step_flux_form(state_, *mesh_, ups_, dt_eff)
                          : step_convex_form(state_, *mesh_, ups_, dt_eff);
    next.t = t_next;
    state_ = std::move(next);
}

void Simulation::run_to_end() {
    while (!done()) advance();
}

} // namespace kfv
