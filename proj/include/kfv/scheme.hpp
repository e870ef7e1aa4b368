#pragma once

#include <string>
#include <vector>

#include "kfv/state.hpp"

namespace kfv {

struct CflReport {
    bool ok = true;
    double worst = 0.0; ///< max over cells/species of (dt/|C|)(dv|v_j| + dx|ups_i|)
    double limit = 1.0; ///< 1 - xi
    int i = -1, j = -1;
    char species = 'f';
    std::string describe() const;
};

/// (1 - xi) * alpha * h / (v_h + C_W), with v_h the outermost velocity
/// interface magnitude of the mesh. Satisfying dt <= this bound makes the
/// per-cell CFL condition hold uniformly in n for unit total mass.
double max_stable_dt(const Mesh& mesh, double cw, double xi);

/// Per-cell CFL check for both species; reports the maximizing cell.
CflReport cfl_check(double dt, const Mesh& mesh, const InteractionField& ups, double xi);

/// Staggered interface fluxes of one species for one step.
/// xf(m, j) is the flux through x_{m-1/2} for m = 0..nx; periodicity gives
/// xf(0, j) == xf(nx, j) by construction.
/// vf(i, m) is the flux through v_{m-1/2} for m = 0..nv; no-flux boundaries
/// give vf(i, 0) == vf(i, nv) == 0.
struct SpeciesFluxes {
    int nx = 0, nv = 0;
    std::vector<double> xf; // (nx+1) * nv
    std::vector<double> vf; // nx * (nv+1)

    double xflux(int m, int j) const { return xf[static_cast<size_t>(m) * nv + j]; }
    double vflux(int i, int m) const { return vf[static_cast<size_t>(i) * (nv + 1) + m]; }
};

SpeciesFluxes compute_fluxes(const Field& p, const Mesh& mesh,
                             const std::vector<double>& drift, double dt);

/// Reference implementation: assemble upwind interface fluxes, then apply the
/// conservative update. Serial.
PhaseState step_flux_form(const PhaseState& state, const Mesh& mesh,
                          const InteractionField& ups, double dt);

/// Production implementation: five-point convex-combination stencil with the
/// same boundary treatment, parallel over cells. Algebraically identical to
/// the flux form; nonnegative inputs stay nonnegative under the CFL
/// condition because every stencil coefficient is nonnegative.
PhaseState step_convex_form(const PhaseState& state, const Mesh& mesh,
                            const InteractionField& ups, double dt);

enum class StepForm { FluxForm, ConvexForm };

struct SchemeParams {
    enum class CflMode { Auto, Fixed };
    double dt = 0.0;
    double xi = 0.1;
    double T = 0.0;
    CflMode mode = CflMode::Auto;
};

/// Explicit time loop: density and drift are recomputed from the time-n state
/// each step, a truncated final step lands exactly on T, and (in fixed-dt
/// mode) the CFL condition is re-checked every step.
class Simulation {
public:
    Simulation(const Mesh& mesh, const WeightTables& weights, PhaseState initial,
               double dt, double T, double xi, bool recheck_cfl,
               StepForm form = StepForm::ConvexForm);

    bool done() const { return state_.n >= n_total_; }
    /// Advance one step. Throws CflError if the per-step guard trips.
    void advance();
    void run_to_end();

    long total_steps() const { return n_total_; }
    double dt() const { return dt_; }
    const PhaseState& state() const { return state_; }
    const Mesh& mesh() const { return *mesh_; }
    /// Drift field used by the most recent step.
    const InteractionField& last_drift() const { return ups_; }

private:
    const Mesh* mesh_;
    const WeightTables* weights_;
    PhaseState state_;
    double dt_, T_, xi_;
    bool recheck_;
    StepForm form_;
    long n_total_;
    InteractionField ups_;
};

} // namespace kfv
