#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "kfv/kernel.hpp"
#include "kfv/scheme.hpp"
#include "kfv/state.hpp"

namespace kfv {

/// Coarse-interface -> fine-interface index maps for a nested mesh pair.
struct RestrictionMap {
    std::vector<int> x_map, v_map;
};

/// Builds the interface correspondence; errors on the first coarse interface
/// that is not present in the fine mesh.
RestrictionMap build_restriction(const Mesh& fine, const Mesh& coarse);

/// Measure-weighted average of fine children onto each coarse cell (the exact
/// L2 projection onto coarse piecewise constants).
void restrict_into(const Field& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh,
                   const RestrictionMap& map, Field& out);
Field restrict_field(const Field& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh);

/// Streaming space-time error accumulator over a shared coarse grid:
/// err1 += w dt * sum |C| (|df| + |dg|), err2 += w dt * sum |C| (df^2 + dg^2).
class ErrorAccumulator {
public:
    void add(const Field& fa, const Field& ga, const Field& fb, const Field& gb,
             const Mesh& mesh, double weight_dt);
    double err1() const { return err1_; }
    double err2() const { return err2_; }

private:
    double err1_ = 0.0, err2_ = 0.0;
};

/// Convenience form over whole trajectories sampled on one grid.
std::pair<double, double> error_norms(const std::vector<PhaseState>& run_a,
                                      const std::vector<PhaseState>& run_b,
                                      const Mesh& mesh, double dt);

/// EOC_l = (ln err_{l-1} - ln err_l) / (ln s_{l-1} - ln s_l) for l >= 2.
/// Steps must be strictly decreasing; a nonpositive error makes that level's
/// EOC absent.
std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& steps);

struct LevelRow {
    int level = 0;
    long xv_cells = 0;
    long txv_cells = 0;
    double dt = 0, alpha_h = 0, h = 0;
    double err1 = 0, err2 = 0;
    std::optional<double> eoc1, eoc2;
};

struct ErrorReport {
    std::vector<LevelRow> rows;
    std::string study;           // "time" or "space"
    std::string mesh_family;     // for space studies
    int reference_level = 0;
};

enum class MeshFamily { Equidistant, PaperNonequidistant };

/// Refinement study in dt on a fixed phase-space mesh: dt_l = base_dt/2^(l-1),
/// reference run reference_extra_levels further, errors accumulated with the
/// reference sampled at each coarse level's time nodes (left endpoints).
ErrorReport run_time_eoc(const Mesh& mesh, const KernelSet& kernels,
                         const Evaluator& f0, const Evaluator& g0,
                         double base_dt, double T, int levels,
                         int reference_extra_levels, double xi);

/// Refinement study in h: bisection hierarchy from level1_mesh, fixed dt;
/// the reference solution is restricted onto each level before comparison.
ErrorReport run_space_eoc(const Mesh& level1_mesh, const KernelSet& kernels,
                          const Evaluator& f0, const Evaluator& g0,
                          double dt, double T, int levels,
                          int reference_extra_levels, double xi,
                          MeshFamily family);

/// CSV: level,xv_cells,txv_cells,dt,alpha_h,h,err1,eoc1,err2,eoc2 with absent
/// EOC entries serialized as empty fields.
void write_eoc_csv(std::ostream& os, const ErrorReport& report);

} // namespace kfv
