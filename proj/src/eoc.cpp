#include "kfv/eoc.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "kfv/error.hpp"
#include "kfv/io.hpp"

namespace kfv {
namespace {

// Matches each coarse interface to a fine interface index. Meshes produced by
// bisection share interfaces bit-exactly; the tolerance only absorbs
// independently constructed hierarchies.
std::vector<int> match_interfaces(const std::vector<double>& fine,
                                  const std::vector<double>& coarse, const char* which) {
    std::vector<int> map(coarse.size(), -1);
    size_t fi = 0;
    for (size_t c = 0; c < coarse.size(); ++c) {
        const double target = coarse[c];
        const double tol = 1e-12 * std::max(1.0, std::abs(target));
        while (fi < fine.size() && fine[fi] < target - tol) ++fi;
        if (fi >= fine.size() || std::abs(fine[fi] - target) > tol) {
            throw EocError(std::string("meshes are not nested: coarse ") + which + "-interface " +
                           fmt17(target) + " (index " + std::to_string(c) +
                           ") has no matching fine interface");
        }
        map[c] = static_cast<int>(fi);
    }
    return map;
}

long checked_step_count(double T, double dt, const char* what) {
    if (!(dt > 0.0)) throw EocError(std::string(what) + ": dt must be positive");
    if (!(T > 0.0)) throw EocError(std::string(what) + ": final time must be positive");
    const double q = T / dt;
    const long n = std::lround(q);
    if (n < 1 || std::abs(n - q) > 1e-9 * std::max(1.0, q)) {
        throw EocError(std::string(what) + ": T must be an integer multiple of dt");
    }
    return n;
}

LevelRow make_row(int level, const Mesh& mesh, double dt, long steps, double err1, double err2) {
    LevelRow row;
    row.level = level;
    row.xv_cells = mesh.cell_count();
    row.txv_cells = mesh.cell_count() * steps;
    row.dt = dt;
    row.alpha_h = mesh.min_width();
    row.h = mesh.h();
    row.err1 = err1;
    row.err2 = err2;
    return row;
}

void attach_eoc(std::vector<LevelRow>& rows, const std::vector<double>& steps) {
    std::vector<double> e1, e2;
    for (const auto& r : rows) {
        e1.push_back(r.err1);
        e2.push_back(r.err2);
    }
    const auto o1 = eoc(e1, steps);
    const auto o2 = eoc(e2, steps);
    for (size_t k = 1; k < rows.size(); ++k) {
        rows[k].eoc1 = o1[k - 1];
        rows[k].eoc2 = o2[k - 1];
    }
}

} // namespace

RestrictionMap build_restriction(const Mesh& fine, const Mesh& coarse) {
    RestrictionMap map;
    map.x_map = match_interfaces(fine.x_interfaces(), coarse.x_interfaces(), "x");
    map.v_map = match_interfaces(fine.v_interfaces(), coarse.v_interfaces(), "v");
    return map;
}

void restrict_into(const Field& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh,
                   const RestrictionMap& map, Field& out) {
    const int cnx = coarse_mesh.nx();
    const int cnv = coarse_mesh.nv();
    if (out.nx != cnx || out.nv != cnv) out = Field(cnx, cnv);
#pragma omp parallel for schedule(static)
    for (int I = 0; I < cnx; ++I) {
        for (int J = 0; J < cnv; ++J) {
            double sum = 0.0;
            for (int i = map.x_map[I]; i < map.x_map[I + 1]; ++i) {
                double row = 0.0;
                for (int j = map.v_map[J]; j < map.v_map[J + 1]; ++j) {
                    row += fine_mesh.dv(j) * fine(i, j);
                }
                sum += fine_mesh.dx(i) * row;
            }
            out(I, J) = sum / coarse_mesh.cell_measure(I, J);
        }
    }
}

Field restrict_field(const Field& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh) {
    const RestrictionMap map = build_restriction(fine_mesh, coarse_mesh);
    Field out(coarse_mesh.nx(), coarse_mesh.nv());
    restrict_into(fine, fine_mesh, coarse_mesh, map, out);
    return out;
}

void ErrorAccumulator::add(const Field& fa, const Field& ga, const Field& fb, const Field& gb,
                           const Mesh& mesh, double weight_dt) {
    if (fa.nx != fb.nx || fa.nv != fb.nv || ga.nx != gb.nx || ga.nv != gb.nv) {
        throw EocError("error accumulation requires fields on the same grid");
    }
    double e1 = 0.0, e2 = 0.0;
    for (int i = 0; i < fa.nx; ++i) {
        double row1 = 0.0, row2 = 0.0;
        for (int j = 0; j < fa.nv; ++j) {
            const double df = fa(i, j) - fb(i, j);
            const double dg = ga(i, j) - gb(i, j);
            const double dv = mesh.dv(j);
            row1 += dv * (std::abs(df) + std::abs(dg));
            row2 += dv * (df * df + dg * dg);
        }
        e1 += mesh.dx(i) * row1;
        e2 += mesh.dx(i) * row2;
    }
    err1_ += weight_dt * e1;
    err2_ += weight_dt * e2;
}

std::pair<double, double> error_norms(const std::vector<PhaseState>& run_a,
                                      const std::vector<PhaseState>& run_b,
                                      const Mesh& mesh, double dt) {
    if (run_a.size() != run_b.size()) {
        throw EocError("trajectories have different numbers of snapshots");
    }
    ErrorAccumulator acc;
    for (size_t n = 0; n < run_a.size(); ++n) {
        acc.add(run_a[n].f, run_a[n].g, run_b[n].f, run_b[n].g, mesh, dt);
    }
    return {acc.err1(), acc.err2()};
}

std::vector<std::optional<double>> eoc(const std::vector<double>& errors,
                                       const std::vector<double>& steps) {
    if (errors.size() != steps.size()) throw EocError("errors and steps must have equal length");
    if (errors.size() < 2) throw EocError("EOC needs at least two levels");
    for (size_t k = 0; k < steps.size(); ++k) {
        if (!(steps[k] > 0.0)) throw EocError("step sizes must be positive");
        if (k > 0 && !(steps[k] < steps[k - 1])) {
            throw EocError("step sizes must be strictly decreasing");
        }
    }
    std::vector<std::optional<double>> out;
    out.reserve(errors.size() - 1);
    for (size_t k = 1; k < errors.size(); ++k) {
        if (errors[k - 1] > 0.0 && errors[k] > 0.0) {
            out.push_back((std::log(errors[k - 1]) - std::log(errors[k])) /
                          (std::log(steps[k - 1]) - std::log(steps[k])));
        } else {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

ErrorReport run_time_eoc(const Mesh& mesh, const KernelSet& kernels,
                         const Evaluator& f0, const Evaluator& g0,
                         double base_dt, double T, int levels,
                         int reference_extra_levels, double xi) {
    if (levels < 2) throw EocError("time study needs at least 2 levels");
    if (reference_extra_levels < 1) throw EocError("reference must be finer than the last level");
    const int ref_level = levels + reference_extra_levels;
    const long n1 = checked_step_count(T, base_dt, "time study");

    const WeightTables weights = WeightTables::build(mesh, kernels);
    const PhaseState init = discretize_initial(mesh, f0, g0);

    std::vector<Simulation> sims;
    sims.reserve(levels);
    std::vector<double> dts(levels);
    for (int l = 1; l <= levels; ++l) {
        dts[l - 1] = std::ldexp(base_dt, -(l - 1));
        sims.emplace_back(mesh, weights, init, dts[l - 1], T, xi, /*recheck_cfl=*/true);
    }
    Simulation ref(mesh, weights, init, std::ldexp(base_dt, -(ref_level - 1)), T, xi, true);

    std::vector<ErrorAccumulator> accs(levels);
    const long n_ref = n1 << (ref_level - 1);
    for (long nr = 0; nr < n_ref; ++nr) {
        for (int l = 1; l <= levels; ++l) {
            const long stride = 1L << (ref_level - l);
            if (nr % stride == 0) {
                accs[l - 1].add(sims[l - 1].state().f, sims[l - 1].state().g,
                                ref.state().f, ref.state().g, mesh, dts[l - 1]);
            }
        }
        ref.advance();
        for (int l = 1; l <= levels; ++l) {
            const long stride = 1L << (ref_level - l);
            if ((nr + 1) % stride == 0) sims[l - 1].advance();
        }
    }

    ErrorReport report;
    report.study = "time";
    report.reference_level = ref_level;
    for (int l = 1; l <= levels; ++l) {
        report.rows.push_back(make_row(l, mesh, dts[l - 1], n1 << (l - 1),
                                       accs[l - 1].err1(), accs[l - 1].err2()));
    }
    attach_eoc(report.rows, dts);
    return report;
}

ErrorReport run_space_eoc(const Mesh& level1_mesh, const KernelSet& kernels,
                          const Evaluator& f0, const Evaluator& g0,
                          double dt, double T, int levels,
                          int reference_extra_levels, double xi, MeshFamily family) {
    if (levels < 2) throw EocError("space study needs at least 2 levels");
    if (reference_extra_levels < 1) throw EocError("reference must be finer than the last level");
    const int ref_level = levels + reference_extra_levels;
    const long n_steps = checked_step_count(T, dt, "space study");

    std::vector<Mesh> meshes;
    meshes.reserve(ref_level);
    meshes.push_back(level1_mesh);
    for (int l = 2; l <= ref_level; ++l) meshes.push_back(meshes.back().bisected());
    const Mesh& ref_mesh = meshes.back();

    std::vector<WeightTables> weights;
    weights.reserve(ref_level);
    for (const Mesh& m : meshes) weights.push_back(WeightTables::build(m, kernels));

    std::vector<Simulation> sims;
    sims.reserve(levels);
    std::vector<RestrictionMap> maps;
    for (int l = 1; l <= levels; ++l) {
        sims.emplace_back(meshes[l - 1], weights[l - 1],
                          discretize_initial(meshes[l - 1], f0, g0), dt, T, xi, true);
        maps.push_back(build_restriction(ref_mesh, meshes[l - 1]));
    }
    Simulation ref(ref_mesh, weights.back(), discretize_initial(ref_mesh, f0, g0), dt, T, xi, true);

    std::vector<ErrorAccumulator> accs(levels);
    std::vector<Field> rf(levels), rg(levels);
    for (long n = 0; n < n_steps; ++n) {
        for (int l = 1; l <= levels; ++l) {
            restrict_into(ref.state().f, ref_mesh, meshes[l - 1], maps[l - 1], rf[l - 1]);
            restrict_into(ref.state().g, ref_mesh, meshes[l - 1], maps[l - 1], rg[l - 1]);
            accs[l - 1].add(sims[l - 1].state().f, sims[l - 1].state().g, rf[l - 1], rg[l - 1],
                            meshes[l - 1], dt);
        }
        ref.advance();
        for (auto& sim : sims) sim.advance();
    }

    ErrorReport report;
    report.study = "space";
    report.mesh_family = (family == MeshFamily::Equidistant) ? "equidistant" : "paper_nonequidistant";
    report.reference_level = ref_level;
    std::vector<double> hs;
    for (int l = 1; l <= levels; ++l) {
        report.rows.push_back(make_row(l, meshes[l - 1], dt, n_steps,
                                       accs[l - 1].err1(), accs[l - 1].err2()));
        hs.push_back(meshes[l - 1].h());
    }
    attach_eoc(report.rows, hs);
    return report;
}

void write_eoc_csv(std::ostream& os, const ErrorReport& report) {
    os << "level,xv_cells,txv_cells,dt,alpha_h,h,err1,eoc1,err2,eoc2\n";
    for (const auto& r : report.rows) {
        os << r.level << ',' << r.xv_cells << ',' << r.txv_cells << ',' << fmt17(r.dt) << ','
           << fmt17(r.alpha_h) << ',' << fmt17(r.h) << ',' << fmt17(r.err1) << ','
           << (r.eoc1 ? fmt17(*r.eoc1) : std::string()) << ',' << fmt17(r.err2) << ','
           << (r.eoc2 ? fmt17(*r.eoc2) : std::string()) << '\n';
    }
}

} // namespace kfv
