#include "kfv/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kfv/diagnostics.hpp"
#include "kfv/eoc.hpp"
#include "kfv/error.hpp"
#include "kfv/io.hpp"
#include "kfv/scheme.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace kfv {
namespace {

namespace fs = std::filesystem;

struct Prepared {
    Mesh mesh;
    KernelSet kernels;
    WeightTables weights;
    double cw = 0.0;
    InitialData init;
    PhaseState state0;
    double dt = 0.0;
    double max_dt = 0.0;
    double tail_threshold = 0.0;
};

Prepared prepare(const RunConfig& cfg) {
    Prepared p{build_mesh(cfg),
               build_kernels(cfg),
               WeightTables{},
               0.0,
               InitialData{},
               PhaseState{},
               0.0,
               0.0,
               0.0};
    p.cw = cw_constant(p.kernels);
    p.weights = WeightTables::build(p.mesh, p.kernels);
    p.init = build_initial(cfg, p.mesh.v_max_abs());
    p.state0 = build_initial_state(cfg, p.mesh, p.init);
    p.max_dt = max_stable_dt(p.mesh, p.cw, cfg.dt.xi);
    p.dt = (cfg.dt.mode == SchemeParams::CflMode::Auto) ? p.max_dt : cfg.dt.value;
    if (!(p.dt > 0.0)) throw Error("computed time step is not positive");
    p.tail_threshold = cfg.output.tail_threshold.value_or(0.5 * p.mesh.v_max_abs());
    if (p.tail_threshold > p.mesh.v_max_abs()) {
        throw ConfigError({"output.tail_threshold: exceeds the velocity extent v_h"});
    }
    return p;
}

void ensure_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
}

std::string snapshot_name(long n) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_%06ld.csv", n);
    return buf;
}

void write_snapshot_file(const std::string& out_dir, const PhaseState& state, const Mesh& mesh) {
    std::ostringstream ss;
    write_snapshot_csv(ss, state, mesh);
    write_file_atomic(out_dir + "/" + snapshot_name(state.n), ss.str());
}

int threads_in_use() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Flat key = value metadata; holds every number needed to recompute dt.
std::string metadata_text(const char* command, const RunConfig& cfg, const Prepared& p,
                          long steps, double wall_seconds) {
    std::ostringstream ss;
    ss << "command = " << command << '\n'
       << "L = " << fmt17(cfg.L) << '\n'
       << "T = " << fmt17(cfg.T) << '\n'
       << "mesh_nx = " << p.mesh.nx() << '\n'
       << "mesh_nv = " << p.mesh.nv() << '\n'
       << "mesh_h = " << fmt17(p.mesh.h()) << '\n'
       << "mesh_alpha = " << fmt17(p.mesh.alpha()) << '\n'
       << "mesh_alpha_h = " << fmt17(p.mesh.min_width()) << '\n'
       << "mesh_v_h = " << fmt17(p.mesh.v_max_abs()) << '\n'
       << "cw = " << fmt17(p.cw) << '\n'
       << "xi = " << fmt17(cfg.dt.xi) << '\n'
       << "dt_mode = " << (cfg.dt.mode == SchemeParams::CflMode::Auto ? "auto" : "fixed") << '\n'
       << "dt = " << fmt17(p.dt) << '\n'
       << "max_stable_dt = " << fmt17(p.max_dt) << '\n'
       << "steps = " << steps << '\n'
       << "truncated_initial_mass_f = " << fmt17(p.init.truncated_mass_f) << '\n'
       << "truncated_initial_mass_g = " << fmt17(p.init.truncated_mass_g) << '\n'
       << "tail_threshold = " << fmt17(p.tail_threshold) << '\n'
       << "vh_exponent_convention = derivation_1_over_lambda1_minus_1\n"
       << "time_sampling = left_endpoint\n"
       << "threads = " << threads_in_use() << '\n'
       << "wall_time_s = " << fmt17(wall_seconds) << '\n';
    return ss.str();
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

int map_exception_to_exit(const char* context) {
    try {
        throw;
    } catch (const ConfigError& e) {
        std::cerr << context << ": " << e.what() << '\n';
        return kExitConfig;
    } catch (const CflError& e) {
        std::cerr << context << ": " << e.what() << '\n';
        return kExitCfl;
    } catch (const AuditError& e) {
        std::cerr << context << ": " << e.what() << '\n';
        return kExitAudit;
    } catch (const IoError& e) {
        std::cerr << context << ": " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << context << ": " << e.what() << '\n';
        return kExitConfig;
    }
}

/// Per-step invariant checks used by the audit subcommand.
class InvariantAuditor {
public:
    InvariantAuditor(const Prepared& p, const DiagnosticsRecord& rec0) : prep_(p), prev_(rec0) {
        scale_mass_f_ = std::max(std::abs(rec0.mass_f), 1e-300);
        scale_mass_g_ = std::max(std::abs(rec0.mass_g), 1e-300);
        linf_slack_ = 1e-13 * std::max(1.0, std::max(rec0.linf_f, rec0.linf_g));
        // Envelope cap calibrated at t = 0 with slack factor 10.
        env_C_ = 1.0;
        double worst = 0.0;
        const Mesh& mesh = p.mesh;
        for (int i = 0; i < mesh.nx(); ++i) {
            for (int j = 0; j < mesh.nv(); ++j) {
                const double r = env_C_ / (1.0 + std::pow(std::abs(mesh.v_center(j)), lambda1_) +
                                           std::pow(std::abs(mesh.x_center(i)), lambda2_));
                worst = std::max(worst, std::max(p.state0.f(i, j), p.state0.g(i, j)) / r);
            }
        }
        env_cap_ = (worst > 0.0) ? 10.0 * worst : 1.0;
    }

    double envelope_cap() const { return env_cap_; }

    void check(const PhaseState& state, const DiagnosticsRecord& rec) {
        const long n = state.n;
        if (std::abs(rec.mass_f - prev0_mass_f()) > 1e-12 * scale_mass_f_) {
            throw AuditError("mass_conservation_f", n,
                             "mass " + fmt17(rec.mass_f) + " vs initial " + fmt17(first_.mass_f));
        }
        if (std::abs(rec.mass_g - prev0_mass_g()) > 1e-12 * scale_mass_g_) {
            throw AuditError("mass_conservation_g", n,
                             "mass " + fmt17(rec.mass_g) + " vs initial " + fmt17(first_.mass_g));
        }
        if (rec.min_f < 0.0 || rec.min_g < 0.0) {
            throw AuditError("positivity", n,
                             "min_f = " + fmt17(rec.min_f) + ", min_g = " + fmt17(rec.min_g));
        }
        if (rec.linf_f > prev_.linf_f + linf_slack_ || rec.linf_g > prev_.linf_g + linf_slack_) {
            throw AuditError("linf_monotone", n, "L-infinity norm increased");
        }
        if (rec.l2sq_f > prev_.l2sq_f * (1.0 + 1e-12) + 1e-300 ||
            rec.l2sq_g > prev_.l2sq_g * (1.0 + 1e-12) + 1e-300) {
            throw AuditError("l2sq_monotone", n, "squared L2 norm increased");
        }
        for (const Field* field : {&state.f, &state.g}) {
            const EnvelopeReport er =
                tail_envelope_check(*field, prep_.mesh, env_C_, lambda1_, lambda2_, env_cap_);
            if (!er.ok) {
                throw AuditError("tail_envelope", n,
                                 "cell (i=" + std::to_string(er.i) + ", j=" + std::to_string(er.j) +
                                     ") value " + fmt17(er.value) + " exceeds " + fmt17(er.bound));
            }
        }
        prev_ = rec;
    }

private:
    double prev0_mass_f() const { return first_.mass_f; }
    double prev0_mass_g() const { return first_.mass_g; }

    const Prepared& prep_;
    DiagnosticsRecord prev_;
    DiagnosticsRecord first_ = prev_;
    double scale_mass_f_ = 1.0, scale_mass_g_ = 1.0;
    double linf_slack_ = 0.0;
    double lambda1_ = 2.0, lambda2_ = 1.0;
    double env_C_ = 1.0, env_cap_ = 1.0;
};

int run_simulation_command(const RunConfig& cfg, const std::string& out_dir, bool audit) {
    const Stopwatch watch;
    const Prepared p = prepare(cfg);
    ensure_out_dir(out_dir);

    const bool fixed = (cfg.dt.mode == SchemeParams::CflMode::Fixed);
    if (fixed) {
        const MacroDensity md0 = macro_density(p.state0, p.mesh);
        const InteractionField ups0 = interaction(p.weights, md0);
        const CflReport rep = cfl_check(std::min(p.dt, cfg.T > 0 ? cfg.T : p.dt), p.mesh, ups0,
                                        cfg.dt.xi);
        if (!rep.ok) throw CflError(0, rep.describe());
    }

    Simulation sim(p.mesh, p.weights, p.state0, p.dt, cfg.T, cfg.dt.xi, fixed);

    std::ostringstream diag;
    write_diagnostics_header(diag);
    DiagnosticsRecord rec = compute_diagnostics(sim.state(), p.mesh, p.tail_threshold);
    write_diagnostics_row(diag, rec);
    write_snapshot_file(out_dir, sim.state(), p.mesh);

    InvariantAuditor auditor(p, rec);
    long audited_steps = 0;
    while (!sim.done()) {
        sim.advance();
        const long n = sim.state().n;
        const bool last = sim.done();
        if (audit || last || n % cfg.output.diagnostics_cadence == 0) {
            rec = compute_diagnostics(sim.state(), p.mesh, p.tail_threshold);
            if (audit) {
                auditor.check(sim.state(), rec);
                ++audited_steps;
            }
            if (last || n % cfg.output.diagnostics_cadence == 0) {
                write_diagnostics_row(diag, rec);
            }
        }
        if (last || n % cfg.output.snapshot_cadence == 0) {
            write_snapshot_file(out_dir, sim.state(), p.mesh);
        }
    }

    write_file_atomic(out_dir + "/diagnostics.csv", diag.str());
    if (audit) {
        std::ostringstream rep;
        rep << "audit = pass\n"
            << "steps_checked = " << audited_steps << '\n'
            << "invariants = mass_conservation, positivity, linf_monotone, l2sq_monotone, tail_envelope\n"
            << "envelope_cap = " << fmt17(auditor.envelope_cap()) << '\n';
        write_file_atomic(out_dir + "/audit_report.txt", rep.str());
    }
    write_file_atomic(out_dir + "/run_metadata.txt",
                      metadata_text(audit ? "audit" : "run", cfg, p, sim.total_steps(),
                                    watch.seconds()));
    return kExitOk;
}

int run_eoc_command(const RunConfig& cfg, const std::string& out_dir, bool time_study) {
    const Stopwatch watch;
    const Prepared p = prepare(cfg);
    ensure_out_dir(out_dir);
    if (!p.init.analytic) throw ConfigError({"initial.type: EOC studies need analytic initial data"});

    ErrorReport report;
    if (time_study) {
        report = run_time_eoc(p.mesh, p.kernels, p.init.f0, p.init.g0, p.dt, cfg.T,
                              cfg.experiment.levels, cfg.experiment.reference_extra_levels,
                              cfg.dt.xi);
    } else {
        if (cfg.experiment.family == MeshFamily::PaperNonequidistant &&
            cfg.mesh.type != MeshSpec::Type::PaperPhase) {
            throw ConfigError({"experiment.family: paper_nonequidistant requires mesh.type = paper_phase"});
        }
        if (cfg.experiment.family == MeshFamily::Equidistant &&
            cfg.mesh.type != MeshSpec::Type::Uniform) {
            throw ConfigError({"experiment.family: equidistant requires mesh.type = uniform"});
        }
        report = run_space_eoc(p.mesh, p.kernels, p.init.f0, p.init.g0, p.dt, cfg.T,
                               cfg.experiment.levels, cfg.experiment.reference_extra_levels,
                               cfg.dt.xi, cfg.experiment.family);
    }

    std::ostringstream table;
    write_eoc_csv(table, report);
    write_file_atomic(out_dir + "/eoc_table.csv", table.str());

    std::ostringstream meta;
    meta << metadata_text(time_study ? "eoc-time" : "eoc-space", cfg, p, 0, watch.seconds())
         << "study = " << report.study << '\n'
         << "levels = " << cfg.experiment.levels << '\n'
         << "reference_level = " << report.reference_level << '\n';
    if (!report.mesh_family.empty()) meta << "mesh_family = " << report.mesh_family << '\n';
    write_file_atomic(out_dir + "/run_metadata.txt", meta.str());
    return kExitOk;
}

} // namespace

int run_single(const RunConfig& cfg, const std::string& out_dir) {
    try {
        return run_simulation_command(cfg, out_dir, /*audit=*/false);
    } catch (...) {
        return map_exception_to_exit("run");
    }
}

int run_audit(const RunConfig& cfg, const std::string& out_dir) {
    try {
        return run_simulation_command(cfg, out_dir, /*audit=*/true);
    } catch (...) {
        return map_exception_to_exit("audit");
    }
}

int run_eoc_time(const RunConfig& cfg, const std::string& out_dir) {
    try {
        if (cfg.experiment.type != ExperimentSpec::Type::TimeEoc) {
            throw ConfigError({"experiment.type: expected time_eoc"});
        }
        return run_eoc_command(cfg, out_dir, /*time_study=*/true);
    } catch (...) {
        return map_exception_to_exit("eoc-time");
    }
}

int run_eoc_space(const RunConfig& cfg, const std::string& out_dir) {
    try {
        if (cfg.experiment.type != ExperimentSpec::Type::SpaceEoc) {
            throw ConfigError({"experiment.type: expected space_eoc"});
        }
        return run_eoc_command(cfg, out_dir, /*time_study=*/false);
    } catch (...) {
        return map_exception_to_exit("eoc-space");
    }
}

void set_thread_count(int n) {
#if defined(_OPENMP)
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"finite volume solver for a two-species kinetic cross-interaction system"};
    app.require_subcommand(1);

    struct SubArgs {
        std::string config;
        std::string out;
        int threads = 0;
    };
    SubArgs sub_args[4];
    const char* names[4] = {"run", "eoc-time", "eoc-space", "audit"};
    const char* descs[4] = {"single simulation with diagnostics and snapshots",
                            "time-step refinement study",
                            "mesh refinement study",
                            "single simulation with per-step invariant checks"};
    CLI::App* subs[4];
    for (int s = 0; s < 4; ++s) {
        subs[s] = app.add_subcommand(names[s], descs[s]);
        subs[s]->add_option("--config", sub_args[s].config, "config file path")->required();
        subs[s]->add_option("--out", sub_args[s].out, "output directory (defaults to config)");
        subs[s]->add_option("--threads", sub_args[s].threads, "OpenMP thread count");
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    for (int s = 0; s < 4; ++s) {
        if (!subs[s]->parsed()) continue;
        set_thread_count(sub_args[s].threads);
        RunConfig cfg;
        try {
            cfg = load_config_file(sub_args[s].config);
        } catch (...) {
            return map_exception_to_exit(names[s]);
        }
        const std::string out_dir =
            sub_args[s].out.empty() ? cfg.output.directory : sub_args[s].out;
        switch (s) {
            case 0: return run_single(cfg, out_dir);
            case 1: return run_eoc_time(cfg, out_dir);
            case 2: return run_eoc_space(cfg, out_dir);
            case 3: return run_audit(cfg, out_dir);
        }
    }
    return kExitConfig;
}

} // namespace kfv
