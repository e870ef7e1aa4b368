#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kfv/eoc.hpp"
#include "kfv/kernel.hpp"
#include "kfv/mesh.hpp"
#include "kfv/scheme.hpp"

namespace kfv {

struct MeshSpec {
    enum class Type { Uniform, PaperPhase, Explicit };
    Type type = Type::Uniform;
    int nx = 0, nv = 0;
    double v_max = 0.0; // uniform: v_max; paper_phase: v_h
    int level = 1;
    std::vector<double> x_interfaces, v_interfaces;
};

struct DtSpec {
    SchemeParams::CflMode mode = SchemeParams::CflMode::Auto;
    double value = 0.0; // fixed mode only
    double xi = 0.1;
};

struct KernelSpec {
    enum class Type { Zero, Quadratic };
    Type type = Type::Zero;
    double coefficient = 0.0;
};

struct InitialSpec {
    enum class Type { PaperSine, Constant, Table };
    Type type = Type::PaperSine;
    double f_value = 0.0, g_value = 0.0;       // constant
    std::vector<double> f_table, g_table;      // table: row-major cell averages
};

struct OutputSpec {
    std::string directory = "out";
    int snapshot_cadence = 10;
    int diagnostics_cadence = 1;
    std::optional<double> tail_threshold; // defaults to v_h / 2 at runtime
};

struct ExperimentSpec {
    enum class Type { None, TimeEoc, SpaceEoc };
    Type type = Type::None;
    int levels = 4;
    int reference_extra_levels = 2;
    MeshFamily family = MeshFamily::Equidistant;
};

struct RunConfig {
    double L = 1.0;
    double T = 0.0;
    MeshSpec mesh;
    DtSpec dt;
    KernelSpec k11, k12, k21, k22;
    InitialSpec initial;
    OutputSpec output;
    ExperimentSpec experiment;
};

/// Strict-schema parse: unknown keys are rejected, required keys reported by
/// path, and every violation is collected before throwing ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);

Mesh build_mesh(const RunConfig& cfg);
Kernel build_kernel(const KernelSpec& spec, double L);
KernelSet build_kernels(const RunConfig& cfg);

/// Analytic initial data; Table specs construct the state directly instead.
struct InitialData {
    Evaluator f0, g0;
    double truncated_mass_f = 0.0; ///< initial mass beyond (-v_h, v_h)
    double truncated_mass_g = 0.0;
    bool analytic = true;
};
InitialData build_initial(const RunConfig& cfg, double v_h);
PhaseState build_initial_state(const RunConfig& cfg, const Mesh& mesh,
                               const InitialData& init);

} // namespace kfv
