#include "kfv/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include <json.hpp>

#include "kfv/error.hpp"
#include "kfv/io.hpp"

namespace kfv {
namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct Validator {
    std::vector<std::string> errs;

    void fail(const std::string& path, const std::string& msg) {
        errs.push_back(path + ": " + msg);
    }

    void check_keys(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* k) { return it.key() == k; });
            if (!known) fail(path + "." + it.key(), "unknown key");
        }
    }

    const json* object(const json& obj, const std::string& path, const char* key,
                       bool required) {
        if (!obj.contains(key)) {
            if (required) fail(path + "." + key, "missing required key");
            return nullptr;
        }
        if (!obj[key].is_object()) {
            fail(path + "." + key, "expected an object");
            return nullptr;
        }
        return &obj[key];
    }

    bool number(const json& obj, const std::string& path, const char* key, bool required,
                double& out) {
        if (!obj.contains(key)) {
            if (required) fail(path + "." + key, "missing required key");
            return false;
        }
        if (!obj[key].is_number()) {
            fail(path + "." + key, "expected a number");
            return false;
        }
        out = obj[key].get<double>();
        return true;
    }

    bool integer(const json& obj, const std::string& path, const char* key, bool required,
                 int& out) {
        if (!obj.contains(key)) {
            if (required) fail(path + "." + key, "missing required key");
            return false;
        }
        if (!obj[key].is_number_integer()) {
            fail(path + "." + key, "expected an integer");
            return false;
        }
        out = obj[key].get<int>();
        return true;
    }

    bool text(const json& obj, const std::string& path, const char* key, bool required,
              std::string& out) {
        if (!obj.contains(key)) {
            if (required) fail(path + "." + key, "missing required key");
            return false;
        }
        if (!obj[key].is_string()) {
            fail(path + "." + key, "expected a string");
            return false;
        }
        out = obj[key].get<std::string>();
        return true;
    }

    bool number_array(const json& obj, const std::string& path, const char* key,
                      std::vector<double>& out) {
        if (!obj.contains(key)) {
            fail(path + "." + key, "missing required key");
            return false;
        }
        if (!obj[key].is_array()) {
            fail(path + "." + key, "expected an array of numbers");
            return false;
        }
        out.clear();
        for (const auto& e : obj[key]) {
            if (!e.is_number()) {
                fail(path + "." + key, "expected an array of numbers");
                return false;
            }
            out.push_back(e.get<double>());
        }
        return true;
    }
};

KernelSpec parse_kernel(Validator& v, const json& obj, const std::string& path) {
    KernelSpec spec;
    v.check_keys(obj, path, {"type", "coefficient"});
    std::string type;
    if (!v.text(obj, path, "type", true, type)) return spec;
    if (type == "zero") {
        spec.type = KernelSpec::Type::Zero;
        if (obj.contains("coefficient")) v.fail(path + ".coefficient", "not allowed for type zero");
    } else if (type == "quadratic") {
        spec.type = KernelSpec::Type::Quadratic;
        v.number(obj, path, "coefficient", true, spec.coefficient);
    } else {
        v.fail(path + ".type", "must be one of zero|quadratic");
    }
    return spec;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError({std::string("invalid JSON: ") + e.what()});
    }
    if (!root.is_object()) throw ConfigError({"top level: expected an object"});

    Validator v;
    RunConfig cfg;
    v.check_keys(root, "config",
                 {"domain", "mesh", "dt", "kernels", "initial", "output", "experiment"});

    if (const json* dom = v.object(root, "config", "domain", true)) {
        v.check_keys(*dom, "domain", {"L", "T"});
        if (v.number(*dom, "domain", "L", true, cfg.L) && !(cfg.L > 0.0)) {
            v.fail("domain.L", "must be positive");
        }
        if (v.number(*dom, "domain", "T", true, cfg.T) && cfg.T < 0.0) {
            v.fail("domain.T", "must be nonnegative");
        }
    }

    if (const json* mesh = v.object(root, "config", "mesh", true)) {
        std::string type;
        if (v.text(*mesh, "mesh", "type", true, type)) {
            if (type == "uniform") {
                cfg.mesh.type = MeshSpec::Type::Uniform;
                v.check_keys(*mesh, "mesh", {"type", "Nx", "Nv", "v_max"});
                if (v.integer(*mesh, "mesh", "Nx", true, cfg.mesh.nx) && cfg.mesh.nx < 1) {
                    v.fail("mesh.Nx", "must be at least 1");
                }
                if (v.integer(*mesh, "mesh", "Nv", true, cfg.mesh.nv)) {
                    if (cfg.mesh.nv < 1) v.fail("mesh.Nv", "must be at least 1");
                    else if (cfg.mesh.nv % 2 != 0) v.fail("mesh.Nv", "must be even");
                }
                if (v.number(*mesh, "mesh", "v_max", true, cfg.mesh.v_max) &&
                    !(cfg.mesh.v_max > 0.0)) {
                    v.fail("mesh.v_max", "must be positive");
                }
            } else if (type == "paper_phase") {
                cfg.mesh.type = MeshSpec::Type::PaperPhase;
                v.check_keys(*mesh, "mesh", {"type", "level", "Nx", "v_h"});
                if (v.integer(*mesh, "mesh", "level", true, cfg.mesh.level) && cfg.mesh.level < 1) {
                    v.fail("mesh.level", "must be at least 1");
                }
                if (v.integer(*mesh, "mesh", "Nx", true, cfg.mesh.nx) && cfg.mesh.nx < 1) {
                    v.fail("mesh.Nx", "must be at least 1");
                }
                if (v.number(*mesh, "mesh", "v_h", true, cfg.mesh.v_max) &&
                    !(cfg.mesh.v_max > 0.0)) {
                    v.fail("mesh.v_h", "must be positive");
                }
            } else if (type == "explicit") {
                cfg.mesh.type = MeshSpec::Type::Explicit;
                v.check_keys(*mesh, "mesh", {"type", "x_interfaces", "v_interfaces"});
                v.number_array(*mesh, "mesh", "x_interfaces", cfg.mesh.x_interfaces);
                v.number_array(*mesh, "mesh", "v_interfaces", cfg.mesh.v_interfaces);
                for (const char* key : {"x_interfaces", "v_interfaces"}) {
                    const auto& arr = (key[0] == 'x') ? cfg.mesh.x_interfaces : cfg.mesh.v_interfaces;
                    if (arr.size() < 2) {
                        v.fail(std::string("mesh.") + key, "needs at least two interfaces");
                    } else if (!std::is_sorted(arr.begin(), arr.end()) ||
                               std::adjacent_find(arr.begin(), arr.end()) != arr.end()) {
                        v.fail(std::string("mesh.") + key, "must be strictly increasing");
                    }
                }
            } else {
                v.fail("mesh.type", "must be one of uniform|paper_phase|explicit");
            }
        }
    }

    if (const json* dt = v.object(root, "config", "dt", false)) {
        v.check_keys(*dt, "dt", {"mode", "value", "xi"});
        std::string mode = "auto";
        v.text(*dt, "dt", "mode", false, mode);
        if (mode == "auto") {
            cfg.dt.mode = SchemeParams::CflMode::Auto;
            if (dt->contains("value")) v.fail("dt.value", "not allowed in auto mode");
        } else if (mode == "fixed") {
            cfg.dt.mode = SchemeParams::CflMode::Fixed;
            if (v.number(*dt, "dt", "value", true, cfg.dt.value) && !(cfg.dt.value > 0.0)) {
                v.fail("dt.value", "must be positive");
            }
        } else {
            v.fail("dt.mode", "must be one of auto|fixed");
        }
        if (v.number(*dt, "dt", "xi", false, cfg.dt.xi) &&
            !(cfg.dt.xi > 0.0 && cfg.dt.xi < 1.0)) {
            v.fail("dt.xi", "xi must lie in (0,1)");
        }
    }

    if (const json* ks = v.object(root, "config", "kernels", true)) {
        v.check_keys(*ks, "kernels", {"k11", "k12", "k21", "k22"});
        if (const json* k = v.object(*ks, "kernels", "k11", true)) cfg.k11 = parse_kernel(v, *k, "kernels.k11");
        if (const json* k = v.object(*ks, "kernels", "k12", true)) cfg.k12 = parse_kernel(v, *k, "kernels.k12");
        if (const json* k = v.object(*ks, "kernels", "k21", true)) cfg.k21 = parse_kernel(v, *k, "kernels.k21");
        if (const json* k = v.object(*ks, "kernels", "k22", true)) cfg.k22 = parse_kernel(v, *k, "kernels.k22");
    }

    if (const json* init = v.object(root, "config", "initial", true)) {
        std::string type;
        if (v.text(*init, "initial", "type", true, type)) {
            if (type == "paper_sine") {
                cfg.initial.type = InitialSpec::Type::PaperSine;
                v.check_keys(*init, "initial", {"type"});
            } else if (type == "constant") {
                cfg.initial.type = InitialSpec::Type::Constant;
                v.check_keys(*init, "initial", {"type", "f", "g"});
                if (v.number(*init, "initial", "f", true, cfg.initial.f_value) &&
                    cfg.initial.f_value < 0.0) {
                    v.fail("initial.f", "must be nonnegative");
                }
                if (v.number(*init, "initial", "g", true, cfg.initial.g_value) &&
                    cfg.initial.g_value < 0.0) {
                    v.fail("initial.g", "must be nonnegative");
                }
            } else if (type == "table") {
                cfg.initial.type = InitialSpec::Type::Table;
                v.check_keys(*init, "initial", {"type", "f", "g"});
                v.number_array(*init, "initial", "f", cfg.initial.f_table);
                v.number_array(*init, "initial", "g", cfg.initial.g_table);
            } else {
                v.fail("initial.type", "must be one of paper_sine|constant|table");
            }
        }
    }

    if (const json* out = v.object(root, "config", "output", false)) {
        v.check_keys(*out, "output", {"directory", "snapshot_cadence", "diagnostics_cadence",
                                      "tail_threshold"});
        if (v.text(*out, "output", "directory", false, cfg.output.directory) &&
            cfg.output.directory.empty()) {
            v.fail("output.directory", "must be nonempty");
        }
        if (v.integer(*out, "output", "snapshot_cadence", false, cfg.output.snapshot_cadence) &&
            cfg.output.snapshot_cadence < 1) {
            v.fail("output.snapshot_cadence", "must be at least 1");
        }
        if (v.integer(*out, "output", "diagnostics_cadence", false,
                      cfg.output.diagnostics_cadence) &&
            cfg.output.diagnostics_cadence < 1) {
            v.fail("output.diagnostics_cadence", "must be at least 1");
        }
        double tail = 0.0;
        if (v.number(*out, "output", "tail_threshold", false, tail)) {
            if (!(tail > 0.0)) v.fail("output.tail_threshold", "must be positive");
            else cfg.output.tail_threshold = tail;
        }
    }

    if (const json* exp = v.object(root, "config", "experiment", false)) {
        std::string type;
        if (v.text(*exp, "experiment", "type", true, type)) {
            if (type == "none") {
                cfg.experiment.type = ExperimentSpec::Type::None;
                v.check_keys(*exp, "experiment", {"type"});
            } else if (type == "time_eoc" || type == "space_eoc") {
                cfg.experiment.type = (type == "time_eoc") ? ExperimentSpec::Type::TimeEoc
                                                           : ExperimentSpec::Type::SpaceEoc;
                v.check_keys(*exp, "experiment",
                             {"type", "levels", "reference_extra_levels", "family"});
                if (v.integer(*exp, "experiment", "levels", false, cfg.experiment.levels) &&
                    cfg.experiment.levels < 2) {
                    v.fail("experiment.levels", "must be at least 2");
                }
                if (v.integer(*exp, "experiment", "reference_extra_levels", false,
                              cfg.experiment.reference_extra_levels) &&
                    cfg.experiment.reference_extra_levels < 1) {
                    v.fail("experiment.reference_extra_levels", "must be at least 1");
                }
                std::string family;
                if (v.text(*exp, "experiment", "family", type == "space_eoc", family)) {
                    if (family == "equidistant") {
                        cfg.experiment.family = MeshFamily::Equidistant;
                    } else if (family == "paper_nonequidistant") {
                        cfg.experiment.family = MeshFamily::PaperNonequidistant;
                    } else {
                        v.fail("experiment.family",
                               "must be one of equidistant|paper_nonequidistant");
                    }
                }
                if (type == "time_eoc" && exp->contains("family")) {
                    v.fail("experiment.family", "not allowed for time_eoc");
                }
                if (type == "space_eoc" && cfg.dt.mode != SchemeParams::CflMode::Fixed) {
                    v.fail("experiment", "space_eoc requires dt.mode = fixed");
                }
                if (type == "time_eoc" && cfg.dt.mode != SchemeParams::CflMode::Fixed) {
                    v.fail("experiment", "time_eoc requires dt.mode = fixed (base dt)");
                }
                if (cfg.initial.type == InitialSpec::Type::Table &&
                    type == "space_eoc") {
                    v.fail("initial.type", "table data cannot be rediscretized across a mesh hierarchy");
                }
            } else {
                v.fail("experiment.type", "must be one of none|time_eoc|space_eoc");
            }
        }
    }

    if (!v.errs.empty()) throw ConfigError(std::move(v.errs));
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    return parse_config(read_file(path));
}

Mesh build_mesh(const RunConfig& cfg) {
    switch (cfg.mesh.type) {
        case MeshSpec::Type::Uniform:
            return Mesh::uniform(cfg.L, cfg.mesh.nx, cfg.mesh.v_max, cfg.mesh.nv);
        case MeshSpec::Type::PaperPhase:
            return Mesh::paper_phase(cfg.mesh.level, cfg.L, cfg.mesh.nx, cfg.mesh.v_max);
        case MeshSpec::Type::Explicit:
            return Mesh::from_interfaces(cfg.mesh.x_interfaces, cfg.mesh.v_interfaces);
    }
    throw Error("unreachable mesh type");
}

Kernel build_kernel(const KernelSpec& spec, double L) {
    switch (spec.type) {
        case KernelSpec::Type::Zero:
            return Kernel::zero(L);
        case KernelSpec::Type::Quadratic:
            return Kernel::quadratic(spec.coefficient, L);
    }
    throw Error("unreachable kernel type");
}

KernelSet build_kernels(const RunConfig& cfg) {
    return KernelSet{build_kernel(cfg.k11, cfg.L), build_kernel(cfg.k12, cfg.L),
                     build_kernel(cfg.k21, cfg.L), build_kernel(cfg.k22, cfg.L)};
}

InitialData build_initial(const RunConfig& cfg, double v_h) {
    InitialData init;
    switch (cfg.initial.type) {
        case InitialSpec::Type::PaperSine: {
            init.f0 = [](double x, double v) {
                const double a = (99.0 / 101.0) * (0.5 + 0.5 * std::sin(kPi * x));
                return std::abs(v) <= 1.0 ? a : a * std::pow(std::abs(v), -100.0);
            };
            init.g0 = [](double x, double v) {
                const double a = (99.0 / 101.0) * (0.5 - 0.5 * std::sin(kPi * x));
                return std::abs(v) <= 1.0 ? a : a * std::pow(std::abs(v), -100.0);
            };
            // Mass beyond (-v_h, v_h): (integral of the x profile) * 2 v_h^-99 / 99.
            const double tail = (99.0 / 101.0) * cfg.L * 2.0 * std::pow(v_h, -99.0) / 99.0;
            init.truncated_mass_f = tail;
            init.truncated_mass_g = tail;
            break;
        }
        case InitialSpec::Type::Constant: {
            const double fv = cfg.initial.f_value;
            const double gv = cfg.initial.g_value;
            init.f0 = [fv](double, double) { return fv; };
            init.g0 = [gv](double, double) { return gv; };
            break;
        }
        case InitialSpec::Type::Table:
            init.analytic = false;
            break;
    }
    return init;
}

PhaseState build_initial_state(const RunConfig& cfg, const Mesh& mesh, const InitialData& init) {
    if (cfg.initial.type == InitialSpec::Type::Table) {
        const size_t cells = static_cast<size_t>(mesh.cell_count());
        if (cfg.initial.f_table.size() != cells || cfg.initial.g_table.size() != cells) {
            throw ConfigError({"initial.f/g: table length must equal Nx*Nv = " +
                               std::to_string(cells)});
        }
        PhaseState s;
        s.f = Field(mesh.nx(), mesh.nv());
        s.g = Field(mesh.nx(), mesh.nv());
        for (size_t c = 0; c < cells; ++c) {
            const double fv = cfg.initial.f_table[c];
            const double gv = cfg.initial.g_table[c];
            if (!std::isfinite(fv) || !std::isfinite(gv) || fv < 0.0 || gv < 0.0) {
                throw ConfigError({"initial.f/g: table entries must be finite and nonnegative"});
            }
            s.f.a[c] = fv;
            s.g.a[c] = gv;
        }
        return s;
    }
    return discretize_initial(mesh, init.f0, init.g0);
}

} // namespace kfv
