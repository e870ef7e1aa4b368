#include "kfv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "kfv/error.hpp"
#include "kfv/io.hpp"

namespace kfv {
namespace {

struct FieldStats {
    double mass = 0, min = 0, l1 = 0, l2sq = 0, linf = 0;
};

FieldStats field_stats(const Field& p, const Mesh& mesh) {
    FieldStats s;
    s.min = p.a.empty() ? 0.0 : p(0, 0);
    for (int i = 0; i < p.nx; ++i) {
        double row_m = 0.0, row_1 = 0.0, row_2 = 0.0;
        for (int j = 0; j < p.nv; ++j) {
            const double val = p(i, j);
            const double dv = mesh.dv(j);
            row_m += dv * val;
            row_1 += dv * std::abs(val);
            row_2 += dv * val * val;
            s.min = std::min(s.min, val);
            s.linf = std::max(s.linf, std::abs(val));
        }
        s.mass += mesh.dx(i) * row_m;
        s.l1 += mesh.dx(i) * row_1;
        s.l2sq += mesh.dx(i) * row_2;
    }
    return s;
}

} // namespace

DiagnosticsRecord compute_diagnostics(const PhaseState& state, const Mesh& mesh,
                                      double tail_threshold) {
    DiagnosticsRecord rec;
    rec.t = state.t;
    const FieldStats sf = field_stats(state.f, mesh);
    const FieldStats sg = field_stats(state.g, mesh);
    rec.mass_f = sf.mass;
    rec.mass_g = sg.mass;
    rec.min_f = sf.min;
    rec.min_g = sg.min;
    rec.l1_f = sf.l1;
    rec.l1_g = sg.l1;
    rec.l2sq_f = sf.l2sq;
    rec.l2sq_g = sg.l2sq;
    rec.linf_f = sf.linf;
    rec.linf_g = sg.linf;
    rec.tail_f = tail_mass(state.f, mesh, tail_threshold);
    rec.tail_g = tail_mass(state.g, mesh, tail_threshold);
    return rec;
}

double convex_functional(const Field& p, const Mesh& mesh,
                         const std::function<double(double)>& phi) {
    double total = 0.0;
    for (int i = 0; i < p.nx; ++i) {
        double row = 0.0;
        for (int j = 0; j < p.nv; ++j) row += mesh.dv(j) * phi(p(i, j));
        total += mesh.dx(i) * row;
    }
    return total;
}

double tail_mass(const Field& p, const Mesh& mesh, double M) {
    const double vh = mesh.v_max_abs();
    if (!(M > 0.0)) throw Error("tail threshold M must be positive");
    if (M > vh) throw Error("tail threshold M exceeds the velocity extent v_h");

    const int nv = mesh.nv();
    std::vector<double> outside(nv, 0.0);
    const auto& vif = mesh.v_interfaces();
    for (int j = 0; j < nv; ++j) {
        const double a = vif[j];
        const double b = vif[j + 1];
        outside[j] = std::max(0.0, b - std::max(a, M)) + std::max(0.0, std::min(b, -M) - a);
    }
    double total = 0.0;
    for (int i = 0; i < p.nx; ++i) {
        double row = 0.0;
        for (int j = 0; j < nv; ++j) {
            if (outside[j] > 0.0) row += outside[j] * p(i, j);
        }
        total += mesh.dx(i) * row;
    }
    return total;
}

double choose_vh(double epsilon, double C_T, double alpha, double lambda1) {
    if (!(lambda1 > 1.0)) throw Error("lambda1 must exceed 1 (tail not integrable otherwise)");
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (!(C_T > 0.0)) throw Error("C_T must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must lie in (0,1]");
    const double base = 2.0 * C_T / (std::pow(alpha, 1.0 + lambda1) * (lambda1 - 1.0) * epsilon);
    return std::pow(base, 1.0 / (lambda1 - 1.0));
}

EnvelopeReport tail_envelope_check(const Field& p, const Mesh& mesh, double C,
                                   double lambda1, double lambda2, double cap) {
    EnvelopeReport rep;
    for (int i = 0; i < p.nx; ++i) {
        const double xa = std::abs(mesh.x_center(i));
        for (int j = 0; j < p.nv; ++j) {
            const double va = std::abs(mesh.v_center(j));
            const double bound =
                cap * C / (1.0 + std::pow(va, lambda1) + std::pow(xa, lambda2));
            if (p(i, j) > bound) {
                rep.ok = false;
                rep.i = i;
                rep.j = j;
                rep.value = p(i, j);
                rep.bound = bound;
                return rep;
            }
        }
    }
    return rep;
}

void write_diagnostics_header(std::ostream& os) {
    os << "t,mass_f,mass_g,min_f,min_g,l1_f,l1_g,l2sq_f,l2sq_g,linf_f,linf_g,tail_f,tail_g\n";
}

void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& r) {
    os << fmt17(r.t) << ',' << fmt17(r.mass_f) << ',' << fmt17(r.mass_g) << ',' << fmt17(r.min_f)
       << ',' << fmt17(r.min_g) << ',' << fmt17(r.l1_f) << ',' << fmt17(r.l1_g) << ','
       << fmt17(r.l2sq_f) << ',' << fmt17(r.l2sq_g) << ',' << fmt17(r.linf_f) << ','
       << fmt17(r.linf_g) << ',' << fmt17(r.tail_f) << ',' << fmt17(r.tail_g) << '\n';
}

} // namespace kfv
