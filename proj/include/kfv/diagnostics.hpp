#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "kfv/state.hpp"

namespace kfv {

/// Structure-preservation quantities monitored along a run.
struct DiagnosticsRecord {
    double t = 0.0;
    double mass_f = 0, mass_g = 0;
    double min_f = 0, min_g = 0;
    double l1_f = 0, l1_g = 0;
    double l2sq_f = 0, l2sq_g = 0;
    double linf_f = 0, linf_g = 0;
    double tail_f = 0, tail_g = 0;
};

DiagnosticsRecord compute_diagnostics(const PhaseState& state, const Mesh& mesh,
                                      double tail_threshold);

/// sum_{i,j} |C_ij| phi(p_ij) in fixed index order.
double convex_functional(const Field& p, const Mesh& mesh,
                         const std::function<double(double)>& phi);

/// Mass carried by velocities outside (-M, M); straddling cells contribute
/// the fraction of their width outside. Requires 0 < M <= v_h.
double tail_mass(const Field& p, const Mesh& mesh, double M);

/// v_h such that (2 C_T / alpha^(1+lambda1)) (1/(lambda1-1)) v_h^-(lambda1-1)
/// equals epsilon. The exponent 1/(lambda1-1) follows the inequality chain
/// the bound is derived from; see the run metadata convention flag.
double choose_vh(double epsilon, double C_T, double alpha, double lambda1);

struct EnvelopeReport {
    bool ok = true;
    int i = -1, j = -1;
    double value = 0.0, bound = 0.0;
};

/// Checks p_ij <= cap * C / (1 + |v_j|^lambda1 + |x_i|^lambda2) for all cells.
EnvelopeReport tail_envelope_check(const Field& p, const Mesh& mesh, double C,
                                   double lambda1, double lambda2, double cap);

void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& rec);

} // namespace kfv
