#pragma once

#include <vector>

namespace kfv {

/// Phase-space mesh with explicitly stored interface positions in x and v.
///
/// Interfaces are kept explicit (rather than derived from closed formulas) so
/// that non-uniform meshes and bisection refinement share one code path.
/// Admissibility: alpha * h <= every cell width <= h with alpha in (0, 1].
/// Immutable after construction; safe to share across threads.
class Mesh {
public:
    /// Uniform mesh on (-L, L) x (-v_max, v_max). Requires nv even so that
    /// v = 0 is an interface.
    static Mesh uniform(double L, int nx, double v_max, int nv);

    /// Uniform x on (-L, L) with nx cells, combined with the piecewise-uniform
    /// velocity mesh of paper_velocity_interfaces(level, v_h).
    static Mesh paper_phase(int level, double L, int nx, double v_h);

    /// Velocity interfaces made of an inner segment (-v_h/4, v_h/4) with
    /// width 2^-(level+1) and outer segments with width 15 * 2^-(level+1).
    /// Segment lengths must tile to integer cell counts.
    static std::vector<double> paper_velocity_interfaces(int level, double v_h);

    /// General construction from strictly increasing interface sets.
    static Mesh from_interfaces(std::vector<double> x_if, std::vector<double> v_if);

    /// Midpoint refinement in both directions. Every parent interface is kept
    /// verbatim, so the child is nested bit-exactly in the parent.
    Mesh bisected() const;

    int nx() const { return static_cast<int>(dx_.size()); }
    int nv() const { return static_cast<int>(dv_.size()); }
    long cell_count() const { return static_cast<long>(nx()) * nv(); }

    const std::vector<double>& x_interfaces() const { return x_if_; }
    const std::vector<double>& v_interfaces() const { return v_if_; }
    const std::vector<double>& x_centers() const { return x_c_; }
    const std::vector<double>& v_centers() const { return v_c_; }

    double x_center(int i) const { return x_c_[i]; }
    double v_center(int j) const { return v_c_[j]; }
    double dx(int i) const { return dx_[i]; }
    double dv(int j) const { return dv_[j]; }
    double cell_measure(int i, int j) const { return dx_[i] * dv_[j]; }

    double h() const { return h_; }
    double alpha() const { return alpha_; }
    double min_width() const { return min_w_; }
    /// Spatial half-length L (the x domain is (-L, L)).
    double half_length() const { return x_if_.back(); }
    /// Outermost velocity interface magnitude (v_h for symmetric meshes).
    double v_max_abs() const;

private:
    Mesh(std::vector<double> x_if, std::vector<double> v_if);

    std::vector<double> x_if_, v_if_;
    std::vector<double> x_c_, v_c_;
    std::vector<double> dx_, dv_;
    double h_ = 0.0, alpha_ = 0.0, min_w_ = 0.0;
};

} // namespace kfv
