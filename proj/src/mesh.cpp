#include "kfv/mesh.hpp"

#include <cmath>
#include <string>

#include "kfv/error.hpp"

namespace kfv {
namespace {

void check_interfaces(const std::vector<double>& v, const char* which) {
    if (v.size() < 2) {
        throw MeshError(std::string(which) + " interfaces: need at least two");
    }
    for (size_t k = 0; k < v.size(); ++k) {
        if (!std::isfinite(v[k])) {
            throw MeshError(std::string(which) + " interfaces: non-finite entry at index " +
                            std::to_string(k));
        }
        if (k > 0 && !(v[k] > v[k - 1])) {
            throw MeshError(std::string(which) + " interfaces: not strictly increasing at index " +
                            std::to_string(k));
        }
    }
}

std::vector<double> uniform_x_interfaces(double L, int nx) {
    if (L <= 0.0) throw MeshError("spatial half-length L must be positive");
    if (nx < 1) throw MeshError("Nx must be at least 1");
    const double dx = 2.0 * L / nx;
    std::vector<double> xif(nx + 1);
    for (int k = 0; k <= nx; ++k) xif[k] = -L + k * dx;
    xif.front() = -L;
    xif.back() = L; // domain endpoints exactly +-L
    return xif;
}

// Symmetric construction: the nonnegative half is built and mirrored so that
// v = 0 and +-v_max are exact.
std::vector<double> uniform_v_interfaces(double v_max, int nv) {
    if (v_max <= 0.0) throw MeshError("velocity extent v_max must be positive");
    if (nv < 1) throw MeshError("Nv must be at least 1");
    if (nv % 2 != 0) throw MeshError("Nv must be even so that v = 0 is an interface");
    const int half = nv / 2;
    const double dv = 2.0 * v_max / nv;
    std::vector<double> vif(nv + 1);
    for (int m = 0; m <= half; ++m) {
        const double u = (m == half) ? v_max : m * dv;
        vif[half + m] = u;
        vif[half - m] = -u;
    }
    return vif;
}

} // namespace

Mesh::Mesh(std::vector<double> x_if, std::vector<double> v_if)
    : x_if_(std::move(x_if)), v_if_(std::move(v_if)) {
    check_interfaces(x_if_, "x");
    check_interfaces(v_if_, "v");

    const int nx = static_cast<int>(x_if_.size()) - 1;
    const int nv = static_cast<int>(v_if_.size()) - 1;
    x_c_.resize(nx);
    dx_.resize(nx);
    v_c_.resize(nv);
    dv_.resize(nv);
    double wmin = x_if_[1] - x_if_[0];
    double wmax = wmin;
    for (int i = 0; i < nx; ++i) {
        dx_[i] = x_if_[i + 1] - x_if_[i];
        x_c_[i] = 0.5 * (x_if_[i] + x_if_[i + 1]);
        wmin = std::min(wmin, dx_[i]);
        wmax = std::max(wmax, dx_[i]);
    }
    for (int j = 0; j < nv; ++j) {
        dv_[j] = v_if_[j + 1] - v_if_[j];
        v_c_[j] = 0.5 * (v_if_[j] + v_if_[j + 1]);
        wmin = std::min(wmin, dv_[j]);
        wmax = std::max(wmax, dv_[j]);
    }
    h_ = wmax;
    min_w_ = wmin;
    alpha_ = wmin / wmax;
}

Mesh Mesh::uniform(double L, int nx, double v_max, int nv) {
    return Mesh(uniform_x_interfaces(L, nx), uniform_v_interfaces(v_max, nv));
}

std::vector<double> Mesh::paper_velocity_interfaces(int level, double v_h) {
    if (level < 1) throw MeshError("velocity mesh level must be at least 1");
    if (v_h <= 0.0) throw MeshError("velocity extent v_h must be positive");

    const double dv_in = std::ldexp(1.0, -(level + 1));
    const double dv_out = 15.0 * dv_in;

    // Integer tiling checks on cell counts: ldexp scaling is exact, so a
    // fractional result is a genuine divisibility failure, not roundoff.
    const double q_in = std::ldexp(v_h, level);          // (v_h/2) / dv_in
    const double q_out = std::ldexp(v_h, level + 1) / 20.0; // (3 v_h/4) / dv_out
    if (!(q_in >= 1.0) || q_in != std::floor(q_in)) {
        throw MeshError("inner velocity segment (-v_h/4, v_h/4) does not tile with width 2^-(level+1)"
                        " for v_h = " + std::to_string(v_h));
    }
    if (!(q_out >= 1.0) || q_out != std::floor(q_out)) {
        throw MeshError("outer velocity segment (v_h/4, v_h] does not tile with width 15*2^-(level+1)"
                        " for v_h = " + std::to_string(v_h));
    }
    const long n_in = static_cast<long>(q_in);
    const long n_out = static_cast<long>(q_out);
    if (n_in % 2 != 0) {
        throw MeshError("inner velocity segment cell count must be even so that v = 0 is an interface");
    }

    // Negative half (outer segment, then inner down to exactly 0), mirrored.
    std::vector<double> vif;
    vif.reserve(2 * (n_out + n_in / 2) + 1);
    for (long k = 0; k < n_out; ++k) vif.push_back(-v_h + k * dv_out);
    const long half_in = n_in / 2;
    for (long k = 0; k <= half_in; ++k) vif.push_back(-static_cast<double>(half_in - k) * dv_in);
    for (long k = static_cast<long>(vif.size()) - 2; k >= 0; --k) vif.push_back(-vif[k]);
    return vif;
}

Mesh Mesh::paper_phase(int level, double L, int nx, double v_h) {
    return Mesh(uniform_x_interfaces(L, nx), paper_velocity_interfaces(level, v_h));
}

Mesh Mesh::from_interfaces(std::vector<double> x_if, std::vector<double> v_if) {
    return Mesh(std::move(x_if), std::move(v_if));
}

Mesh Mesh::bisected() const {
    auto split = [](const std::vector<double>& in) {
        std::vector<double> out;
        out.reserve(2 * in.size() - 1);
        for (size_t k = 0; k + 1 < in.size(); ++k) {
            out.push_back(in[k]);
            out.push_back(0.5 * (in[k] + in[k + 1]));
        }
        out.push_back(in.back());
        return out;
    };
    return Mesh(split(x_if_), split(v_if_));
}

double Mesh::v_max_abs() const {
    return std::max(std::abs(v_if_.front()), std::abs(v_if_.back()));
}

} // namespace kfv
