#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kfv/config.hpp"
#include "kfv/error.hpp"
#include "kfv/state.hpp"

using namespace kfv;

namespace {

Field random_field(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(0.0, 1.0);
    Field f(mesh.nx(), mesh.nv());
    for (auto& a : f.a) a = val(rng);
    return f;
}

// Independent fine-quadrature mass oracle: composite midpoint rule over a
// subdivision of every mesh cell.
double mass_oracle(const Mesh& mesh, const Evaluator& p0, int sub) {
    double total = 0.0;
    for (int i = 0; i < mesh.nx(); ++i) {
        for (int j = 0; j < mesh.nv(); ++j) {
            const double x0 = mesh.x_interfaces()[i];
            const double v0 = mesh.v_interfaces()[j];
            const double hx = mesh.dx(i) / sub;
            const double hv = mesh.dv(j) / sub;
            double cell = 0.0;
            for (int a = 0; a < sub; ++a) {
                for (int b = 0; b < sub; ++b) {
                    cell += p0(x0 + (a + 0.5) * hx, v0 + (b + 0.5) * hv);
                }
            }
            total += cell * hx * hv;
        }
    }
    return total;
}

} // namespace

TEST_CASE("constant data averages to itself") {
    const Mesh mesh = Mesh::uniform(1.0, 3, 2.0, 4);
    const Field f = discretize_component(mesh, [](double, double) { return 0.7; }, "f0");
    for (double v : f.a) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("linear data averages exactly") {
    // f0(x, v) = x on the cell [0,1] x [0,1] has average 1/2.
    const Mesh mesh = Mesh::from_interfaces({0.0, 1.0}, {0.0, 1.0});
    const Field f = discretize_component(mesh, [](double x, double) { return x; }, "f0");
    CHECK(f(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tiny negative quadrature noise is clamped, larger is kept") {
    const Mesh mesh = Mesh::from_interfaces({0.0, 1.0}, {0.0, 1.0});
    const Field a = discretize_component(mesh, [](double, double) { return -5e-16; }, "f0");
    CHECK(a(0, 0) == 0.0);
    const Field b = discretize_component(mesh, [](double, double) { return -1.0; }, "f0");
    CHECK(b(0, 0) == doctest::Approx(-1.0)); // caller's contract violation is preserved
}

TEST_CASE("non-finite evaluator output names the cell") {
    const Mesh mesh = Mesh::uniform(1.0, 2, 1.0, 2);
    CHECK_THROWS_WITH_AS(
        static_cast<void>(discretize_component(
            mesh, [](double x, double) { return x > 0 ? 1.0 / 0.0 : 1.0; }, "f0")),
        doctest::Contains("non-finite"), StateError);
}

TEST_CASE("section-5 initial datum: nonnegative with oracle mass") {
    RunConfig cfg; // defaults give L = 1
    cfg.initial.type = InitialSpec::Type::PaperSine;
    const InitialData init = build_initial(cfg, 5.0);
    const Mesh mesh = Mesh::paper_phase(2, 1.0, 12, 5.0);
    const PhaseState state = discretize_initial(mesh, init.f0, init.g0);

    for (double v : state.f.a) CHECK(v >= 0.0);
    for (double v : state.g.a) CHECK(v >= 0.0);

    // Closed form of the box mass: (2/101) * (100 - 5^-99) = 200/101 up to a
    // 1e-71 tail; the midpoint oracle resolves the 1/|v|^100 shoulder to ~1e-5.
    const double frozen = 1.9801980198019802;
    const double quad = mass_oracle(mesh, init.f0, 40);
    CHECK(quad == doctest::Approx(frozen).epsilon(1e-4));

    // Cell-average discretization carries a small quadrature defect on the
    // steep 1/|v|^100 shoulder cells at this resolution.
    CHECK(total_mass(state.f, mesh) == doctest::Approx(frozen).epsilon(3e-3));
    CHECK(total_mass(state.g, mesh) == doctest::Approx(frozen).epsilon(3e-3));
    CHECK(init.truncated_mass_f == doctest::Approx(2.0 / 101.0 * std::pow(5.0, -99.0)));
}

TEST_CASE("macro density row sums") {
    const Mesh mesh = Mesh::from_interfaces({-1.0, 0.0, 1.0, 2.0}, {-0.5, 0.0, 0.5});
    PhaseState s;
    s.f = Field(3, 2);
    s.g = Field(3, 2);

    SUBCASE("uniform f integrates the velocity widths") {
        for (auto& a : s.f.a) a = 1.0;
        const MacroDensity md = macro_density(s, mesh);
        for (int i = 0; i < 3; ++i) {
            CHECK(md.rho[i] == doctest::Approx(1.0).epsilon(1e-15));
            CHECK(md.eta[i] == 0.0);
        }
    }

    SUBCASE("single nonzero cell") {
        s.f(2, 1) = 3.0; // dv = 0.5
        const MacroDensity md = macro_density(s, mesh);
        CHECK(md.rho[2] == doctest::Approx(1.5));
        CHECK(md.rho[0] == 0.0);
        CHECK(md.rho[1] == 0.0);
    }
}

TEST_CASE("macro density single term with quarter-width cell") {
    const Mesh mesh = Mesh::from_interfaces({-1.0, -0.5, 0.0, 0.5}, {-0.25, 0.0, 0.25});
    PhaseState s;
    s.f = Field(3, 2);
    s.g = Field(3, 2);
    s.f(2, 1) = 3.0; // dv = 0.25
    const MacroDensity md = macro_density(s, mesh);
    CHECK(md.rho[2] == doctest::Approx(0.75));
    CHECK(md.rho[0] == 0.0);
    CHECK(md.rho[1] == 0.0);
}

TEST_CASE("mass identity and linearity of macro density") {
    std::mt19937_64 rng(11);
    const Mesh mesh = Mesh::paper_phase(1, 1.0, 6, 5.0);
    for (int trial = 0; trial < 20; ++trial) {
        PhaseState s;
        s.f = random_field(mesh, rng);
        s.g = random_field(mesh, rng);
        const MacroDensity md = macro_density(s, mesh);
        double mass_from_rho = 0.0;
        for (int i = 0; i < mesh.nx(); ++i) mass_from_rho += mesh.dx(i) * md.rho[i];
        CHECK(mass_from_rho == doctest::Approx(total_mass(s.f, mesh)).epsilon(1e-13));

        // rho is linear in the state.
        PhaseState s2 = s;
        const double c = 0.37;
        for (auto& a : s2.f.a) a *= c;
        const MacroDensity md2 = macro_density(s2, mesh);
        for (int i = 0; i < mesh.nx(); ++i) {
            CHECK(md2.rho[i] == doctest::Approx(c * md.rho[i]).epsilon(1e-13));
        }
    }
}

TEST_CASE("interaction with zero kernels vanishes") {
    const Mesh mesh = Mesh::uniform(1.0, 4, 1.0, 2);
    const KernelSet ks{Kernel::zero(1.0), Kernel::zero(1.0), Kernel::zero(1.0), Kernel::zero(1.0)};
    const WeightTables w = WeightTables::build(mesh, ks);
    MacroDensity md;
    md.rho = {1.0, 2.0, 3.0, 4.0};
    md.eta = {4.0, 3.0, 2.0, 1.0};
    const InteractionField ups = interaction(w, md);
    for (int i = 0; i < 4; ++i) {
        CHECK(ups.ups_f[i] == 0.0);
        CHECK(ups.ups_g[i] == 0.0);
    }
}

TEST_CASE("interaction matches the hand oracle on a 4-cell mesh") {
    // K'_11(u) = u, others zero; for linear K' each cell integral is
    // width * (x_i - x_k), so ups_f[i] = sum_k rho_k dx_k (x_i - x_k).
    const Mesh mesh = Mesh::uniform(1.0, 4, 1.0, 2);
    const KernelSet ks{Kernel::quadratic(1.0, 1.0), Kernel::zero(1.0), Kernel::zero(1.0),
                       Kernel::zero(1.0)};
    const WeightTables w = WeightTables::build(mesh, ks);
    MacroDensity md;
    md.rho = {1.0, 2.0, 2.0, 1.0}; // symmetric about x = 0
    md.eta = {9.0, 9.0, 9.0, 9.0}; // must not couple into ups_f
    const InteractionField ups = interaction(w, md);
    const double expected[4] = {-2.25, -0.75, 0.75, 2.25};
    for (int i = 0; i < 4; ++i) {
        CHECK(ups.ups_f[i] == doctest::Approx(expected[i]).epsilon(1e-13));
        // Antisymmetry about the center.
        CHECK(ups.ups_f[i] == doctest::Approx(-ups.ups_f[3 - i]).epsilon(1e-13));
    }
    CHECK(ups.ups_f[1] + ups.ups_f[2] == doctest::Approx(0.0));
}

TEST_CASE("interaction bound and linearity on random densities") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 1.0);
    const Mesh mesh = Mesh::uniform(1.0, 8, 1.0, 2);
    const KernelSet ks{Kernel::quadratic(1.0, 1.0), Kernel::quadratic(0.25, 1.0),
                       Kernel::quadratic(0.25, 1.0), Kernel::quadratic(1.0, 1.0)};
    const double cw = cw_constant(ks);
    const WeightTables w = WeightTables::build(mesh, ks);
    for (int trial = 0; trial < 50; ++trial) {
        MacroDensity md;
        md.rho.resize(8);
        md.eta.resize(8);
        for (auto& r : md.rho) r = val(rng);
        for (auto& e : md.eta) e = val(rng);
        double l1_rho = 0.0, l1_eta = 0.0;
        for (int i = 0; i < 8; ++i) {
            l1_rho += mesh.dx(i) * md.rho[i];
            l1_eta += mesh.dx(i) * md.eta[i];
        }
        const InteractionField ups = interaction(w, md);
        for (int i = 0; i < 8; ++i) {
            CHECK(std::abs(ups.ups_f[i]) <= cw * (l1_rho + l1_eta) * (1 + 1e-12));
            CHECK(std::abs(ups.ups_g[i]) <= cw * (l1_rho + l1_eta) * (1 + 1e-12));
        }

        // Naive double-loop oracle using the weight entries directly.
        for (int i = 0; i < 8; ++i) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) {
                acc += md.rho[k] * w.w11.at(i, k) + md.eta[k] * w.w12.at(i, k);
            }
            CHECK(ups.ups_f[i] == doctest::Approx(acc).epsilon(1e-13));
        }
    }
}

TEST_CASE("snapshot CSV layout") {
    const Mesh mesh = Mesh::uniform(1.0, 2, 1.0, 2);
    PhaseState s;
    s.f = Field(2, 2);
    s.g = Field(2, 2);
    s.f(0, 0) = 1.0 / 3.0;
    std::ostringstream os;
    write_snapshot_csv(os, s, mesh);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "i,j,x_center,v_center,dx,dv,f,g");
    std::getline(is, line);
    CHECK(line == "0,0,-0.5,-0.5,1,1,0.33333333333333331,0");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 3);
}

TEST_CASE("paper initial profile values") {
    RunConfig cfg;
    cfg.initial.type = InitialSpec::Type::PaperSine;
    const InitialData init = build_initial(cfg, 5.0);
    CHECK(init.f0(0.5, 0.0) == doctest::Approx(99.0 / 101.0));
    CHECK(init.g0(0.5, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(init.f0(0.5, 2.0) == doctest::Approx((99.0 / 101.0) * std::pow(2.0, -100.0)));
    CHECK(init.f0(0.0, -0.5) == doctest::Approx(0.5 * 99.0 / 101.0));
    CHECK(init.f0(0.0, 0.0) + init.g0(0.0, 0.0) == doctest::Approx(99.0 / 101.0));
}
