#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "kfv/config.hpp"
#include "kfv/eoc.hpp"
#include "kfv/error.hpp"

using namespace kfv;

namespace {

Field random_field(const Mesh& mesh, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(0.0, 1.0);
    Field f(mesh.nx(), mesh.nv());
    for (auto& a : f.a) a = val(rng);
    return f;
}

} // namespace

TEST_CASE("restriction basics") {
    const Mesh coarse = Mesh::from_interfaces({0.0, 2.0}, {0.0, 1.0});
    const Mesh fine = Mesh::from_interfaces({0.0, 1.0, 2.0}, {0.0, 1.0});

    SUBCASE("identity on matching meshes") {
        Field f(1, 1);
        f(0, 0) = 3.25;
        const Field r = restrict_field(f, coarse, coarse);
        CHECK(r(0, 0) == 3.25);
    }

    SUBCASE("weighted average of children") {
        Field f(2, 1);
        f(0, 0) = 1.0;
        f(1, 0) = 3.0;
        const Field r = restrict_field(f, fine, coarse);
        CHECK(r(0, 0) == doctest::Approx(2.0));
    }

    SUBCASE("constants are reproduced") {
        Field f(2, 1);
        f(0, 0) = f(1, 0) = 0.7;
        const Field r = restrict_field(f, fine, coarse);
        CHECK(r(0, 0) == doctest::Approx(0.7).epsilon(1e-15));
    }

    SUBCASE("non-nested meshes are rejected with the offending interface") {
        const Mesh other = Mesh::from_interfaces({0.0, 0.7, 2.0}, {0.0, 1.0});
        CHECK_THROWS_WITH_AS(static_cast<void>(restrict_field(Field(2, 1), other, fine)),
                             doctest::Contains("not nested"), EocError);
    }
}

TEST_CASE("restriction preserves mass and is a projection") {
    std::mt19937_64 rng(19);
    const Mesh coarse = Mesh::paper_phase(1, 1.0, 6, 5.0);
    const Mesh fine = coarse.bisected().bisected();
    for (int trial = 0; trial < 20; ++trial) {
        const Field f = random_field(fine, rng);
        const Field r = restrict_field(f, fine, coarse);
        CHECK(total_mass(r, coarse) == doctest::Approx(total_mass(f, fine)).epsilon(1e-13));
    }
    // Projection: restricting a coarse field to itself is the identity.
    const Field c = random_field(coarse, rng);
    const Field rc = restrict_field(c, coarse, coarse);
    for (size_t k = 0; k < c.a.size(); ++k) CHECK(rc.a[k] == doctest::Approx(c.a[k]).epsilon(1e-15));
}

TEST_CASE("error norms") {
    const Mesh mesh = Mesh::uniform(1.0, 2, 2.0, 2); // measure 8
    auto make_run = [&](double fval) {
        std::vector<PhaseState> run(3);
        for (auto& s : run) {
            s.f = Field(2, 2);
            s.g = Field(2, 2);
            for (auto& a : s.f.a) a = fval;
        }
        return run;
    };

    SUBCASE("identical runs have zero error") {
        const auto a = make_run(0.4);
        const auto [e1, e2] = error_norms(a, a, mesh, 0.1);
        CHECK(e1 == 0.0);
        CHECK(e2 == 0.0);
    }

    SUBCASE("constant offset integrates to delta * measure") {
        const double delta = 0.25;
        const auto a = make_run(0.5);
        const auto b = make_run(0.5 + delta);
        const auto [e1, e2] = error_norms(a, b, mesh, 0.1);
        const double vol = 3 * 0.1 * 8.0; // snapshots * dt * phase measure
        CHECK(e1 == doctest::Approx(delta * vol).epsilon(1e-14));
        CHECK(e2 == doctest::Approx(delta * delta * vol).epsilon(1e-14));
    }

    SUBCASE("triangle inequality on random fields") {
        std::mt19937_64 rng(29);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<PhaseState> a(1), b(1), c(1);
            for (auto* run : {&a, &b, &c}) {
                (*run)[0].f = random_field(mesh, rng);
                (*run)[0].g = random_field(mesh, rng);
            }
            const double ac = error_norms(a, c, mesh, 1.0).first;
            const double ab = error_norms(a, b, mesh, 1.0).first;
            const double bc = error_norms(b, c, mesh, 1.0).first;
            CHECK(ac <= ab + bc + 1e-14);
        }
    }

    SUBCASE("mismatched grids are rejected") {
        std::vector<PhaseState> a(1), b(1);
        a[0].f = Field(2, 2);
        a[0].g = Field(2, 2);
        b[0].f = Field(2, 4);
        b[0].g = Field(2, 4);
        CHECK_THROWS_AS(error_norms(a, b, mesh, 0.1), EocError);
    }
}

TEST_CASE("eoc formula") {
    SUBCASE("exact power law is recovered") {
        // err = C s^p with p = 2: (4, 1) at steps (2, 1).
        const auto out = eoc({4.0, 1.0}, {2.0, 1.0});
        REQUIRE(out.size() == 1);
        CHECK(*out[0] == doctest::Approx(2.0).epsilon(1e-12));

        std::vector<double> errs, steps;
        for (int l = 0; l < 5; ++l) {
            steps.push_back(std::pow(0.5, l));
            errs.push_back(3.7 * std::pow(steps.back(), 1.37));
        }
        for (const auto& e : eoc(errs, steps)) CHECK(*e == doctest::Approx(1.37).epsilon(1e-12));
    }

    SUBCASE("published level-1 table values") {
        const std::vector<double> errs{75.4033, 37.0549, 18.1502, 8.76259, 4.08463, 1.74958};
        std::vector<double> dts;
        for (int l = 0; l < 6; ++l) dts.push_back(5e-4 / (1 << l));
        const auto out = eoc(errs, dts);
        const double expected[5] = {1.02, 1.03, 1.05, 1.10, 1.22};
        REQUIRE(out.size() == 5);
        for (int k = 0; k < 5; ++k) {
            CHECK(std::round(*out[k] * 100.0) / 100.0 == doctest::Approx(expected[k]));
        }
    }

    SUBCASE("invalid inputs") {
        CHECK_THROWS_AS(eoc({1.0}, {1.0}), EocError);
        CHECK_THROWS_AS(eoc({1.0, 0.5}, {1.0, 1.0}), EocError); // steps not decreasing
        CHECK_THROWS_AS(eoc({1.0, 0.5}, {1.0}), EocError);
        const auto out = eoc({1.0, 0.0}, {1.0, 0.5}); // zero error -> absent
        CHECK_FALSE(out[0].has_value());
    }
}

TEST_CASE("time study smoke run") {
    RunConfig cfg;
    cfg.initial.type = InitialSpec::Type::PaperSine;
    const InitialData init = build_initial(cfg, 5.0);
    const KernelSet ks{Kernel::quadratic(1.0, 1.0), Kernel::quadratic(0.25, 1.0),
                       Kernel::quadratic(0.25, 1.0), Kernel::quadratic(1.0, 1.0)};
    const Mesh mesh = Mesh::paper_phase(1, 1.0, 6, 5.0);
    const ErrorReport rep = run_time_eoc(mesh, ks, init.f0, init.g0, 2e-3, 0.04, 2, 1, 0.1);

    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.study == "time");
    CHECK(rep.reference_level == 3);
    CHECK(rep.rows[0].dt == 2e-3);
    CHECK(rep.rows[1].dt == 1e-3);
    CHECK(rep.rows[0].xv_cells == 72);
    CHECK(rep.rows[0].txv_cells == 72 * 20);
    CHECK(rep.rows[1].err1 < rep.rows[0].err1); // finer dt, smaller error
    CHECK_FALSE(rep.rows[0].eoc1.has_value());
    CHECK(rep.rows[1].eoc1.has_value());

    // Misaligned T / dt is rejected.
    CHECK_THROWS_AS(run_time_eoc(mesh, ks, init.f0, init.g0, 3e-3, 0.04, 2, 1, 0.1), EocError);
}

TEST_CASE("space study smoke run") {
    RunConfig cfg;
    cfg.initial.type = InitialSpec::Type::PaperSine;
    const InitialData init = build_initial(cfg, 5.0);
    const KernelSet ks{Kernel::quadratic(1.0, 1.0), Kernel::quadratic(0.25, 1.0),
                       Kernel::quadratic(0.25, 1.0), Kernel::quadratic(1.0, 1.0)};
    const Mesh mesh = Mesh::uniform(1.0, 6, 5.0, 12);
    const ErrorReport rep =
        run_space_eoc(mesh, ks, init.f0, init.g0, 1e-3, 0.05, 2, 1, 0.1, MeshFamily::Equidistant);

    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.mesh_family == "equidistant");
    CHECK(rep.rows[0].xv_cells == 72);
    CHECK(rep.rows[1].xv_cells == 288);
    CHECK(rep.rows[1].h == doctest::Approx(rep.rows[0].h / 2));
    CHECK(rep.rows[1].err1 < rep.rows[0].err1);
}

TEST_CASE("eoc csv serialization leaves level-1 entries empty") {
    ErrorReport rep;
    rep.rows.resize(2);
    rep.rows[0] = LevelRow{1, 72, 1440, 1e-3, 0.25, 3.75, 0.5, 0.0625, std::nullopt, std::nullopt};
    rep.rows[1] = LevelRow{2, 288, 5760, 1e-3, 0.125, 1.875, 0.25, 0.03125, 1.0, 2.0};
    std::ostringstream os;
    write_eoc_csv(os, rep);
    std::istringstream is(os.str());
    std::string header, row1, row2;
    std::getline(is, header);
    std::getline(is, row1);
    std::getline(is, row2);
    CHECK(header == "level,xv_cells,txv_cells,dt,alpha_h,h,err1,eoc1,err2,eoc2");
    CHECK(row1 == "1,72,1440,0.001,0.25,3.75,0.5,,0.0625,");
    CHECK(row2 == "2,288,5760,0.001,0.125,1.875,0.25,1,0.03125,2");
}
