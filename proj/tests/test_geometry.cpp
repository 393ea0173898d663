// Change-of-variables data: Jacobian values, Piola's identity, the
// transformed divergence identity, and the transport fields.

#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "cvs/geometry/geometry.hpp"

using namespace cvs;

namespace {

GeometryBundle make_geometry(const TorusGrid& t, int n3, const FrontField& f) {
    SlabGrid plus(t, n3, Side::plus), minus(t, n3, Side::minus);
    auto chi = CutoffProfile::standard_bump();
    return build_geometry(lift(f, plus, minus, chi));
}

FrontField random_front(const TorusGrid& g, double amp, unsigned seed, int kmax = 3) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FrontField f(g);
    for (int i1 = 0; i1 < g.n1; ++i1)
        for (int i2 = 0; i2 < g.n2; ++i2) {
            if (std::abs(g.wave1(i1)) > kmax || std::abs(g.wave2(i2)) > kmax) continue;
            f.at(i1, i2) = amp * cplx{dist(rng), dist(rng)};
        }
    f.symmetrize();
    return f;
}

VolumeField random_vector(const SlabGrid& g, unsigned seed) {
    return VolumeField::sample_vector(
        g,
        [seed](double x1, double x2, double x3) {
            return std::sin(kTwoPi * (x1 + 0.1 * seed)) * std::cos(2.0 * x3);
        },
        [seed](double x1, double x2, double x3) {
            return std::cos(kTwoPi * (x2 - 0.05 * seed)) + 0.3 * x3;
        },
        [](double x1, double x2, double x3) {
            return std::sin(kTwoPi * x1) * std::sin(kTwoPi * x2) * x3 * x3;
        });
}

} // namespace

TEST_CASE("flat front gives the identity geometry") {
    TorusGrid t(8, 8);
    GeometryBundle g = make_geometry(t, 9, FrontField(t));
    for (const SideGeometry* s : {&g.plus, &g.minus}) {
        CHECK(s->J.max_abs() == Catch::Approx(1.0));
        CHECK(s->A31.max_abs() == 0.0);
        CHECK(s->A32.max_abs() == 0.0);
        CHECK(s->A33.max_abs() == Catch::Approx(1.0));
    }
}

TEST_CASE("constant front: J = 1 - 2 c x3 at the profile level") {
    TorusGrid t(8, 8);
    FrontField f = FrontField::sample(t, [](double, double) { return 0.1; });
    GeometryBundle g = make_geometry(t, 17, f);
    // psi = 0.1 (1 - x3^2), so J(x3) = 1 - 0.2 x3; at x3 = 0.5 that is 0.9
    bool found = false;
    for (int j = 0; j < 17; ++j)
        if (std::abs(g.plus.grid.x3(j) - 0.5) < 1e-12) {
            CHECK(g.plus.J.at(0, 0, 0, j) == Catch::Approx(0.9).margin(1e-11));
            found = true;
        }
    REQUIRE(found);
    // J = 1 on the interface for this polynomial profile
    CHECK((g.plus.J.trace(Wall::interface) -
           FrontField::sample(t, [](double, double) { return 1.0; }))
              .max_abs() < 1e-11);
}

TEST_CASE("piola identity holds to rounding for random admissible lifts") {
    TorusGrid t(16, 16);
    for (unsigned s = 0; s < 5; ++s) {
        GeometryBundle g = make_geometry(t, 11, random_front(t, 0.0005, 40 + s, 5));
        CHECK(piola_residual(g.plus) < 1e-10);
        CHECK(piola_residual(g.minus) < 1e-10);
    }
}

TEST_CASE("transformed divergence identity") {
    TorusGrid t(16, 16);
    GeometryBundle g = make_geometry(t, 11, random_front(t, 0.001, 9));
    for (const SideGeometry* s : {&g.plus, &g.minus}) {
        VolumeField u = random_vector(s->grid, 3);
        VolumeField lhs = div_transformed(*s, u);
        VolumeField rhs = div_residual_form(*s, u);
        CHECK((lhs - rhs).max_abs() < 1e-10);
    }
    // a field with u = (cos(2 pi x2), 0, 0) has zero transformed divergence
    VolumeField u = VolumeField::sample_vector(
        g.plus.grid, [](double, double x2, double) { return std::cos(kTwoPi * x2); },
        [](double, double, double) { return 0.0; }, [](double, double, double) { return 0.0; });
    CHECK(div_transformed(g.plus, u).max_abs() < 1e-11);
}

TEST_CASE("transport fields reduce to v, B on flat static geometry") {
    TorusGrid t(8, 8);
    GeometryBundle g = make_geometry(t, 9, FrontField(t));
    VolumeField v = random_vector(g.plus.grid, 1);
    auto [vt, Bt] = transport_fields(g.plus, v, v);
    CHECK((vt - v).max_abs() < 1e-13);
    CHECK((Bt - v).max_abs() < 1e-13);
}

TEST_CASE("transport velocity cancels the interface motion") {
    // v = (0,0,1) with flat psi and dt psi = 1 gives vt = 0
    TorusGrid t(8, 8);
    SlabGrid plus(t, 9, Side::plus), minus(t, 9, Side::minus);
    LiftedFront zero;
    zero.source = FrontField(t);
    zero.psi_plus = VolumeField::scalar(plus);
    zero.psi_minus = VolumeField::scalar(minus);
    zero.d3psi_plus = zero.psi_plus;
    zero.d3psi_minus = zero.psi_minus;
    LiftedFront unit = zero;
    unit.psi_plus = VolumeField::sample_scalar(plus, [](double, double, double) { return 1.0; });
    unit.psi_minus = VolumeField::sample_scalar(minus, [](double, double, double) { return 1.0; });
    GeometryBundle g = build_geometry(zero, unit);
    VolumeField v = VolumeField::sample_vector(
        g.plus.grid, [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; }, [](double, double, double) { return 1.0; });
    VolumeField vt = transport_velocity(g.plus, v, true);
    CHECK(vt.max_abs() < 1e-13);
}

TEST_CASE("curved geometry rejects steep fronts") {
    TorusGrid t(16, 16);
    SlabGrid plus(t, 9, Side::plus), minus(t, 9, Side::minus);
    FrontField f = FrontField::sample(t, [](double x1, double) { return 0.2 * std::cos(kTwoPi * x1); });
    auto lf = lift(f, plus, minus, CutoffProfile::standard_bump());
    REQUIRE_FALSE(check_diffeomorphism(lf).ok);
    CHECK_THROWS(build_geometry(lf));
}

TEST_CASE("curl reduces to the plain curl on flat geometry") {
    TorusGrid t(16, 8);
    GeometryBundle g = make_geometry(t, 9, FrontField(t));
    VolumeField v = VolumeField::sample_vector(
        g.plus.grid, [](double, double, double) { return 0.0; },
        [](double, double, double) { return 0.0; },
        [](double x1, double, double) { return std::sin(kTwoPi * x1); });
    VolumeField z = curl_transformed(g.plus, v);
    VolumeField exact = VolumeField::sample_vector(
        g.plus.grid, [](double, double, double) { return 0.0; },
        [](double x1, double, double) { return -kTwoPi * std::cos(kTwoPi * x1); },
        [](double, double, double) { return 0.0; });
    CHECK((z - exact).max_abs() < 1e-10);
}
