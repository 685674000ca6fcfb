#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ckepler/orbit.hpp"
#include "ckepler/trajectory.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ckepler;
using std::numbers::pi;

TEST(OrbitConstants, ReferenceValues) {
    const KeplerParams flat(Curvature(0.0), 1.0);
    const auto circle = orbit_constants({1.0, 0.7, 0.0, 1.0}, flat);
    EXPECT_NEAR(circle.ecc, 0.0, 1e-8);
    EXPECT_EQ(circle.phi0, 0.0);
    EXPECT_DOUBLE_EQ(circle.d, 1.0);

    // E = 0 with J = 1: v_r^2 = 2/r - 1/r^2 at r = 2.
    const auto parabola = orbit_constants({2.0, 0.0, std::sqrt(0.75), 0.25}, flat);
    EXPECT_NEAR(parabola.ecc, 1.0, 1e-15);

    const KeplerParams hyp(Curvature(-1.0), 1.0);
    const PhaseState x = periastron_state(hyp, 1.0, 0.0, 0.4);
    const auto oc = orbit_constants(x, hyp);
    EXPECT_NEAR(oc.ecc, std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(oc.phi0, 0.4, 1e-14);
    EXPECT_NEAR(oc.alpha(), 2 * oc.conserved.e_p, 1e-14);
    EXPECT_NEAR(oc.beta(), 2.0, 1e-14);

    EXPECT_THROW(orbit_constants({1.0, 0.0, 0.3, 0.0}, flat), RadialOrbitError);
}

class OrbitByRegime : public ::testing::TestWithParam<double> {};

TEST_P(OrbitByRegime, EccentricityFromRungeLenz) {
    const double kv = GetParam();
    const KeplerParams p(Curvature(kv), 1.0);
    gen::Rng rng(gen::default_seed);
    for (int i = 0; i < 1000; ++i) {
        PhaseState x = gen::random_state(kv, rng);
        x.v_r *= 0.2;
        x.v_phi *= 0.2;
        if (x.v_phi == 0.0) continue;
        const auto oc = orbit_constants(x, p);
        EXPECT_NEAR(oc.ecc * p.k, std::hypot(oc.conserved.i3, oc.conserved.i4), 1e-11 * std::max(1.0, oc.ecc));
        EXPECT_DOUBLE_EQ(oc.d, oc.conserved.j * oc.conserved.j / p.k);
    }
}

TEST_P(OrbitByRegime, ClosedFormPassesThroughInitialState) {
    const double kv = GetParam();
    const KeplerParams p(Curvature(kv), 1.0);
    gen::Rng rng(gen::default_seed + 1);
    for (int i = 0; i < 500; ++i) {
        const auto b = gen::random_bounded_orbit(kv, p.k, rng);
        const auto oc = orbit_constants(b.state, p);
        EXPECT_NEAR(oc.ecc, b.ecc, 1e-12);
        const double u = (oracle::cos_k(kv, b.state.r) / oracle::sin_k(kv, b.state.r)).convert_to<double>();
        EXPECT_NEAR(orbit_u(oc, b.state.phi), u, 1e-11 * std::max(1.0, std::abs(u)));
        // The sign of du/dphi matches the radial velocity: dr = -du / (u^2 + kappa).
        const double du = -oc.ecc * std::sin(b.state.phi - oc.phi0) / oc.d;
        if (std::abs(b.state.v_r) > 1e-8) { EXPECT_EQ(du < 0, b.state.v_r > 0); }
        EXPECT_NEAR(std::remainder(oc.phi0 - b.phi0, 2 * pi), 0.0, 1e-10);
    }
}

TEST_P(OrbitByRegime, BinetResidualVanishes) {
    const double kv = GetParam();
    const KeplerParams p(Curvature(kv), 1.0);
    gen::Rng rng(gen::default_seed + 2);
    for (int i = 0; i < 100; ++i) {
        const auto oc = orbit_constants(gen::random_bounded_orbit(kv, p.k, rng).state, p);
        for (int s = 0; s < 32; ++s) EXPECT_NEAR(binet_residual(oc, p.kappa, 2 * pi * s / 32), 0.0, 1e-12);
    }
}

TEST_P(OrbitByRegime, ClosedFormMatchesIntegrator) {
    const double kv = GetParam();
    const KeplerParams p(Curvature(kv), 1.0);
    gen::Rng rng(gen::default_seed + 3);
    for (int i = 0; i < 10; ++i) {
        const auto b = gen::random_bounded_orbit(kv, p.k, rng);
        const auto oc = orbit_constants(b.state, p);
        const Trajectory tr = integrate(b.state, p, 15.0, 1e-11);
        ASSERT_EQ(tr.event(), TrajectoryEvent::none);
        for (std::size_t s = 0; s < tr.size(); ++s) {
            const PhaseState x = tr.state(s);
            const double u = (oracle::cos_k(kv, x.r) / oracle::sin_k(kv, x.r)).convert_to<double>();
            EXPECT_NEAR(orbit_u(oc, x.phi), u, 1e-6 * std::max(1.0, std::abs(u)));
        }
    }
}

TEST_P(OrbitByRegime, PhiFromTimeMatchesIntegrator) {
    const double kv = GetParam();
    const KeplerParams p(Curvature(kv), 1.0);
    gen::Rng rng(gen::default_seed + 4);
    for (int i = 0; i < 5; ++i) {
        const auto b = gen::random_bounded_orbit(kv, p.k, rng);
        const auto oc = orbit_constants(b.state, p);
        const Trajectory tr = integrate(b.state, p, 12.0, 1e-12);
        std::vector<double> grid;
        for (int s = 0; s <= 120; ++s) grid.push_back(0.1 * s);
        const auto phis = phi_from_time(oc, p.kappa, b.state.phi, grid);
        ASSERT_EQ(phis.size(), grid.size());
        EXPECT_EQ(phis.front(), b.state.phi);
        for (std::size_t s = 0; s < grid.size(); ++s) EXPECT_NEAR(phis[s], tr.at(grid[s]).phi, 1e-7);
    }
}

TEST_P(OrbitByRegime, RadialPeriodMatchesIntegrator) {
    const double kv = GetParam();
    const KeplerParams p(Curvature(kv), 1.0);
    gen::Rng rng(gen::default_seed + 5);
    for (int i = 0; i < 5; ++i) {
        const auto b = gen::random_bounded_orbit(kv, p.k, rng);
        const auto oc = orbit_constants(b.state, p);
        const auto period = radial_period(oc, p.kappa);
        ASSERT_TRUE(period);
        const PhaseState x0 = periastron_state(p, oc.conserved.j, oc.conserved.e, oc.phi0);
        const Trajectory tr = integrate(x0, p, 2.5 * *period, 1e-12);
        const auto peri = tr.crossings([](const PhaseState& x) { return x.v_r; }, +1);
        ASSERT_GE(peri.size(), 2u);
        EXPECT_NEAR(peri[1] - peri[0], *period, 1e-6 * *period);
    }
}

INSTANTIATE_TEST_SUITE_P(Regimes, OrbitByRegime, ::testing::Values(1.0, 0.0, -1.0));

TEST(OrbitRadius, ReferenceValues) {
    OrbitConstants oc;
    oc.d = 1.0;
    oc.ecc = 0.0;
    for (double phi : {0.0, 1.0, 4.0}) EXPECT_DOUBLE_EQ(*orbit_radius(oc, Curvature(0.0), phi), 1.0);

    oc.ecc = 1.0;
    EXPECT_NEAR(*orbit_radius(oc, Curvature(1.0), pi), pi / 2, 1e-15);
    EXPECT_FALSE(orbit_radius(oc, Curvature(0.0), pi));
    oc.phi0 = 0.3;
    const double r_per = *orbit_radius(oc, Curvature(1.0), 0.3);
    EXPECT_NEAR(tan_k(Curvature(1.0), r_per), 0.5, 1e-15);

    oc.ecc = 1.5;
    EXPECT_TRUE(orbit_radius(oc, Curvature(1.0), 0.3 + pi));
    EXPECT_GT(*orbit_radius(oc, Curvature(1.0), 0.3 + pi), pi / 2);
    EXPECT_FALSE(orbit_radius(oc, Curvature(-1.0), 0.3 + pi));
}

TEST(OrbitRadius, ContinuousThroughTheEquator) {
    OrbitConstants oc;
    oc.d = 1.0;
    oc.ecc = 1.8;
    double prev = *orbit_radius(oc, Curvature(1.0), 0.0);
    for (int i = 1; i <= 2000; ++i) {
        const double r = *orbit_radius(oc, Curvature(1.0), pi * i / 2000.0);
        EXPECT_LT(std::abs(r - prev), 0.01);
        EXPECT_GT(r, prev);
        EXPECT_LT(r, pi);
        prev = r;
    }
}

TEST(Identities, USquaredPlusKappa) {
    for (double kv : {1.0, 0.0, -1.0, 3.0}) {
        const Curvature kappa(kv);
        for (int i = 1; i < 100; ++i) {
            const double r = 0.99 * gen::radius_bound(kv) * i / 100.0;
            const double u = cot_k(kappa, r), s = sin_k(kappa, r);
            EXPECT_NEAR((u * u + kv) * s * s, 1.0, 1e-13);
        }
    }
}

TEST(Identities, RadialSubstitution) {
    for (double kv : {1.0, 0.0, -1.0}) {
        const Curvature kappa(kv);
        for (double r : {0.3, 0.8, 1.4}) {
            const double h = 1e-5;
            const double du_dr = (cot_k(kappa, r + h) - cot_k(kappa, r - h)) / (2 * h);
            const double u = cot_k(kappa, r);
            EXPECT_NEAR(-1.0 / du_dr, 1.0 / (u * u + kv), 1e-8);
        }
    }
}

TEST(TimeFromU, TrivialAndForbidden) {
    const KeplerParams p(Curvature(0.0), 1.0);
    const auto oc = orbit_constants(periastron_state(p, 1.0, -0.3, 0.0), p);
    EXPECT_EQ(time_from_u(oc, p.kappa, 1.2, 1.2), 0.0);
    EXPECT_THROW(time_from_u(oc, p.kappa, 0.0, 1.0), DomainError);
    EXPECT_THROW(time_from_u(oc, p.kappa, 1.0, 3.0), DomainError);
    EXPECT_DOUBLE_EQ(time_from_u(oc, p.kappa, 1.0, 1.2), time_from_u(oc, p.kappa, 1.2, 1.0));
}

TEST(TimeFromU, KeplersThirdLaw) {
    const KeplerParams p(Curvature(0.0), 1.0);
    // e = 0.01 and a = 1: D = a (1 - e^2), E = -k / (2a).
    const double ecc = 0.01;
    const double j = std::sqrt(1.0 - ecc * ecc);
    const auto oc = orbit_constants(periastron_state(p, j, -0.5, 0.0), p);
    EXPECT_NEAR(oc.ecc, ecc, 1e-12);
    EXPECT_NEAR(*radial_period(oc, p.kappa), 2 * pi, 2 * pi * 1e-3);
    EXPECT_NEAR(*radial_period(oc, p.kappa), 2 * pi, 1e-9);
}

TEST(TimeFromU, OpenOrbitsHaveNoPeriod) {
    const KeplerParams p(Curvature(-1.0), 1.0);
    const auto oc = orbit_constants(periastron_state(p, 0.5, -0.5, 0.0), p);
    EXPECT_FALSE(radial_period(oc, p.kappa));
}

TEST(PhiFromTime, CircularAndFlatSlopes) {
    for (double kv : {1.0, 0.0, -1.0}) {
        const KeplerParams p(Curvature(kv), 1.0);
        const double j = 0.6;
        const PhaseState x0 = periastron_state(p, j, circular_energy(p.kappa, p.k, j), 0.0);
        const auto oc = orbit_constants(x0, p);
        const std::vector<double> grid{0.0, 1.0, 2.0, 5.0};
        const auto phis = phi_from_time(oc, p.kappa, 0.0, grid);
        const double s = sin_k(p.kappa, x0.r);
        for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_NEAR(phis[i], j / (s * s) * grid[i], 1e-7 * std::max(1.0, phis[i]));
    }
    const KeplerParams flat(Curvature(0.0), 1.0);
    const PhaseState x0 = periastron_state(flat, 1.0, -0.2, 0.0);
    const auto oc = orbit_constants(x0, flat);
    const Trajectory tr = integrate(x0, flat, 3.0, 1e-12);
    const auto phis = phi_from_time(oc, flat.kappa, 0.0, {0.0, 0.5, 1.0});
    const double h = 1e-4;
    const auto near = phi_from_time(oc, flat.kappa, 0.0, {1.0 - h, 1.0 + h});
    const double r = tr.at(1.0).r;
    EXPECT_NEAR((near[1] - near[0]) / (2 * h), 1.0 / (r * r), 1e-7);
    EXPECT_EQ(phis[0], 0.0);
    EXPECT_THROW(phi_from_time(oc, flat.kappa, 0.0, {1.0, 0.5}), std::out_of_range);
    EXPECT_THROW(phi_from_time(oc, flat.kappa, 0.0, {-1.0, 0.5}), std::out_of_range);
}

TEST(PeriastronState, RejectsInfeasibleEnergy) {
    const KeplerParams p(Curvature(0.0), 1.0);
    EXPECT_THROW(periastron_state(p, 1.0, -0.6, 0.0), InfeasibleError);
    EXPECT_THROW(periastron_state(p, 0.0, -0.6, 0.0), RadialOrbitError);
}
