#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cavity/constants.hpp"
#include "cavity/loss_budget.hpp"

using namespace cavity;

namespace {

CavityGeometry clipping_geometry(double aperture_m) {
    CavityGeometry g;
    g.air_gap_m = 14.3e-6;
    g.membrane_thickness_m = 4.0e-6;
    g.refractive_index = 2.417;
    g.radius_of_curvature_m = 18.4e-6;
    g.aperture_radius_m = aperture_m;
    return g;
}

}  // namespace

TEST_CASE("mirror budget: 50+70+100 ppm gives finesse 2pi/220e-6") {
    const LossBudget bare = bare_finesse({50.0, 70.0}, {0.0, 100.0});
    CHECK(bare.total_ppm() == doctest::Approx(220.0).epsilon(1e-14));
    CHECK(bare.finesse() ==
          doctest::Approx(2.855993321445266e4).epsilon(1e-12));
    CHECK(bare.items.size() == 4);

    LossBudget empty;
    CHECK_THROWS_AS(empty.finesse(), std::domain_error);
}

TEST_CASE("interface scattering at the measured roughness") {
    // 0.35 nm RMS roughness, 636 nm light, diamond index
    const double ppm =
        interface_scattering_loss_ppm({0.35e-9}, 636e-9, 2.417);
    CHECK(ppm == doctest::Approx(96.02433007531803).epsilon(1e-12));
    // quadratic in sigma
    const double ppm2 =
        interface_scattering_loss_ppm({0.70e-9}, 636e-9, 2.417);
    CHECK(ppm2 == doctest::Approx(4.0 * ppm).epsilon(1e-12));
    // vanishes for index-matched membrane
    CHECK(interface_scattering_loss_ppm({0.35e-9}, 636e-9, 1.0) == 0.0);
}

TEST_CASE("adding scattering to the bare budget lands near the projection") {
    const LossBudget bare = bare_finesse({50.0, 70.0}, {0.0, 100.0});
    const double scat =
        interface_scattering_loss_ppm({0.35e-9}, 636e-9, 2.417);
    const LossBudget with_scat = effective_finesse(bare, scat, 0.0, 0.0);
    CHECK(with_scat.finesse() ==
          doctest::Approx(1.988196701716642e4).epsilon(1e-12));
}

TEST_CASE("clipping loss grows with the air gap and inverts exactly") {
    const double nu = 471.3e12;
    const CavityGeometry g = clipping_geometry(4.0e-6);
    const double base = clipping_loss_ppm(g, nu);
    CHECK(base > 0.0);

    CavityGeometry longer = g;
    longer.air_gap_m += 1.0e-6;
    CHECK(clipping_loss_ppm(longer, nu) > base);

    // calibrate_aperture is the exact inverse of the clipping law
    for (double target : {50.0, 316.0, 2000.0}) {
        CavityGeometry cal = g;
        cal.aperture_radius_m = calibrate_aperture(g, nu, target);
        CHECK(clipping_loss_ppm(cal, nu) ==
              doctest::Approx(target).epsilon(1e-9));
    }

    CavityGeometry no_aperture = clipping_geometry(0.0);
    CHECK_THROWS_AS(clipping_loss_ppm(no_aperture, nu), std::invalid_argument);
}

TEST_CASE("plane-mirror penalty pins diamond-like finesse to one third") {
    const LossBudget bare = bare_finesse({50.0, 70.0}, {0.0, 100.0});
    const double scat =
        interface_scattering_loss_ppm({0.35e-9}, 636e-9, 2.417);
    const double penalty = threefold_plane_penalty_ppm(bare, scat);
    CHECK(penalty == doctest::Approx(2.0 * 220.0 - scat).epsilon(1e-14));

    // C = 0: fully diamond-like, one third of the bare finesse
    const LossBudget diamond = effective_finesse(bare, scat, 0.0, penalty);
    CHECK(diamond.finesse() * 3.0 ==
          doctest::Approx(bare.finesse()).epsilon(1e-12));

    // C = 1: air-like mode reproduces the bare budget exactly
    const LossBudget air = effective_finesse(bare, scat, 1.0, penalty);
    CHECK(air.finesse() == doctest::Approx(bare.finesse()).epsilon(1e-15));

    // finesse falls monotonically as the mode turns diamond-like
    double prev = 1e300;
    for (double c : {1.0, 0.75, 0.5, 0.25, 0.0}) {
        const double f = effective_finesse(bare, scat, c, penalty).finesse();
        CHECK(f < prev);
        prev = f;
    }
}

TEST_CASE("penalty calibration rejects budgets it cannot represent") {
    // scattering alone already exceeding twice the bare loss is unphysical
    const LossBudget tiny = bare_finesse({1.0, 1.0}, {0.0, 1.0});
    CHECK_THROWS_AS(threefold_plane_penalty_ppm(tiny, 1000.0),
                    std::domain_error);
}
