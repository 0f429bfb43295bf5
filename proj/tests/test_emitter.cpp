#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cavity/constants.hpp"
#include "cavity/emitter.hpp"

using namespace cavity;

namespace {

// m = 45 operating point at 471.3 THz with a 4 um membrane
CavityGeometry m45_geometry() {
    CavityGeometry g;
    g.air_gap_m = 4.683828826974272e-6;
    g.membrane_thickness_m = 4.0e-6;
    g.refractive_index = 2.417;
    g.radius_of_curvature_m = 18.4e-6;
    return g;
}

EmitterSpec nv_center() {
    EmitterSpec e;
    e.zpl_branching = 0.03;
    e.free_lifetime_s = 12e-9;
    return e;
}

}  // namespace

TEST_CASE("quality factor and Purcell factor at frozen reference values") {
    const CavityGeometry g = m45_geometry();
    const double nu = resonance_approx(45, g);
    CHECK(nu == doctest::Approx(471.3e12).epsilon(1e-10));
    CHECK(quality_factor(5000.0, g, nu) ==
          doctest::Approx(2.256233185877202e5).epsilon(1e-9));
    CHECK(purcell_factor(7.5e5, 30e-18, 471.3e12, 2.417) ==
          doctest::Approx(3.462911279336139e1).epsilon(1e-12));
    CHECK_THROWS_AS(purcell_factor(0.0, 30e-18, 471.3e12, 2.417),
                    std::invalid_argument);
}

TEST_CASE("Gaussian width conversions invert each other") {
    CHECK(fwhm_from_sigma(1.0) ==
          doctest::Approx(2.3548200450309493).epsilon(1e-14));
    CHECK(sigma_from_fwhm(fwhm_from_sigma(0.37)) ==
          doctest::Approx(0.37).epsilon(1e-14));
}

TEST_CASE("dipole and position mismatch penalties") {
    const double nu = 471.3e12;
    const double lambda = kSpeedOfLight / nu;

    EmitterSpec e = nv_center();
    CHECK(mismatch_factor(e, nu, 2.417) == 1.0);

    e.dipole_mismatch_rad = kPi / 6.0;  // 30 degrees
    e.antinode_offset_m = lambda / (10.0 * 2.417);
    CHECK(mismatch_factor(e, nu, 2.417) ==
          doctest::Approx(4.908813728906053e-1).epsilon(1e-12));

    // past the nearest node the offset bookkeeping is meaningless
    e.antinode_offset_m = 1.01 * lambda / (4.0 * 2.417);
    CHECK_THROWS_AS(mismatch_factor(e, nu, 2.417), std::invalid_argument);
}

TEST_CASE("on-resonance emission at the measured finesse range") {
    const CavityGeometry g = m45_geometry();
    const double nu = resonance_approx(45, g);
    const EmitterSpec e = nv_center();
    const GaussianMode mode = beam_waist_and_mode_volume(g, nu);
    CHECK(mode.mode_volume_m3 ==
          doctest::Approx(1.995578713024155e-17).epsilon(1e-9));

    auto p_at = [&](double finesse) {
        const double q = quality_factor(finesse, g, nu);
        const double fp = purcell_factor(q, mode.mode_volume_m3, nu, 2.417);
        return emission_on_resonance(fp, e, nu, 2.417);
    };
    const EmissionResult r5000 = p_at(5000.0);
    CHECK(r5000.purcell_factor ==
          doctest::Approx(1.566089134383767e1).epsilon(1e-9));
    CHECK(r5000.p_zpl_cavity ==
          doctest::Approx(3.196477022961220e-1).epsilon(1e-9));
    CHECK(r5000.lifetime_s ==
          doctest::Approx(8.164227572446537e-9).epsilon(1e-9));
    CHECK(p_at(4000.0).p_zpl_cavity ==
          doctest::Approx(2.731825999106410e-1).epsilon(1e-9));
    CHECK(p_at(15000.0).p_zpl_cavity ==
          doctest::Approx(5.849727292604057e-1).epsilon(1e-9));

    // identities: p = F beta / (1 + F beta), tau (1 + F beta) = tau_0
    const double fb = r5000.purcell_factor * e.zpl_branching;
    CHECK(r5000.p_zpl_cavity == doctest::Approx(fb / (1.0 + fb)).epsilon(1e-14));
    CHECK(r5000.lifetime_s * (1.0 + fb) ==
          doctest::Approx(e.free_lifetime_s).epsilon(1e-14));
}

TEST_CASE("detuning halves the Purcell factor at half the FWHM displacement") {
    const CavityGeometry g = m45_geometry();
    const double dl_fwhm = 8.321488295707067e-11;  // (FSR/F)/slope at F=5000
    const double fp = 15.66;
    CHECK(detuned_purcell(fp, 0.0, 45, g, 5000.0) == fp);
    CHECK(detuned_purcell(fp, dl_fwhm / 2.0, 45, g, 5000.0) ==
          doctest::Approx(fp / 2.0).epsilon(1e-9));
    CHECK(detuned_purcell(fp, -dl_fwhm / 2.0, 45, g, 5000.0) ==
          doctest::Approx(fp / 2.0).epsilon(1e-9));
}

TEST_CASE("vibration averaging: limits, monotonicity, frozen values") {
    const CavityGeometry g = m45_geometry();
    const EmitterSpec e = nv_center();

    // sigma = 0 is exactly the resonant result
    const EmissionResult still =
        vibration_averaged_emission(e, g, 45, 5000.0, {0.0});
    CHECK(still.p_zpl_cavity ==
          doctest::Approx(3.196477022961220e-1).epsilon(1e-9));

    // p_zpl falls monotonically with the vibration amplitude
    double prev = 1.0;
    for (double sigma : {0.0, 0.1e-9, 0.2e-9, 0.4e-9, 0.8e-9}) {
        const double p =
            vibration_averaged_emission(e, g, 45, 5000.0, {sigma})
                .p_zpl_cavity;
        CHECK(p < prev + 1e-15);
        prev = p;
    }

    // frozen against the scaled-erfc closed form (cross-checked with
    // adaptive quadrature): sigma_L equivalent to the 22.2 GHz broadening
    // at this slope
    const VibrationSpec v{3.755630004926488e-10};
    const EmissionResult ideal =
        vibration_averaged_emission(e, g, 45, 5000.0, v);
    CHECK(ideal.p_zpl_cavity ==
          doctest::Approx(4.849496881019151e-2).epsilon(1e-8));
    CHECK(ideal.purcell_factor ==
          doctest::Approx(1.994906075291322).epsilon(1e-8));
    CHECK(ideal.lifetime_s ==
          doctest::Approx(1.132238703925756e-8).epsilon(1e-8));

    EmitterSpec off = e;
    off.dipole_mismatch_rad = kPi / 6.0;
    off.antinode_offset_m =
        kSpeedOfLight / resonance_approx(45, g) / (10.0 * 2.417);
    const EmissionResult mis =
        vibration_averaged_emission(off, g, 45, 5000.0, v);
    CHECK(mis.p_zpl_cavity ==
          doctest::Approx(2.624067087172049e-2).epsilon(1e-8));
    CHECK(mis.p_zpl_cavity < ideal.p_zpl_cavity);

    // node count below 64 is rejected; above it the result is exact, so
    // doubling the count cannot move it
    CHECK_THROWS_AS(vibration_averaged_emission(e, g, 45, 5000.0, v, 32),
                    std::invalid_argument);
    const double p128 =
        vibration_averaged_emission(e, g, 45, 5000.0, v, 128).p_zpl_cavity;
    CHECK(ideal.p_zpl_cavity == p128);
}

TEST_CASE("entanglement gain is the squared product of the improvements") {
    CHECK(entanglement_rate_gain(13.0, 3.0) == 1521.0);
    CHECK(entanglement_rate_gain(1.0, 1.0) == 1.0);
    CHECK_THROWS_AS(entanglement_rate_gain(-1.0, 3.0), std::invalid_argument);
}
