#pragma once

// Mode structure of a plano-concave Fabry-Perot microcavity containing a
// high-index membrane (diamond) that rests on the plane mirror.
//
// The one-dimensional lossless model treats the cavity as an air gap L_a in
// series with a dielectric slab of thickness d and index n_d, bounded by
// perfect mirrors (field nodes at both mirror surfaces).  Two solvers are
// provided:
//
//   resonance_approx  - closed-form dispersion relation
//                         nu = c/(2 pi (L_a + n_d d)) *
//                              { pi m - (-1)^m asin(r sin(m pi (L_a - n_d d)
//                                                         /(L_a + n_d d))) }
//                       with r = (n_d - 1)/(n_d + 1)
//   resonance_exact   - root finder for the exact characteristic equation
//                         n_d tan(k L_a) + tan(n_d k d) = 0
//
// plus slopes, air-like mode character, FSR and Gaussian mode geometry.

#include <utility>
#include <vector>

namespace cavity {

struct CavityGeometry {
    double air_gap_m = 0.0;             // L_a
    double membrane_thickness_m = 0.0;  // d; 0 means bare cavity
    double refractive_index = 1.0;      // n_d
    double radius_of_curvature_m = 0.0; // R of the curved (fiber) mirror
    double aperture_radius_m = 0.0;     // usable mirror aperture; 0 = not set
};

// Throws std::invalid_argument if lengths or index are out of range
// (L_a > 0, d >= 0, n_d >= 1, R > 0 when used, a >= 0).
void validate(const CavityGeometry& g);

// Effective lengths. L_g enters Gaussian beam propagation, L_eff the cavity
// energy (FSR, mode volume).
double geometric_length(const CavityGeometry& g);  // L_g = L_a + d/n_d
double optical_length(const CavityGeometry& g);    // L_eff = L_a + n_d*d

struct ResonantMode {
    int index = 0;               // longitudinal order m (>= 1)
    double frequency_hz = 0.0;
    double slope_hz_per_m = 0.0; // |d nu / d L_a|, see frequency_slope()
    double air_character = 0.0;  // 1 = air-like, 0 = diamond-like
};

// Closed-form resonance frequency of order m.  d = 0 returns the bare-cavity
// ladder c*m/(2 L_a) exactly.
double resonance_approx(int m, const CavityGeometry& g);

// All roots of the exact characteristic equation with frequency inside
// [nu_min_hz, nu_max_hz], as (m, nu) pairs ordered by frequency.  Mode
// indices count consecutive roots from k = 0, which reproduces m of the
// bare ladder in the d -> 0 limit.  Bisection to relative 1e-12 or better.
std::vector<std::pair<int, double>> resonance_exact(const CavityGeometry& g,
                                                    double nu_min_hz,
                                                    double nu_max_hz);

// Magnitude of d nu / d L_a for branch m (nu falls as the cavity lengthens;
// the positive rate is returned).  Analytic derivative of the closed form.
double frequency_slope(int m, const CavityGeometry& g);

// Air-like character C in [0, 1]: the slope extrema of branch m are located
// within +-1.6 avoided-crossing periods of g.air_gap_m (grid scan plus
// golden-section refinement); C interpolates linearly in frequency between
// the maximum-slope point (C = 1) and the minimum-slope point (C = 0).
// d = 0 returns 1 (bare cavity is fully air-like).
// Throws std::runtime_error if no full steep-flat cycle fits in the window.
double air_character(int m, const CavityGeometry& g);

// Free spectral range c / (2 (L_a + n_d d)).
double fsr(const CavityGeometry& g);

struct GaussianMode {
    double waist_m = 0.0;        // w0 on the plane mirror
    double mirror_spot_m = 0.0;  // w_m on the curved mirror
    double mode_volume_m3 = 0.0; // V = (pi/4) w0^2 L_eff
};

// Gaussian fundamental mode of the plano-concave resonator.
//   w0^2  = (lambda/pi) sqrt(L_g (R - L_g))
//   w_m^2 = (lambda/pi) R sqrt(L_g / (R - L_g))
// Throws std::domain_error when the stability condition 0 < L_g < R fails.
GaussianMode beam_waist_and_mode_volume(const CavityGeometry& g, double nu_hz);

struct DispersionPoint {
    double air_gap_m = 0.0;
    int index = 0;
    double frequency_hz = 0.0;
};

// Closed-form branches m_min..m_max swept over the air gap
// [la_min_m, la_max_m] in steps of la_step_m (membrane and index taken from
// g0).  Rows ordered by air gap, then index.
std::vector<DispersionPoint> dispersion_curves(const CavityGeometry& g0,
                                               double la_min_m,
                                               double la_max_m,
                                               double la_step_m,
                                               int m_min,
                                               int m_max);

// Air gap that puts order m on resonance with nu_ref_hz (inverts the closed
// form; bisection).  Used to realize "N x lambda/2" operating points.
double air_gap_for_order(int m, double membrane_thickness_m,
                         double refractive_index, double nu_ref_hz);

}  // namespace cavity
