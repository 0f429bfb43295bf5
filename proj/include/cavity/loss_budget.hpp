#pragma once

// Itemized round-trip loss budgets and their conversion to finesse,
// F = 2 pi / (total round-trip loss).  Includes the membrane-interface
// scattering estimate, Gaussian clipping at the curved mirror, and the
// mode-character weighting that makes diamond-like modes lossier than
// air-like ones.

#include <string>
#include <vector>

#include "cavity/mode_model.hpp"

namespace cavity {

struct MirrorSpec {
    double transmission_ppm = 0.0;
    double loss_ppm = 0.0;  // absorption + scatter of the coating
};

struct SurfaceSpec {
    double rms_roughness_m = 0.0;
};

struct LossItem {
    std::string label;
    double ppm = 0.0;
};

struct LossBudget {
    std::vector<LossItem> items;

    double total_ppm() const;
    // 2 pi / (total * 1e-6); throws std::domain_error on a zero-loss budget.
    double finesse() const;
};

// Budget of the two mirrors alone (transmission + coating loss each).
LossBudget bare_finesse(const MirrorSpec& fiber, const MirrorSpec& plane);

// Round-trip scattering loss at the membrane interface,
//   ((n_d - 1) * 4 pi sigma / lambda)^2,
// returned in ppm.  Index-contrast-scaled roughness phase variance; this
// formula is a documented choice, not a measured quantity.
double interface_scattering_loss_ppm(const SurfaceSpec& s, double wavelength_m,
                                     double n_d);

// Clipping loss per round trip in ppm: exp(-2 a^2 / w_m^2) where w_m is the
// Gaussian spot radius on the curved mirror.  Requires g.aperture_radius_m
// > 0 and a stable cavity; grows monotonically with the air gap.
double clipping_loss_ppm(const CavityGeometry& g, double nu_hz);

// Aperture radius such that clipping equals target_ppm at geometry g
// (inverts the clipping law; used to calibrate "finesse halves at the long
// end" observations against a base budget).
double calibrate_aperture(const CavityGeometry& g, double nu_hz,
                          double target_ppm);

// Plane-mirror penalty (ppm) calibrated so that a fully diamond-like mode
// (C = 0) has one third of the bare finesse: penalty = 2*bare - scattering.
double threefold_plane_penalty_ppm(const LossBudget& bare,
                                   double scattering_ppm);

// Character-weighted budget: adds (1 - C) * scattering and (1 - C) * penalty
// to the bare items.  C = 1 (air-like) reproduces the bare budget exactly;
// C = 0 applies both in full.
LossBudget effective_finesse(const LossBudget& bare, double scattering_ppm,
                             double air_character, double plane_penalty_ppm);

}  // namespace cavity
