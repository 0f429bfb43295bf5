#pragma once

// NV-center / cavity coupling in the weak-coupling (Purcell) regime:
// quality factor, Purcell factor, modified lifetime, probability of emitting
// a ZPL photon into the cavity mode, detuning by cavity-length displacement,
// and Gaussian vibration averaging.

#include "cavity/mode_model.hpp"

namespace cavity {

struct EmitterSpec {
    double zpl_branching = 0.0;        // beta_0, free-space ZPL fraction
    double free_lifetime_s = 0.0;      // tau_0
    double dipole_mismatch_rad = 0.0;  // angle between dipole and cavity field
    double antinode_offset_m = 0.0;    // axial offset inside diamond, |dz| <= lambda/(4 n_d)
};

struct VibrationSpec {
    double displacement_sigma_m = 0.0;  // std dev of cavity-length displacement
};

struct EmissionResult {
    double purcell_factor = 0.0;  // effective F after mismatch (averaged when applicable)
    double lifetime_s = 0.0;
    double p_zpl_cavity = 0.0;    // probability of ZPL emission into the cavity mode
};

// FWHM = 2 sqrt(2 ln 2) sigma for a Gaussian.
double fwhm_from_sigma(double sigma);
double sigma_from_fwhm(double fwhm);

// Q = nu / linewidth = finesse * nu / FSR.
double quality_factor(double finesse, const CavityGeometry& g, double nu_hz);

// F_p = (3 / 4 pi^2) (c / (n_d nu))^3 (Q / V); the emitter sits inside the
// medium of index n_d, hence the in-medium wavelength.
double purcell_factor(double q, double mode_volume_m3, double nu_hz,
                      double n_d);

// Intensity overlap penalty cos^2(theta) * cos^2(2 pi n_d dz / lambda).
// Throws std::invalid_argument when |dz| exceeds lambda/(4 n_d) (beyond the
// nearest node the "offset from an antinode" bookkeeping breaks down).
double mismatch_factor(const EmitterSpec& e, double nu_hz, double n_d);

// On-resonance emission: F_eff = F_p * mismatch; decay enhancement
// 1 + F_eff beta_0; tau = tau_0 / (1 + F_eff beta_0);
// p = F_eff beta_0 / (1 + F_eff beta_0).
EmissionResult emission_on_resonance(double f_p, const EmitterSpec& e,
                                     double nu_hz, double n_d);

// Lorentzian response to a cavity-length displacement dL:
//   F_p(dL) = F_p_res / (1 + (2 dL / dL_fwhm)^2),
//   dL_fwhm = (FSR / finesse) / |d nu / d L_a|.
// Throws std::domain_error if the branch slope vanishes.
double detuned_purcell(double f_p_res, double displacement_m, int m,
                       const CavityGeometry& g, double finesse);

// Emission averaged over Gaussian cavity-length displacement (sigma_L):
//   p_bar   = E[ p(dL) ]
//   tau_bar = 1 / E[ Gamma(dL) ]             (rate-averaged lifetime)
//   purcell_factor = E[ F_eff(dL) ]
// The mode is taken on resonance at its own frequency resonance_approx(m,g).
// Because the detuned response is exactly Lorentzian, the Gaussian averages
// are evaluated in closed form (scaled complementary error function); the
// result is the converged limit of a Gauss-Hermite rule at any admissible
// node count, so quadrature_nodes only gates validation (>= 64 or throw) and
// doubling it cannot change the result.  sigma_L = 0 returns the resonant
// values exactly.
EmissionResult vibration_averaged_emission(const EmitterSpec& e,
                                           const CavityGeometry& g, int m,
                                           double finesse,
                                           const VibrationSpec& v,
                                           int quadrature_nodes = 64);

// Entanglement success-probability gain (zpl_gain * collection_gain)^2.
double entanglement_rate_gain(double zpl_gain, double collection_gain);

}  // namespace cavity
