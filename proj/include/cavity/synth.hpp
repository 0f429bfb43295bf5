#pragma once

// Deterministic synthetic-data generators (test oracles for the fitters).
// Every generator takes an explicit seed, never touches global random state,
// and records its truth parameters in the produced metadata.

#include <cstdint>
#include <vector>

#include "cavity/mode_model.hpp"
#include "cavity/scan_data.hpp"

namespace cavity {
namespace synth {

// --- sideband-calibrated cavity-length scan (triple Lorentzian) ----------

struct SidebandScanTruth {
    double linewidth_hz = 1.0e9;        // carrier FWHM in frequency units
    double sideband_offset_hz = 6.0e9;  // modulation frequency (delta f)
    double scale_hz_per_unit = 2.5e10;  // axis calibration the fitter must recover
    double carrier_center_axis = 0.0;   // carrier position in axis units
    double carrier_amp_v = 1.0;
    double sideband_amp_lo_v = 0.36;    // left sideband
    double sideband_amp_hi_v = 0.34;    // right sideband
    double baseline_v = 0.015;
    double noise_rel = 0.0;             // Gaussian noise, fraction of carrier amp
    double axis_min = -0.8;
    double axis_max = 0.8;
    int samples = 1601;
};

ScanRecord sideband_scan(const SidebandScanTruth& t, std::uint64_t seed);

// --- jittered laser-frequency sweeps (vibration broadening) --------------

struct VibrationSweepTruth {
    double line_fwhm_hz = 0.5e9;      // intrinsic Lorentzian linewidth
    double jitter_fwhm_hz = 22.2e9;   // FWHM of the Gaussian center jitter
    double drift_sigma_hz = 2.0e9;    // slow sweep-to-sweep center drift
    double amp_v = 1.0;
    double baseline_v = 0.01;
    double noise_rel = 0.002;         // additive noise, fraction of amplitude
    double span_hz = 120.0e9;         // sweep covers [-span/2, span/2]
    int samples = 481;
    int sweeps = 50;
    int dwell_draws = 1024;           // vibration states averaged per sample
    double cycle_s = 1.0;             // sync stamps cover one cycle uniformly
};

// The sweep is slow compared to the vibrations: every sample integrates
// dwell_draws independent line-center draws around a per-sweep drift offset,
// so each sweep already carries the jitter-broadened profile.  Sweep j is
// stamped sync_offset = (j + 0.5)/sweeps * cycle_s.
std::vector<ScanRecord> vibration_sweeps(const VibrationSweepTruth& t,
                                         std::uint64_t seed);

// --- two-phase vibration (sync-binned analysis oracle) -------------------

struct TwoPhaseTruth {
    VibrationSweepTruth base;          // jitter_fwhm_hz ignored
    double low_jitter_fwhm_hz = 14e9;  // inside the quiet window
    double high_jitter_fwhm_hz = 50e9;
    double quiet_start_s = 0.25;       // window within the cycle
    double quiet_end_s = 0.30;
};

std::vector<ScanRecord> two_phase_sweeps(const TwoPhaseTruth& t,
                                         std::uint64_t seed);

// --- closed-form mode points (geometry-fit oracle) -----------------------

struct ModePointTruth {
    double membrane_thickness_m = 4.0e-6;
    double air_gap0_m = 14.3e-6;       // air gap at length_offset = 0
    double refractive_index = 2.417;
    double offset_min_m = -1.0e-6;
    double offset_max_m = 1.0e-6;
    int offsets = 41;
    double center_frequency_hz = 471.3e12;
    int modes_per_offset = 3;          // modes nearest the center frequency
    double frequency_noise_hz = 0.0;   // Gaussian sigma
};

std::vector<ModePoint> mode_points(const ModePointTruth& t, std::uint64_t seed);

}  // namespace synth
}  // namespace cavity
