#pragma once

// Measurement fitting: cavity geometry from fundamental-mode spectra,
// linewidth from sideband-calibrated scans, vibration broadening from
// repeated laser sweeps, and sync-binned vibration statistics.

#include <optional>
#include <vector>

#include "cavity/mode_model.hpp"
#include "cavity/scan_data.hpp"

namespace cavity {

// --- geometry -------------------------------------------------------------

struct GeometryFitAlternative {
    int index_shift = 0;  // all mode indices shifted by this amount
    double membrane_thickness_m = 0.0;
    double air_gap0_m = 0.0;
    double rms_residual_hz = 0.0;
};

struct GeometryFit {
    double membrane_thickness_m = 0.0;
    double air_gap0_m = 0.0;  // air gap at length_offset = 0
    double sigma_membrane_thickness_m = 0.0;
    double sigma_air_gap0_m = 0.0;
    double rms_residual_hz = 0.0;
    int iterations = 0;
    bool converged = false;
    // False when the scanned offsets span less than one avoided-crossing
    // period, so the membrane thickness is not identifiable from the data.
    bool d_identifiable = true;
    std::vector<int> mode_indices;  // assignment used (one per point)
    // The half-wave ambiguity of the assignment: same fit with all indices
    // shifted by -1 and +1.
    std::vector<GeometryFitAlternative> alternatives;
};

// Least squares over (d, L_a0) against the closed-form dispersion relation;
// mode indices are assigned by nearest-branch matching at the initial guess
// and held fixed.  fix_d freezes the membrane thickness at init's value
// (bare-cavity fits).  Needs >= 4 points.
GeometryFit fit_geometry(const std::vector<ModePoint>& points,
                         const CavityGeometry& init, bool fix_d = false);

// --- linewidth ------------------------------------------------------------

struct LinewidthFit {
    double linewidth_hz = 0.0;    // carrier FWHM in frequency units
    double uncertainty_hz = 0.0;  // 1 sigma
    double calibration_scale_hz_per_unit = 0.0;
    double reduced_chisq = 0.0;   // ssr / (n - p), unweighted
    double carrier_center_axis = 0.0;
    double sideband_spacing_axis = 0.0;
    bool rejected = false;        // quality screen (see fit_linewidth_sidebanded)
    std::string reject_reason;
};

// Fits three Lorentzians (shared width) plus a constant baseline to a
// cavity-length scan carrying phase-modulation sidebands; the known sideband
// offset calibrates the axis: scale = 2 delta_f / (right - left center).
// The fit is flagged rejected when any center's 1-sigma uncertainty exceeds
// 20% of the sideband spacing.  Throws std::runtime_error when three peaks
// cannot even be seeded (peaks-unresolved), std::invalid_argument when the
// sideband offset is missing.
LinewidthFit fit_linewidth_sidebanded(const ScanRecord& scan);

struct FinesseEstimate {
    double finesse = 0.0;
    double uncertainty = 0.0;
};

// finesse = FSR(g) / linewidth, uncertainty propagated from the fit.
FinesseEstimate finesse_from_linewidth(const LinewidthFit& fit,
                                       const CavityGeometry& g);

// --- vibration broadening ---------------------------------------------------

struct BroadeningFit {
    double fwhm_hz = 0.0;
    double fwhm_uncertainty_hz = 0.0;
    double displacement_m = 0.0;              // filled by the caller when a
    double displacement_uncertainty_m = 0.0;  // geometry is available
    int sweeps_used = 0;
    int sweeps_excluded = 0;
};

// Overlap-and-average of laser-frequency sweeps: each sweep is centered on
// the centroid of its top-20% signal, averaged on a common grid (linear
// interpolation), and the average fitted with Gaussian + baseline.
// Sweeps without a usable peak are excluded and counted; all-excluded and
// empty-overlap conditions throw std::runtime_error.  Needs >= 2 sweeps.
BroadeningFit fit_vibration_broadening(const std::vector<ScanRecord>& sweeps);

// FWHM displacement of the cavity length that explains a frequency FWHM:
// displacement = fwhm / |d nu / d L_a| of branch m at g.
double displacement_from_broadening(double fwhm_hz, int m,
                                    const CavityGeometry& g);

// --- sync binning -----------------------------------------------------------

struct SyncBin {
    double bin_center_s = 0.0;
    int sweep_count = 0;
    // empty for bins with < 2 sweeps, or with < 2 usable peaks among them
    std::optional<BroadeningFit> fit;
};

// Groups sweeps by sync_offset modulo the disturbance cycle (1 s pulse-tube
// cycle by default) into bins of bin_width_s and runs
// fit_vibration_broadening per bin.  Missing sync offsets throw.
std::vector<SyncBin> bin_by_sync(const std::vector<ScanRecord>& sweeps,
                                 double bin_width_s, double cycle_s = 1.0);

}  // namespace cavity
