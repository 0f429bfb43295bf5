#include "cavity/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cavity/constants.hpp"
#include "cavity/csv_io.hpp"
#include "cavity/emitter.hpp"

namespace cavity {
namespace synth {

namespace {

double lorentzian(double x, double center, double fwhm) {
    const double u = 2.0 * (x - center) / fwhm;
    return 1.0 / (1.0 + u * u);
}

// One laser-frequency sweep.  The sweep is slow against the vibrations, so
// each sample dwell integrates many vibration states: average dwell_draws
// independently jittered line shapes around the per-sweep drift offset.
ScanRecord one_sweep(const VibrationSweepTruth& t, double jitter_fwhm_hz,
                     double sync_s, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double drift = t.drift_sigma_hz * gauss(rng);
    const double jitter_sigma = sigma_from_fwhm(jitter_fwhm_hz);
    ScanRecord rec;
    rec.axis = ScanAxis::laser_frequency;
    rec.sync_offset_s = sync_s;
    rec.axis_value.resize(t.samples);
    rec.signal_v.resize(t.samples);
    for (int i = 0; i < t.samples; ++i) {
        const double x = -t.span_hz / 2.0 + t.span_hz * i / (t.samples - 1);
        double line = 0.0;
        for (int k = 0; k < t.dwell_draws; ++k) {
            const double center = drift + jitter_sigma * gauss(rng);
            line += lorentzian(x, center, t.line_fwhm_hz);
        }
        double s = t.baseline_v + t.amp_v * line / t.dwell_draws;
        if (t.noise_rel > 0.0) s += t.noise_rel * t.amp_v * gauss(rng);
        rec.axis_value[i] = x;
        rec.signal_v[i] = std::max(0.0, s);
    }
    return rec;
}

void check_positive(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(std::string("synth: bad ") + what);
}

}  // namespace

ScanRecord sideband_scan(const SidebandScanTruth& t, std::uint64_t seed) {
    check_positive(t.linewidth_hz > 0.0, "linewidth_hz");
    check_positive(t.sideband_offset_hz > 0.0, "sideband_offset_hz");
    check_positive(t.scale_hz_per_unit > 0.0, "scale_hz_per_unit");
    check_positive(t.samples >= 16, "sample count");
    check_positive(t.axis_max > t.axis_min, "axis range");
    check_positive(t.noise_rel >= 0.0, "noise_rel");

    const double width_axis = t.linewidth_hz / t.scale_hz_per_unit;
    const double spacing_axis = t.sideband_offset_hz / t.scale_hz_per_unit;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ScanRecord rec;
    rec.axis = ScanAxis::cavity_length;
    rec.sideband_offset_hz = t.sideband_offset_hz;
    rec.axis_value.resize(t.samples);
    rec.signal_v.resize(t.samples);
    for (int i = 0; i < t.samples; ++i) {
        const double x =
            t.axis_min + (t.axis_max - t.axis_min) * i / (t.samples - 1);
        double s = t.baseline_v;
        s += t.carrier_amp_v * lorentzian(x, t.carrier_center_axis, width_axis);
        s += t.sideband_amp_lo_v *
             lorentzian(x, t.carrier_center_axis - spacing_axis, width_axis);
        s += t.sideband_amp_hi_v *
             lorentzian(x, t.carrier_center_axis + spacing_axis, width_axis);
        if (t.noise_rel > 0.0) s += t.noise_rel * t.carrier_amp_v * gauss(rng);
        rec.axis_value[i] = x;
        rec.signal_v[i] = std::max(0.0, s);
    }
    rec.metadata["axis"] = "cavity_length";
    rec.metadata["seed"] = std::to_string(seed);
    rec.metadata["sideband_offset_hz"] = format_double(t.sideband_offset_hz);
    rec.metadata["truth_linewidth_hz"] = format_double(t.linewidth_hz);
    rec.metadata["truth_scale_hz_per_unit"] = format_double(t.scale_hz_per_unit);
    rec.metadata["truth_noise_rel"] = format_double(t.noise_rel);
    return rec;
}

std::vector<ScanRecord> vibration_sweeps(const VibrationSweepTruth& t,
                                         std::uint64_t seed) {
    check_positive(t.line_fwhm_hz > 0.0, "line_fwhm_hz");
    check_positive(t.jitter_fwhm_hz >= 0.0, "jitter_fwhm_hz");
    check_positive(t.span_hz > 0.0, "span_hz");
    check_positive(t.samples >= 16, "sample count");
    check_positive(t.sweeps >= 1, "sweep count");
    check_positive(t.dwell_draws >= 1, "dwell draw count");

    std::mt19937_64 rng(seed);
    std::vector<ScanRecord> out;
    out.reserve(t.sweeps);
    for (int j = 0; j < t.sweeps; ++j) {
        const double sync = (j + 0.5) / t.sweeps * t.cycle_s;
        ScanRecord rec = one_sweep(t, t.jitter_fwhm_hz, sync, rng);
        rec.metadata["axis"] = "laser_frequency";
        rec.metadata["seed"] = std::to_string(seed);
        rec.metadata["sweep"] = std::to_string(j);
        rec.metadata["truth_jitter_fwhm_hz"] = format_double(t.jitter_fwhm_hz);
        rec.metadata["truth_line_fwhm_hz"] = format_double(t.line_fwhm_hz);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ScanRecord> two_phase_sweeps(const TwoPhaseTruth& t,
                                         std::uint64_t seed) {
    check_positive(t.low_jitter_fwhm_hz > 0.0, "low_jitter_fwhm_hz");
    check_positive(t.high_jitter_fwhm_hz > 0.0, "high_jitter_fwhm_hz");
    check_positive(t.quiet_end_s > t.quiet_start_s, "quiet window");
    check_positive(t.base.dwell_draws >= 1, "dwell draw count");

    std::mt19937_64 rng(seed);
    std::vector<ScanRecord> out;
    out.reserve(t.base.sweeps);
    for (int j = 0; j < t.base.sweeps; ++j) {
        const double sync = (j + 0.5) / t.base.sweeps * t.base.cycle_s;
        const bool quiet = sync >= t.quiet_start_s && sync < t.quiet_end_s;
        const double jitter =
            quiet ? t.low_jitter_fwhm_hz : t.high_jitter_fwhm_hz;
        ScanRecord rec = one_sweep(t.base, jitter, sync, rng);
        rec.metadata["axis"] = "laser_frequency";
        rec.metadata["seed"] = std::to_string(seed);
        rec.metadata["sweep"] = std::to_string(j);
        rec.metadata["truth_jitter_fwhm_hz"] = format_double(jitter);
        rec.metadata["truth_line_fwhm_hz"] = format_double(t.base.line_fwhm_hz);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ModePoint> mode_points(const ModePointTruth& t,
                                   std::uint64_t seed) {
    check_positive(t.offsets >= 2, "offset count");
    check_positive(t.modes_per_offset >= 1, "modes per offset");
    check_positive(t.center_frequency_hz > 0.0, "center frequency");
    check_positive(t.frequency_noise_hz >= 0.0, "frequency noise");

    CavityGeometry g;
    g.membrane_thickness_m = t.membrane_thickness_m;
    g.refractive_index = t.refractive_index;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<ModePoint> out;
    for (int i = 0; i < t.offsets; ++i) {
        const double off = t.offset_min_m +
                           (t.offset_max_m - t.offset_min_m) * i / (t.offsets - 1);
        g.air_gap_m = t.air_gap0_m + off;
        // Longitudinal order nearest the center frequency.
        const int m_mid = std::max(
            1, (int)std::llround(2.0 * optical_length(g) * t.center_frequency_hz /
                                 kSpeedOfLight));
        const int half = t.modes_per_offset / 2;
        for (int m = m_mid - half; m < m_mid - half + t.modes_per_offset; ++m) {
            if (m < 1) continue;
            double nu = resonance_approx(m, g);
            if (t.frequency_noise_hz > 0.0)
                nu += t.frequency_noise_hz * gauss(rng);
            out.push_back({off, nu});
        }
    }
    return out;
}

}  // namespace synth
}  // namespace cavity
