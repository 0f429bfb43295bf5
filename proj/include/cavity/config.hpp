#pragma once

// Run configuration for the command-line tool.  One flat JSON object with a
// fixed key set; unknown keys and non-numeric values are hard errors so a
// typo cannot silently fall back to a default.

#include <filesystem>
#include <string>

#include "cavity/emitter.hpp"
#include "cavity/loss_budget.hpp"
#include "cavity/mode_model.hpp"

namespace cavity {

struct RunConfig {
    // geometry
    double air_gap_m = 14.3e-6;
    double membrane_thickness_m = 4.0e-6;
    double refractive_index = 2.417;
    double radius_of_curvature_m = 18.4e-6;
    double aperture_radius_m = 0.0;  // 0 disables clipping loss
    // mirrors and membrane surface
    double fiber_transmission_ppm = 50.0;
    double fiber_loss_ppm = 70.0;
    double plane_loss_ppm = 100.0;
    double rms_roughness_m = 0.35e-9;
    // emitter
    double zpl_branching = 0.03;
    double free_lifetime_s = 12e-9;
    double dipole_mismatch_deg = 0.0;
    double antinode_offset_m = 0.0;
    // measurement settings
    double sideband_offset_hz = 6e9;
    double laser_frequency_hz = 4.713e14;
    double vibration_sigma_m = 0.0;

    CavityGeometry geometry() const;
    MirrorSpec fiber_mirror() const;
    MirrorSpec plane_mirror() const;
    SurfaceSpec surface() const;
    EmitterSpec emitter() const;
    VibrationSpec vibration() const;
};

// Parse a config from JSON text; `origin` names the source in error messages.
// Throws std::invalid_argument on malformed JSON, unknown keys, or
// non-numeric values.  Absent keys keep their defaults.
RunConfig config_from_json(const std::string& text, const std::string& origin);

// Same, reading from a file.
RunConfig load_config(const std::filesystem::path& file);

// Canonical single-line JSON dump: fixed key order, shortest round-trip
// number formatting.  Equal configs produce identical bytes.
std::string canonical_dump(const RunConfig& cfg);

// 16-hex-digit FNV-1a hash of the canonical dump; stamped into every output
// file so results can be traced back to their settings.
std::string config_hash(const RunConfig& cfg);

}  // namespace cavity
