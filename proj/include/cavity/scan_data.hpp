#pragma once

// Raw measurement containers shared by the fitters, the synthetic-data
// generators and the CSV layer.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cavity {

// A fundamental-mode observation: relative piezo displacement of the air gap
// and the resonance frequency found there.
struct ModePoint {
    double length_offset_m = 0.0;
    double frequency_hz = 0.0;
};

enum class ScanAxis {
    cavity_length,   // axis_value in piezo volts (uncalibrated)
    laser_frequency  // axis_value in Hz (detuning)
};

// One sweep: photodiode signal versus a monotone scan axis.
struct ScanRecord {
    ScanAxis axis = ScanAxis::cavity_length;
    std::vector<double> axis_value;
    std::vector<double> signal_v;
    std::optional<double> sideband_offset_hz;  // phase-modulation calibration
    std::optional<double> sync_offset_s;       // delay within the 1 Hz cryo cycle
    std::map<std::string, std::string> metadata;  // '#key=value' lines
};

// Throws std::invalid_argument unless samples are non-empty, the axis is
// strictly monotone and signals are non-negative.
void validate(const ScanRecord& rec);

}  // namespace cavity
