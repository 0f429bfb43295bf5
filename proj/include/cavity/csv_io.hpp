#pragma once

// CSV formats:
//   mode points:  header `length_offset_m,frequency_hz`
//   scans:        header `axis_value,signal_v[,sync_offset_s]`, preceded by
//                 `#key=value` metadata lines (axis, sideband_offset_hz,
//                 seed, truth parameters of synthetic files, ...).
// Plain decimal point, no thousands separators, UTF-8, LF line endings.
// Doubles are written with the shortest representation that round-trips,
// so write -> read -> write is byte-identical.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cavity/scan_data.hpp"

namespace cavity {

// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double value);

void write_mode_points(const std::filesystem::path& path,
                       const std::vector<ModePoint>& points,
                       const std::map<std::string, std::string>& metadata = {});

std::vector<ModePoint> read_mode_points(const std::filesystem::path& path);

void write_scan(const std::filesystem::path& path, const ScanRecord& rec);

ScanRecord read_scan(const std::filesystem::path& path);

// All *.csv files in a directory, sorted by filename (one sweep per file).
std::vector<ScanRecord> read_scan_dir(const std::filesystem::path& dir);

}  // namespace cavity
