#include "cavity/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "cavity/constants.hpp"
#include "cavity/csv_io.hpp"

namespace cavity {

namespace {

// Field table: one row per config key, in canonical dump order.
struct Field {
    const char* key;
    double RunConfig::* member;
};

constexpr Field kFields[] = {
    {"air_gap_m", &RunConfig::air_gap_m},
    {"membrane_thickness_m", &RunConfig::membrane_thickness_m},
    {"refractive_index", &RunConfig::refractive_index},
    {"radius_of_curvature_m", &RunConfig::radius_of_curvature_m},
    {"aperture_radius_m", &RunConfig::aperture_radius_m},
    {"fiber_transmission_ppm", &RunConfig::fiber_transmission_ppm},
    {"fiber_loss_ppm", &RunConfig::fiber_loss_ppm},
    {"plane_loss_ppm", &RunConfig::plane_loss_ppm},
    {"rms_roughness_m", &RunConfig::rms_roughness_m},
    {"zpl_branching", &RunConfig::zpl_branching},
    {"free_lifetime_s", &RunConfig::free_lifetime_s},
    {"dipole_mismatch_deg", &RunConfig::dipole_mismatch_deg},
    {"antinode_offset_m", &RunConfig::antinode_offset_m},
    {"sideband_offset_hz", &RunConfig::sideband_offset_hz},
    {"laser_frequency_hz", &RunConfig::laser_frequency_hz},
    {"vibration_sigma_m", &RunConfig::vibration_sigma_m},
};

}  // namespace

CavityGeometry RunConfig::geometry() const {
    CavityGeometry g;
    g.air_gap_m = air_gap_m;
    g.membrane_thickness_m = membrane_thickness_m;
    g.refractive_index = refractive_index;
    g.radius_of_curvature_m = radius_of_curvature_m;
    g.aperture_radius_m = aperture_radius_m;
    return g;
}

MirrorSpec RunConfig::fiber_mirror() const {
    return {fiber_transmission_ppm, fiber_loss_ppm};
}

MirrorSpec RunConfig::plane_mirror() const { return {0.0, plane_loss_ppm}; }

SurfaceSpec RunConfig::surface() const { return {rms_roughness_m}; }

EmitterSpec RunConfig::emitter() const {
    EmitterSpec e;
    e.zpl_branching = zpl_branching;
    e.free_lifetime_s = free_lifetime_s;
    e.dipole_mismatch_rad = dipole_mismatch_deg * kPi / 180.0;
    e.antinode_offset_m = antinode_offset_m;
    return e;
}

VibrationSpec RunConfig::vibration() const { return {vibration_sigma_m}; }

RunConfig config_from_json(const std::string& text,
                           const std::string& origin) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        // parse errors and numeric overflow alike surface as input errors
        throw std::invalid_argument(origin + ": " + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument(origin + ": top level must be an object");

    RunConfig cfg;
    for (const auto& [key, value] : j.items()) {
        const Field* field = nullptr;
        for (const Field& f : kFields)
            if (key == f.key) {
                field = &f;
                break;
            }
        if (!field)
            throw std::invalid_argument(origin + ": unknown key \"" + key +
                                        "\"");
        if (!value.is_number())
            throw std::invalid_argument(origin + ": key \"" + key +
                                        "\" must be a number");
        const double v = value.get<double>();
        if (!std::isfinite(v))
            throw std::invalid_argument(origin + ": key \"" + key +
                                        "\" must be finite");
        cfg.*(field->member) = v;
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw std::invalid_argument("cannot open config file: " +
                                    file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str(), file.string());
}

std::string canonical_dump(const RunConfig& cfg) {
    std::string out = "{";
    bool first = true;
    for (const Field& f : kFields) {
        if (!first) out += ',';
        first = false;
        out += '"';
        out += f.key;
        out += "\":";
        out += format_double(cfg.*(f.member));
    }
    out += '}';
    return out;
}

std::string config_hash(const RunConfig& cfg) {
    // FNV-1a, 64 bit
    const std::string dump = canonical_dump(cfg);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)h);
    return std::string(buf);
}

}  // namespace cavity
