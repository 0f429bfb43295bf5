#include "cavity/loss_budget.hpp"

#include <cmath>
#include <stdexcept>

#include "cavity/constants.hpp"

namespace cavity {

double LossBudget::total_ppm() const {
    double sum = 0.0;
    for (const auto& it : items) sum += it.ppm;
    return sum;
}

double LossBudget::finesse() const {
    const double total = total_ppm();
    if (!(total > 0.0))
        throw std::domain_error("zero-total-loss budget: finesse undefined");
    return 2.0 * kPi / (total * kPpm);
}

namespace {

void check_mirror(const MirrorSpec& m, const char* which) {
    if (m.transmission_ppm < 0.0 || m.loss_ppm < 0.0 ||
        m.transmission_ppm >= 1e6 || m.loss_ppm >= 1e6)
        throw std::invalid_argument(std::string(which) +
                                    " mirror spec out of range [0, 1e6) ppm");
}

}  // namespace

LossBudget bare_finesse(const MirrorSpec& fiber, const MirrorSpec& plane) {
    check_mirror(fiber, "fiber");
    check_mirror(plane, "plane");
    LossBudget b;
    b.items = {{"fiber_transmission", fiber.transmission_ppm},
               {"fiber_loss", fiber.loss_ppm},
               {"plane_transmission", plane.transmission_ppm},
               {"plane_loss", plane.loss_ppm}};
    return b;
}

double interface_scattering_loss_ppm(const SurfaceSpec& s, double wavelength_m,
                                     double n_d) {
    if (s.rms_roughness_m < 0.0)
        throw std::invalid_argument("rms_roughness_m must be >= 0");
    if (!(wavelength_m > 0.0))
        throw std::invalid_argument("wavelength_m must be > 0");
    const double phase = (n_d - 1.0) * 4.0 * kPi * s.rms_roughness_m / wavelength_m;
    return phase * phase / kPpm;
}

double clipping_loss_ppm(const CavityGeometry& g, double nu_hz) {
    if (!(g.aperture_radius_m > 0.0))
        throw std::invalid_argument("clipping requires aperture_radius_m > 0");
    const GaussianMode mode = beam_waist_and_mode_volume(g, nu_hz);
    const double a = g.aperture_radius_m;
    const double wm = mode.mirror_spot_m;
    return std::exp(-2.0 * a * a / (wm * wm)) / kPpm;
}

double calibrate_aperture(const CavityGeometry& g, double nu_hz,
                          double target_ppm) {
    if (!(target_ppm > 0.0) || target_ppm >= 1e6)
        throw std::invalid_argument("target clipping must be in (0, 1e6) ppm");
    const GaussianMode mode = beam_waist_and_mode_volume(g, nu_hz);
    // exp(-2 a^2 / w_m^2) = target  =>  a = w_m sqrt(ln(1/target) / 2).
    return mode.mirror_spot_m * std::sqrt(std::log(1.0 / (target_ppm * kPpm)) / 2.0);
}

double threefold_plane_penalty_ppm(const LossBudget& bare,
                                   double scattering_ppm) {
    if (scattering_ppm < 0.0)
        throw std::invalid_argument("scattering_ppm must be >= 0");
    // bare + scattering + penalty = 3 * bare at C = 0.
    const double penalty = 2.0 * bare.total_ppm() - scattering_ppm;
    if (penalty < 0.0)
        throw std::domain_error(
            "threefold penalty calibration impossible: scattering alone "
            "already exceeds twice the bare budget");
    return penalty;
}

LossBudget effective_finesse(const LossBudget& bare, double scattering_ppm,
                             double air_character, double plane_penalty_ppm) {
    if (!(air_character >= 0.0 && air_character <= 1.0))
        throw std::invalid_argument("air_character must be in [0, 1]");
    if (scattering_ppm < 0.0 || plane_penalty_ppm < 0.0)
        throw std::invalid_argument("loss items must be >= 0");
    LossBudget b = bare;
    const double w = 1.0 - air_character;
    b.items.push_back({"interface_scattering", w * scattering_ppm});
    b.items.push_back({"plane_mirror_penalty", w * plane_penalty_ppm});
    return b;
}

}  // namespace cavity
