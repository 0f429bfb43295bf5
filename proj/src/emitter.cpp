#include "cavity/emitter.hpp"

#include <cmath>
#include <stdexcept>

#include "cavity/constants.hpp"

namespace cavity {

namespace {

void check_emitter(const EmitterSpec& e) {
    if (!(e.zpl_branching > 0.0 && e.zpl_branching < 1.0))
        throw std::invalid_argument("zpl_branching must be in (0, 1)");
    if (!(e.free_lifetime_s > 0.0))
        throw std::invalid_argument("free_lifetime_s must be > 0");
    if (e.dipole_mismatch_rad < 0.0 || e.dipole_mismatch_rad > kPi / 2.0)
        throw std::invalid_argument("dipole_mismatch_rad must be in [0, pi/2]");
}

// exp(z^2) erfc(z), z >= 0, without overflow.  Direct product up to z = 25
// (exp(625) is representable), asymptotic series beyond.
double erfcx_pos(double z) {
    if (z < 25.0) return std::exp(z * z) * std::erfc(z);
    const double inv2z2 = 1.0 / (2.0 * z * z);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        term *= -(2 * k - 1) * inv2z2;
        sum += term;
    }
    return sum / (z * std::sqrt(kPi));
}

// E[1/(U^2 + a^2)] for U ~ N(0, s^2):  sqrt(pi/2) erfcx(a/(s sqrt 2))/(a s).
// Reduces to 1/a^2 as s -> 0 through the asymptotic branch.
double lorentzian_gaussian_mean(double a, double s) {
    const double z = a / (s * std::sqrt(2.0));
    return std::sqrt(kPi / 2.0) * erfcx_pos(z) / (a * s);
}

}  // namespace

double fwhm_from_sigma(double sigma) {
    return 2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma;
}

double sigma_from_fwhm(double fwhm) {
    return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

double quality_factor(double finesse, const CavityGeometry& g, double nu_hz) {
    if (!(finesse > 0.0)) throw std::invalid_argument("finesse must be > 0");
    if (!(nu_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
    return finesse * nu_hz / fsr(g);
}

double purcell_factor(double q, double mode_volume_m3, double nu_hz,
                      double n_d) {
    if (!(q > 0.0) || !(mode_volume_m3 > 0.0) || !(nu_hz > 0.0) || !(n_d >= 1.0))
        throw std::invalid_argument("purcell_factor: all inputs must be positive");
    const double lambda_med = kSpeedOfLight / (n_d * nu_hz);
    return 3.0 / (4.0 * kPi * kPi) * lambda_med * lambda_med * lambda_med * q /
           mode_volume_m3;
}

double mismatch_factor(const EmitterSpec& e, double nu_hz, double n_d) {
    check_emitter(e);
    if (!(nu_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
    const double lambda = kSpeedOfLight / nu_hz;
    if (std::abs(e.antinode_offset_m) > lambda / (4.0 * n_d) * (1.0 + 1e-12))
        throw std::invalid_argument(
            "antinode_offset_m exceeds lambda/(4 n_d): offset is past the "
            "nearest field node");
    const double ct = std::cos(e.dipole_mismatch_rad);
    const double cz = std::cos(2.0 * kPi * n_d * e.antinode_offset_m / lambda);
    return ct * ct * cz * cz;
}

EmissionResult emission_on_resonance(double f_p, const EmitterSpec& e,
                                     double nu_hz, double n_d) {
    if (f_p < 0.0) throw std::invalid_argument("Purcell factor must be >= 0");
    const double f_eff = f_p * mismatch_factor(e, nu_hz, n_d);
    const double enh = 1.0 + f_eff * e.zpl_branching;
    EmissionResult out;
    out.purcell_factor = f_eff;
    out.lifetime_s = e.free_lifetime_s / enh;
    out.p_zpl_cavity = f_eff * e.zpl_branching / enh;
    return out;
}

double detuned_purcell(double f_p_res, double displacement_m, int m,
                       const CavityGeometry& g, double finesse) {
    if (f_p_res < 0.0) throw std::invalid_argument("Purcell factor must be >= 0");
    if (!(finesse > 0.0)) throw std::invalid_argument("finesse must be > 0");
    const double slope = frequency_slope(m, g);
    if (!(slope > 0.0))
        throw std::domain_error(
            "detuned_purcell: branch slope vanishes at this operating point; "
            "convert the detuning to frequency directly instead");
    const double dl_fwhm = (fsr(g) / finesse) / slope;
    const double u = 2.0 * displacement_m / dl_fwhm;
    return f_p_res / (1.0 + u * u);
}

EmissionResult vibration_averaged_emission(const EmitterSpec& e,
                                           const CavityGeometry& g, int m,
                                           double finesse,
                                           const VibrationSpec& v,
                                           int quadrature_nodes) {
    check_emitter(e);
    if (v.displacement_sigma_m < 0.0)
        throw std::invalid_argument("displacement_sigma_m must be >= 0");
    if (quadrature_nodes < 64)
        throw std::invalid_argument("use >= 64 quadrature nodes");

    const double nu = resonance_approx(m, g);
    const double n_d = g.refractive_index;
    const double q = quality_factor(finesse, g, nu);
    const GaussianMode mode = beam_waist_and_mode_volume(g, nu);
    const double f_p_res = purcell_factor(q, mode.mode_volume_m3, nu, n_d);
    if (v.displacement_sigma_m == 0.0)
        return emission_on_resonance(f_p_res, e, nu, n_d);

    const double mis = mismatch_factor(e, nu, n_d);
    const double beta = e.zpl_branching;
    const double f_r = f_p_res * mis;

    // Same Lorentzian width bookkeeping as detuned_purcell.
    const double slope = frequency_slope(m, g);
    if (!(slope > 0.0))
        throw std::domain_error(
            "vibration_averaged_emission: branch slope vanishes at this "
            "operating point");
    const double dl_fwhm = (fsr(g) / finesse) / slope;
    const double s = 2.0 * v.displacement_sigma_m / dl_fwhm;

    // The detuned response is exactly Lorentzian in the displacement, so
    // every average here reduces to E[1/(U^2 + a^2)] with U the scaled
    // displacement.  That expectation is evaluated in closed form: it is the
    // value the node-count parameter's Gauss-Hermite rule converges to, and
    // the rule itself would need >1e4 nodes once the response is much
    // narrower than the vibration spread (s >> 1), so the closed form is
    // used for every node count.
    //   <F_eff> = F_r E[1/(U^2 + 1)]
    //   p(U)    = F_r beta / (U^2 + 1 + F_r beta)
    const double fb = f_r * beta;
    const double p_bar = fb * lorentzian_gaussian_mean(std::sqrt(1.0 + fb), s);
    const double f_eff_bar = f_r * lorentzian_gaussian_mean(1.0, s);

    EmissionResult out;
    out.purcell_factor = f_eff_bar;
    // Rate-averaged lifetime 1/<Gamma>, Gamma = (1 + F_eff beta) / tau_0.
    out.lifetime_s = e.free_lifetime_s / (1.0 + f_eff_bar * beta);
    out.p_zpl_cavity = p_bar;
    return out;
}

double entanglement_rate_gain(double zpl_gain, double collection_gain) {
    if (zpl_gain < 0.0 || collection_gain < 0.0)
        throw std::invalid_argument("gains must be >= 0");
    const double g = zpl_gain * collection_gain;
    return g * g;
}

}  // namespace cavity
