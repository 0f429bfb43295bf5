// Acceptance gate: ten numbered criteria, one [PASS]/[FAIL] line each.
// Run with no arguments for the full suite, or with a single number 1..10
// to run one criterion (that is how ctest registers them).  Exit status is
// zero only if every criterion that ran passed.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cavity/csv_io.hpp"
#include "cavity/emitter.hpp"
#include "cavity/loss_budget.hpp"
#include "cavity/mode_model.hpp"
#include "cavity/scan_analysis.hpp"
#include "cavity/synth.hpp"

#ifndef CAVITOOL_PATH
#define CAVITOOL_PATH "cavitool"
#endif

namespace fs = std::filesystem;
using namespace cavity;

namespace {

constexpr double kC = 299792458.0;

bool verdict(int n, bool ok, const std::string& msg) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", n,
                msg.c_str());
    return ok;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double median(std::vector<double> v) {
    const std::size_t h = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + h, v.end());
    double m = v[h];
    if (v.size() % 2 == 0) {
        std::nth_element(v.begin(), v.begin() + h - 1, v.begin() + h);
        m = 0.5 * (m + v[h - 1]);
    }
    return m;
}

// ---- 1: bare loss budget --------------------------------------------------

bool criterion1() {
    const LossBudget bare = bare_finesse({50.0, 70.0}, {0.0, 100.0});
    const double f = bare.finesse();
    const double exact = 2.0 * std::numbers::pi / 220e-6;
    const double rel = std::abs(f - exact) / exact;
    const double dev = std::abs(f - 29000.0) / 29000.0;
    const bool ok = bare.total_ppm() == 220.0 && rel < 1e-12 && dev < 0.02;
    return verdict(1, ok,
                   fmt("(50+70+100) ppm -> finesse %.6f; vs 2*pi/220ppm "
                       "rel %.1e (gate 1e-12), vs 29000 dev %.2f%% (gate 2%%)",
                       f, rel, 100.0 * dev));
}

// ---- 2: scattering added to the bare budget -------------------------------

bool criterion2() {
    const LossBudget bare = bare_finesse({50.0, 70.0}, {0.0, 100.0});
    const double scat =
        interface_scattering_loss_ppm({0.35e-9}, 636e-9, 2.417);
    const LossBudget with = effective_finesse(bare, scat, 0.0, 0.0);
    const double f = with.finesse();
    const double dev = std::abs(f - 21000.0) / 21000.0;
    const bool ok = dev < 0.15;
    return verdict(2, ok,
                   fmt("scattering %.2f ppm (sigma 0.35 nm) -> finesse %.0f; "
                       "vs 21000 dev %.2f%% (gate 15%%)",
                       scat, f, 100.0 * dev));
}

// ---- 3: closed form vs exact roots over random geometries -----------------

bool criterion3() {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> d_la(2e-6, 30e-6);
    std::uniform_real_distribution<double> d_d(0.5e-6, 6e-6);
    std::uniform_real_distribution<double> d_n(1.5, 3.0);
    const double nu0 = 471.3e12;
    const int trials = 1000;

    double max_err = 0.0, sum_err = 0.0;
    int over = 0;
    CavityGeometry worst;
    for (int t = 0; t < trials; ++t) {
        CavityGeometry g;
        g.air_gap_m = d_la(rng);
        g.membrane_thickness_m = d_d(rng);
        g.refractive_index = d_n(rng);
        const double f = fsr(g);
        auto roots = resonance_exact(g, nu0 - 3.0 * f, nu0 + 3.0 * f);
        if (roots.size() < 3) continue;  // cannot happen with a 6-FSR band
        std::size_t i = 1;
        for (std::size_t j = 1; j + 1 < roots.size(); ++j)
            if (std::abs(roots[j].second - nu0) <
                std::abs(roots[i].second - nu0))
                i = j;
        const double local_fsr =
            0.5 * (roots[i + 1].second - roots[i - 1].second);
        const double approx = resonance_approx(roots[i].first, g);
        const double err =
            std::abs(approx - roots[i].second) / local_fsr;
        sum_err += err;
        if (err > 0.005) ++over;
        if (err > max_err) {
            max_err = err;
            worst = g;
        }
    }
    const bool ok = max_err <= 0.005;
    std::printf("  closed form vs exact roots, %d random geometries:\n",
                trials);
    std::printf("  max |closed - exact| = %.3f%% of local FSR, "
                "mean %.3f%%, %d/%d above the 0.5%% gate\n",
                100.0 * max_err, 100.0 * sum_err / trials, over, trials);
    std::printf("  worst geometry: L_a = %.3f um, d = %.3f um, n_d = %.3f\n",
                1e6 * worst.air_gap_m, 1e6 * worst.membrane_thickness_m,
                worst.refractive_index);
    std::printf("  note: the closed form is the zeroth iterate of the exact "
                "equation's fixed point;\n"
                "  its intrinsic error is 1-3%% of the FSR near avoided "
                "crossings, so the 0.5%% gate\n"
                "  is not reachable without replacing the closed form by the "
                "root finder itself.\n");
    return verdict(3, ok,
                   fmt("max closed-vs-exact deviation %.3f%% of local FSR "
                       "(gate 0.5%%)",
                       100.0 * max_err));
}

// ---- 4: degenerate collapse at d = 0 ---------------------------------------

bool criterion4() {
    CavityGeometry g;
    g.air_gap_m = 14.3e-6;
    g.membrane_thickness_m = 0.0;
    g.refractive_index = 2.417;
    const double la = g.air_gap_m;

    double worst = 0.0;
    for (int m = 1; m <= 200; ++m) {
        const double ladder = kC * m / (2.0 * la);
        worst = std::max(worst,
                         std::abs(resonance_approx(m, g) - ladder) / ladder);
        worst = std::max(worst,
                         std::abs(frequency_slope(m, g) - ladder / la) /
                             (ladder / la));
        worst = std::max(worst, std::abs(air_character(m, g) - 1.0));
    }
    const auto roots =
        resonance_exact(g, 0.5 * kC / (2.0 * la), 200.49 * kC / (2.0 * la));
    bool exact_ok = roots.size() == 200;
    if (exact_ok)
        for (int m = 1; m <= 200; ++m) {
            const double ladder = kC * m / (2.0 * la);
            exact_ok = exact_ok && roots[m - 1].first == m;
            worst = std::max(
                worst, std::abs(roots[m - 1].second - ladder) / ladder);
        }
    const bool ok = exact_ok && worst <= 1e-12;
    return verdict(4, ok,
                   fmt("d=0, m=1..200: closed form, exact roots, slope and "
                       "character collapse to c*m/2L_a; worst rel dev %.2e "
                       "(gate 1e-12)",
                       worst));
}

// ---- 5: geometry-fit round trip --------------------------------------------

bool criterion5() {
    synth::ModePointTruth truth;  // d = 4 um, L_a0 = 14.3 um
    CavityGeometry init;
    init.air_gap_m = 14.0e-6;
    init.membrane_thickness_m = 3.6e-6;
    init.refractive_index = truth.refractive_index;

    const auto clean = synth::mode_points(truth, 1);
    const GeometryFit f0 = fit_geometry(clean, init);
    const double rd =
        std::abs(f0.membrane_thickness_m - truth.membrane_thickness_m) /
        truth.membrane_thickness_m;
    const double rl =
        std::abs(f0.air_gap0_m - truth.air_gap0_m) / truth.air_gap0_m;
    const bool clean_ok = f0.converged && rd < 1e-9 && rl < 1e-9;
    std::printf("  noiseless: rel dev d %.2e, L_a0 %.2e (gate 1e-9)\n", rd,
                rl);

    truth.frequency_noise_hz = 10e6;
    int covered = 0, converged = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        const auto pts = synth::mode_points(truth, seed);
        const GeometryFit f = fit_geometry(pts, init);
        if (!f.converged) continue;
        ++converged;
        const bool in3 =
            std::abs(f.membrane_thickness_m - truth.membrane_thickness_m) <=
                3.0 * f.sigma_membrane_thickness_m &&
            std::abs(f.air_gap0_m - truth.air_gap0_m) <=
                3.0 * f.sigma_air_gap0_m;
        if (in3) ++covered;
    }
    std::printf("  10 MHz noise: %d/100 converged, %d/100 inside 3 sigma "
                "(gate >= 95)\n",
                converged, covered);
    const bool ok = clean_ok && covered >= 95;
    return verdict(5, ok,
                   fmt("noiseless recovery %.1e / %.1e rel; 3-sigma coverage "
                       "%d%% (gates 1e-9, 95%%)",
                       rd, rl, covered));
}

// ---- 6: sideband linewidth pipeline ----------------------------------------

bool criterion6() {
    synth::SidebandScanTruth truth;  // 1 GHz line, 6 GHz sidebands
    truth.noise_rel = 0.05;
    // keep the detector baseline above the noise floor; otherwise the
    // zero-clip of the detector model truncates the wings and biases the
    // width low by ~3.5%
    truth.baseline_v = 0.2;
    std::vector<double> errs;
    int rejected = 0;
    for (int seed = 1; seed <= 100; ++seed) {
        const LinewidthFit f =
            fit_linewidth_sidebanded(synth::sideband_scan(truth, seed));
        if (f.rejected) {
            ++rejected;
            continue;
        }
        errs.push_back(std::abs(f.linewidth_hz - truth.linewidth_hz) /
                       truth.linewidth_hz);
    }
    const double med = errs.empty() ? 1.0 : median(errs);
    std::printf("  1 GHz line, 5%% noise, 100 trials: median |dev| %.3f%% "
                "(gate 2%%), %d rejected\n",
                100.0 * med, rejected);

    // plateau scale: linewidth consistent with finesse 10,000 at the
    // (14.3 um, 4 um) geometry
    CavityGeometry g;
    g.air_gap_m = 14.3e-6;
    g.membrane_thickness_m = 4.0e-6;
    g.refractive_index = 2.417;
    synth::SidebandScanTruth plateau = truth;
    plateau.linewidth_hz = fsr(g) / 1.0e4;
    std::vector<double> fins;
    for (int seed = 1; seed <= 100; ++seed) {
        const LinewidthFit f =
            fit_linewidth_sidebanded(synth::sideband_scan(plateau, seed));
        if (!f.rejected) fins.push_back(finesse_from_linewidth(f, g).finesse);
    }
    const double med_f = fins.empty() ? 0.0 : median(fins);
    std::printf("  plateau-consistent linewidth %.4g Hz -> median finesse "
                "%.0f (gate 10000 +- 5%%)\n",
                plateau.linewidth_hz, med_f);

    const bool ok = med <= 0.02 && (int)errs.size() >= 90 &&
                    std::abs(med_f - 1.0e4) / 1.0e4 <= 0.05;
    return verdict(6, ok,
                   fmt("median linewidth dev %.2f%% (gate 2%%); plateau "
                       "finesse %.0f vs 10000 (gate 5%%)",
                       100.0 * med, med_f));
}

// ---- 7: vibration broadening and displacement conversion -------------------

bool criterion7() {
    synth::VibrationSweepTruth truth;  // jitter FWHM 22.2 GHz
    std::vector<double> fwhms;
    for (int seed = 1; seed <= 5; ++seed)
        fwhms.push_back(
            fit_vibration_broadening(synth::vibration_sweeps(truth, seed))
                .fwhm_hz);
    const double med = median(fwhms);
    const double dev = std::abs(med - truth.jitter_fwhm_hz) / truth.jitter_fwhm_hz;
    const bool i_ok = dev <= 0.03;
    std::printf("  (i) recovered FWHM %.3f GHz vs 22.2 GHz: dev %.2f%% "
                "(gate 3%%)\n",
                1e-9 * med, 100.0 * dev);

    CavityGeometry g;
    g.membrane_thickness_m = 4.0e-6;
    g.refractive_index = 2.417;
    g.air_gap_m = air_gap_for_order(50, g.membrane_thickness_m,
                                    g.refractive_index, 471.3e12);
    const double disp = displacement_from_broadening(22.2e9, 50, g);
    const bool ii_ok = disp >= 0.65e-9 && disp <= 0.95e-9;
    std::printf("  (ii) 22.2 GHz at the m=50, d=4 um point (L_a = %.4f um, "
                "slope %.4g Hz/m)\n"
                "       -> displacement %.4f nm, gate [0.65, 0.95] nm\n",
                1e6 * g.air_gap_m, frequency_slope(50, g), 1e9 * disp);
    if (!ii_ok)
        std::printf("       note: the branch slope at this operating point "
                    "maps 22.2 GHz to %.2f nm, and the\n"
                    "       exact characteristic equation gives 1.02 nm at "
                    "the same point, so this is not a\n"
                    "       closed-form artifact: reproducing 0.80 nm needs "
                    "a ~24%% steeper slope, i.e. a\n"
                    "       membrane ~50 nm thinner than the nominal 4 um "
                    "(the conversion swings 0.5-1.5 nm\n"
                    "       across one crossing period in d).\n",
                    1e9 * disp);

    const double d14 = displacement_from_broadening(14e9, 50, g);
    const double d50 = displacement_from_broadening(50e9, 50, g);
    const double lin = std::abs(d50 / d14 * 14.0 / 50.0 - 1.0);
    const bool iii_ok = lin <= 1e-12;
    std::printf("  (iii) bin extremes 14 / 50 GHz -> %.3f / %.3f nm, "
                "linearity dev %.1e (gate 1e-12)\n",
                1e9 * d14, 1e9 * d50, lin);

    const bool ok = i_ok && ii_ok && iii_ok;
    return verdict(7, ok,
                   fmt("broadening dev %.2f%% (gate 3%%); displacement "
                       "%.3f nm (gate [0.65, 0.95] nm); linearity %.1e",
                       100.0 * dev, 1e9 * disp, lin));
}

// ---- 8: emission model properties ------------------------------------------

bool criterion8() {
    CavityGeometry g;
    g.membrane_thickness_m = 4.0e-6;
    g.refractive_index = 2.417;
    g.radius_of_curvature_m = 18.4e-6;
    const int m = 45;
    g.air_gap_m = air_gap_for_order(m, g.membrane_thickness_m,
                                    g.refractive_index, 471.3e12);
    const double nu = resonance_approx(m, g);
    const double lambda = kC / nu;
    EmitterSpec ideal{0.03, 12e-9, 0.0, 0.0};
    EmitterSpec tilted{0.03, 12e-9, 30.0 * std::numbers::pi / 180.0,
                       lambda / (10.0 * g.refractive_index)};

    auto resonant_p = [&](const EmitterSpec& e, double finesse) {
        const double q = quality_factor(finesse, g, nu);
        const double v = beam_waist_and_mode_volume(g, nu).mode_volume_m3;
        const double fp = purcell_factor(q, v, nu, g.refractive_index);
        return emission_on_resonance(fp, e, nu, g.refractive_index);
    };

    bool mono_f = true, mism = true;
    double prev = -1.0;
    for (double f = 4000.0; f <= 15000.0; f += 1000.0) {
        const double p = resonant_p(ideal, f).p_zpl_cavity;
        mono_f = mono_f && p > prev;
        mism = mism && resonant_p(tilted, f).p_zpl_cavity < p;
        prev = p;
    }
    std::printf("  p_zpl monotone in finesse: %s; mismatch (30 deg, "
                "lambda/10) always lower: %s\n",
                mono_f ? "yes" : "NO", mism ? "yes" : "NO");

    bool mono_s = true;
    prev = 2.0;
    for (double s : {0.0, 0.1e-9, 0.2e-9, 0.4e-9, 0.8e-9}) {
        const double p =
            vibration_averaged_emission(ideal, g, m, 5000.0, {s}).p_zpl_cavity;
        mono_s = mono_s && p < prev;
        prev = p;
    }
    std::printf("  p_zpl monotone decreasing in sigma_L: %s\n",
                mono_s ? "yes" : "NO");

    const double p_res = resonant_p(ideal, 5000.0).p_zpl_cavity;
    const double p_zero =
        vibration_averaged_emission(ideal, g, m, 5000.0, {0.0}).p_zpl_cavity;
    const double zero_dev = std::abs(p_zero - p_res) / p_res;
    std::printf("  sigma_L = 0 equals the resonant value: rel dev %.1e "
                "(gate 1e-12)\n",
                zero_dev);

    const VibrationSpec fig3b{sigma_from_fwhm(0.80e-9)};
    const double p64 =
        vibration_averaged_emission(ideal, g, m, 5000.0, fig3b, 64)
            .p_zpl_cavity;
    const double p128 =
        vibration_averaged_emission(ideal, g, m, 5000.0, fig3b, 128)
            .p_zpl_cavity;
    const double conv = std::abs(p64 - p128) / p128;
    std::printf("  node doubling 64 -> 128: rel change %.1e (gate 1e-6; the "
                "Lorentzian average is closed-form exact, so doubling cannot "
                "move it)\n",
                conv);

    // reference point values, printed side by side; the reference model's
    // mode volume and detuning treatment are unstated, so these are
    // documentation, not a gate.
    const double p_tilt =
        vibration_averaged_emission(tilted, g, m, 5000.0, fig3b)
            .p_zpl_cavity;
    std::printf("  side by side (not gated):\n");
    std::printf("    resonant p_zpl at finesse 4000 / 15000: %.3f / %.3f "
                "(reference: > 0.80 over that range)\n",
                resonant_p(ideal, 4000.0).p_zpl_cavity,
                resonant_p(ideal, 15000.0).p_zpl_cavity);
    std::printf("    vibration-averaged p_zpl at finesse 5000, sigma_L = "
                "%.3f nm: ideal %.3f (reference 0.33), tilted %.3f "
                "(reference 0.26)\n",
                1e9 * fig3b.displacement_sigma_m, p64, p_tilt);
    std::printf("    the reference values assume a vibration immunity our "
                "Lorentzian detuning model\n"
                "    does not have at this branch slope (FWHM "
                "displacement tolerance %.3f nm).\n",
                1e9 * (fsr(g) / 5000.0) / frequency_slope(m, g));

    const bool ok =
        mono_f && mono_s && mism && zero_dev <= 1e-12 && conv <= 1e-6;
    return verdict(8, ok,
                   fmt("monotonicity, mismatch, sigma=0 identity (%.1e) and "
                       "quadrature convergence (%.1e) all hold",
                       zero_dev, conv));
}

// ---- 9: entanglement gain ---------------------------------------------------

bool criterion9() {
    const double gain = entanglement_rate_gain(13.0, 3.0);
    const bool ok = gain == 1521.0;
    return verdict(9, ok,
                   fmt("(13 x 3)^2 = %.0f (exact integer arithmetic, "
                       "vs about 10^3)",
                       gain));
}

// ---- 10: CLI byte determinism -----------------------------------------------

int run_tool(const std::string& args) {
    const std::string cmd =
        std::string("\"") + CAVITOOL_PATH + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (status == -1 || !WIFEXITED(status)) return -1;
    return WEXITSTATUS(status);
}

// file content minus the volatile timestamp lines
std::vector<std::string> stable_lines(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind("#timestamp=", 0) != 0) lines.push_back(line);
    return lines;
}

bool same_tree(const fs::path& a, const fs::path& b, std::string& why) {
    auto names = [](const fs::path& root) {
        std::vector<fs::path> v;
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.is_regular_file())
                v.push_back(fs::relative(e.path(), root));
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto na = names(a), nb = names(b);
    if (na != nb) {
        why = "file lists differ";
        return false;
    }
    for (const auto& rel : na)
        if (stable_lines(a / rel) != stable_lines(b / rel)) {
            why = "content differs: " + rel.string();
            return false;
        }
    if (na.empty()) {
        why = "no output files";
        return false;
    }
    return true;
}

bool criterion10() {
    const fs::path base = fs::temp_directory_path() /
                          ("cavitool_accept_" + std::to_string(::getpid()));
    fs::remove_all(base);

    struct Scenario {
        std::string name;
        std::vector<std::string> commands;  // {DIR} is the per-leg root
    };
    const std::vector<Scenario> scenarios = {
        {"modes", {"--seed 3 --svg --out {DIR} modes"}},
        {"fit-geometry",
         {"--seed 11 --out {DIR}/in synth --kind mode-points --noise 1e7",
          "--svg --out {DIR}/fit fit-geometry {DIR}/in/mode_points.csv"}},
        {"linewidth",
         {"--seed 21 --out {DIR}/in synth --kind sideband --noise 0.03",
          "--out {DIR}/fit linewidth {DIR}/in/sideband_scan.csv"}},
        {"vibration",
         {"--seed 31 --out {DIR}/in synth --kind two-phase --sweeps 40",
          "--svg --out {DIR}/fit vibration {DIR}/in --bin-width 0.05"}},
        {"purcell",
         {"--seed 1 --svg --out {DIR} purcell --finesse-points 12 "
          "--sigma-points 8"}},
    };

    bool all_ok = true;
    for (const auto& sc : scenarios) {
        bool ran = true;
        for (const char* leg : {"a", "b"}) {
            const fs::path dir = base / sc.name / leg;
            fs::create_directories(dir);
            for (std::string cmd : sc.commands) {
                std::string::size_type pos;
                while ((pos = cmd.find("{DIR}")) != std::string::npos)
                    cmd.replace(pos, 5, dir.string());
                const int rc = run_tool(cmd);
                if (rc != 0) {
                    std::printf("  %s: leg %s exited %d on: %s\n",
                                sc.name.c_str(), leg, rc, cmd.c_str());
                    ran = false;
                }
            }
        }
        std::string why;
        const bool same =
            ran && same_tree(base / sc.name / "a", base / sc.name / "b", why);
        const std::string note =
            same ? "two runs byte-identical (timestamps excluded)"
                 : "MISMATCH: " + why;
        std::printf("  %-12s %s\n", sc.name.c_str(), note.c_str());
        all_ok = all_ok && same;
    }
    fs::remove_all(base);
    return verdict(10, all_ok,
                   fmt("%zu command chains re-run into fresh directories; "
                       "%s",
                       scenarios.size(),
                       all_ok ? "all outputs byte-identical up to timestamps"
                              : "at least one output differed"));
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) {
        only = std::atoi(argv[1]);
        if (only < 1 || only > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1..10]\n", argv[0]);
            return 2;
        }
    }
    struct Entry {
        int n;
        bool (*fn)();
    };
    const Entry entries[] = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
        {9, criterion9}, {10, criterion10},
    };
    bool all_ok = true;
    for (const Entry& e : entries) {
        if (only != 0 && e.n != only) continue;
        bool ok = false;
        try {
            ok = e.fn();
        } catch (const std::exception& ex) {
            verdict(e.n, false, fmt("unhandled exception: %s", ex.what()));
        }
        all_ok = all_ok && ok;
    }
    return all_ok ? 0 : 1;
}
