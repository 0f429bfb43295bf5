// cavitool — command-line front end for the cavity library.
//
// Subcommands:
//   modes         dispersion + mode-character tables over an air-gap range
//   fit-geometry  (d, L_a0) from a mode-point CSV
//   linewidth     sideband-calibrated linewidth fits for a scan or directory
//   vibration     broadening / displacement analysis of repeated sweeps,
//                 optionally binned by sync offset
//   purcell       emission curves vs finesse and vs vibration amplitude
//   synth         deterministic synthetic data sets for all fitters
//
// Every output file starts with #key=value metadata (timestamp, config
// hash, seed, tool version); apart from the timestamp line the outputs are
// byte-deterministic for fixed config and seed.
//
// Exit codes: 0 success, 1 fit/analysis failure, 2 input/config error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cavity/config.hpp"
#include "cavity/constants.hpp"
#include "cavity/csv_io.hpp"
#include "cavity/emitter.hpp"
#include "cavity/loss_budget.hpp"
#include "cavity/mode_model.hpp"
#include "cavity/quadrature.hpp"
#include "cavity/scan_analysis.hpp"
#include "cavity/synth.hpp"

namespace fs = std::filesystem;
using namespace cavity;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::string iso_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Ctx {
    fs::path out_dir;
    std::string config_hash;
    std::uint64_t seed = 0;
    bool svg = false;
};

using MetaLines = std::vector<std::pair<std::string, std::string>>;

std::ofstream open_output(const Ctx& ctx, const std::string& name,
                          const MetaLines& extra, fs::path& path_out) {
    fs::create_directories(ctx.out_dir);
    path_out = ctx.out_dir / name;
    std::ofstream os(path_out, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path_out.string());
    os << "#timestamp=" << iso_timestamp() << "\n";
    os << "#config_hash=" << ctx.config_hash << "\n";
    os << "#seed=" << ctx.seed << "\n";
    os << "#tool_version=" << kToolVersion << "\n";
    for (const auto& [k, v] : extra) os << "#" << k << "=" << v << "\n";
    return os;
}

// Rectangular numeric table with named columns.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const Ctx& ctx, const std::string& name, const Table& table,
                 const MetaLines& extra = {}) {
    fs::path path;
    std::ofstream os = open_output(ctx, name, extra, path);
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        os << (i ? "," : "") << table.columns[i];
    os << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << format_double(row[i]);
        os << "\n";
    }
    std::cout << "wrote " << path.string() << "\n";
}

// Two-column key,value report.
struct Report {
    std::vector<std::pair<std::string, std::string>> rows;

    void add(const std::string& key, double v) {
        rows.emplace_back(key, format_double(v));
    }
    void add(const std::string& key, int v) {
        rows.emplace_back(key, std::to_string(v));
    }
    void add(const std::string& key, bool v) {
        rows.emplace_back(key, v ? "true" : "false");
    }
    void add(const std::string& key, const std::string& v) {
        rows.emplace_back(key, v);
    }
};

void write_report(const Ctx& ctx, const std::string& name, const Report& rep,
                  const MetaLines& extra = {}) {
    fs::path path;
    std::ofstream os = open_output(ctx, name, extra, path);
    os << "key,value\n";
    for (const auto& [k, v] : rep.rows) os << k << "," << v << "\n";
    std::cout << "wrote " << path.string() << "\n";
}

// ------------------------------------------------------------------- SVG ---

struct Series {
    std::string label;
    std::vector<double> x, y;
};

// Minimal line plot: axes box, min/max tick labels, one polyline per series.
void write_svg(const Ctx& ctx, const std::string& name,
               const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    const int w = 720, h = 480, ml = 80, mr = 24, mt = 36, mb = 56;

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    if (!(ymax > ymin)) ymax = ymin + 1.0;

    auto px = [&](double x) {
        return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
    };
    auto py = [&](double y) {
        return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
    };
    auto num = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    auto pix = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return std::string(buf);
    };

    fs::create_directories(ctx.out_dir);
    const fs::path path = ctx.out_dir / name;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
       << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h
       << "\">\n";
    os << "<rect width=\"" << w << "\" height=\"" << h
       << "\" fill=\"white\"/>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr
       << "\" height=\"" << h - mt - mb
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"" << mt - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"14\">"
       << title << "</text>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"" << h - 12
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\">"
       << xlabel << "</text>\n";
    os << "<text x=\"16\" y=\"" << h / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
          "font-size=\"12\" transform=\"rotate(-90 16 "
       << h / 2 << ")\">" << ylabel << "</text>\n";
    // tick labels at the range ends
    os << "<text x=\"" << ml << "\" y=\"" << h - mb + 16
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << num(xmin)
       << "</text>\n";
    os << "<text x=\"" << w - mr << "\" y=\"" << h - mb + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"10\">"
       << num(xmax) << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << h - mb
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"10\">"
       << num(ymin) << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 10
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"10\">"
       << num(ymax) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kColors[k % 6];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) os << ' ';
            os << pix(px(s.x[i])) << ',' << pix(py(s.y[i]));
        }
        os << "\"/>\n";
        os << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 14 * (int)k
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
              "font-size=\"11\" fill=\""
           << color << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    std::cout << "wrote " << path.string() << "\n";
}

// ------------------------------------------------------------ subcommands ---

// Longitudinal order closest to the reference laser frequency.
int central_order(const CavityGeometry& g, double nu_ref_hz) {
    if (!(nu_ref_hz > 0.0))
        throw std::invalid_argument("laser_frequency_hz must be > 0");
    const long m =
        std::lround(2.0 * optical_length(g) * nu_ref_hz / kSpeedOfLight);
    return (int)std::max(1L, m);
}

int cmd_modes(const Ctx& ctx, const RunConfig& cfg, double la_min,
              double la_max, double la_step, int halfspan) {
    const CavityGeometry g = cfg.geometry();
    validate(g);
    if (la_min == 0.0 && la_max == 0.0) {
        la_min = std::max(0.1 * g.air_gap_m, g.air_gap_m - 1.0e-6);
        la_max = g.air_gap_m + 1.0e-6;
    }
    if (!(la_max > la_min) || !(la_step > 0.0) || !(la_min > 0.0))
        throw std::invalid_argument("modes: empty or invalid air-gap range");
    if (halfspan < 0) throw std::invalid_argument("modes: negative mode span");

    const int m_mid = central_order(g, cfg.laser_frequency_hz);
    const int m_min = std::max(1, m_mid - halfspan);
    const int m_max = m_mid + halfspan;

    const auto disp = dispersion_curves(g, la_min, la_max, la_step, m_min,
                                        m_max);
    Table dispersion;
    dispersion.columns = {"air_gap_m", "mode_index", "frequency_hz"};
    for (const auto& p : disp)
        dispersion.rows.push_back({p.air_gap_m, (double)p.index,
                                   p.frequency_hz});
    write_table(ctx, "dispersion.csv", dispersion);

    Table character;
    character.columns = {"air_gap_m", "mode_index", "air_character"};
    for (const auto& p : disp) {
        CavityGeometry gg = g;
        gg.air_gap_m = p.air_gap_m;
        character.rows.push_back({p.air_gap_m, (double)p.index,
                                  air_character(p.index, gg)});
    }
    write_table(ctx, "character.csv", character);

    Report rep;
    rep.add("air_gap_m", g.air_gap_m);
    rep.add("membrane_thickness_m", g.membrane_thickness_m);
    rep.add("optical_length_m", optical_length(g));
    rep.add("fsr_hz", fsr(g));
    rep.add("mode_index_center", m_mid);
    const double nu_mid = resonance_approx(m_mid, g);
    rep.add("frequency_hz", nu_mid);
    rep.add("slope_hz_per_m", frequency_slope(m_mid, g));
    rep.add("air_character", air_character(m_mid, g));
    const GaussianMode gm = beam_waist_and_mode_volume(g, nu_mid);
    rep.add("waist_m", gm.waist_m);
    rep.add("mirror_spot_m", gm.mirror_spot_m);
    rep.add("mode_volume_m3", gm.mode_volume_m3);
    write_report(ctx, "modes_report.csv", rep);

    if (ctx.svg) {
        std::vector<Series> series(m_max - m_min + 1);
        for (const auto& p : disp) {
            Series& s = series[p.index - m_min];
            s.label = "m=" + std::to_string(p.index);
            s.x.push_back(p.air_gap_m * 1e6);
            s.y.push_back(p.frequency_hz * 1e-12);
        }
        write_svg(ctx, "dispersion.svg", "fundamental modes", "air gap (um)",
                  "frequency (THz)", series);
    }
    return 0;
}

int cmd_fit_geometry(const Ctx& ctx, const RunConfig& cfg,
                     const fs::path& input, bool fix_d) {
    const std::vector<ModePoint> points = read_mode_points(input);
    const GeometryFit fit = fit_geometry(points, cfg.geometry(), fix_d);

    Report rep;
    rep.add("points", (int)points.size());
    rep.add("converged", fit.converged);
    rep.add("iterations", fit.iterations);
    rep.add("fixed_membrane", fix_d);
    rep.add("membrane_thickness_m", fit.membrane_thickness_m);
    rep.add("sigma_membrane_thickness_m", fit.sigma_membrane_thickness_m);
    rep.add("air_gap0_m", fit.air_gap0_m);
    rep.add("sigma_air_gap0_m", fit.sigma_air_gap0_m);
    rep.add("rms_residual_hz", fit.rms_residual_hz);
    rep.add("d_identifiable", fit.d_identifiable);
    const auto [mn, mx] = std::minmax_element(fit.mode_indices.begin(),
                                              fit.mode_indices.end());
    rep.add("mode_index_min", *mn);
    rep.add("mode_index_max", *mx);
    for (const auto& alt : fit.alternatives) {
        const std::string tag =
            alt.index_shift < 0 ? "alt_minus1_" : "alt_plus1_";
        rep.add(tag + "membrane_thickness_m", alt.membrane_thickness_m);
        rep.add(tag + "air_gap0_m", alt.air_gap0_m);
        rep.add(tag + "rms_residual_hz", alt.rms_residual_hz);
    }
    write_report(ctx, "geometry_fit.csv", rep);

    Table residuals;
    residuals.columns = {"length_offset_m", "frequency_hz", "mode_index",
                         "model_hz", "residual_hz"};
    CavityGeometry gfit = cfg.geometry();
    gfit.membrane_thickness_m = fit.membrane_thickness_m;
    for (std::size_t i = 0; i < points.size(); ++i) {
        CavityGeometry gg = gfit;
        gg.air_gap_m = fit.air_gap0_m + points[i].length_offset_m;
        const double model = resonance_approx(fit.mode_indices[i], gg);
        residuals.rows.push_back({points[i].length_offset_m,
                                  points[i].frequency_hz,
                                  (double)fit.mode_indices[i], model,
                                  points[i].frequency_hz - model});
    }
    write_table(ctx, "geometry_residuals.csv", residuals);

    if (ctx.svg) {
        Series s;
        s.label = "residual";
        for (const auto& row : residuals.rows) {
            s.x.push_back(row[0] * 1e6);
            s.y.push_back(row[4] * 1e-9);
        }
        write_svg(ctx, "geometry_residuals.svg", "geometry fit residuals",
                  "length offset (um)", "residual (GHz)", {s});
    }

    if (!fit.converged) {
        std::cerr << "error: geometry fit did not converge\n";
        return 1;
    }
    return 0;
}

int cmd_linewidth(const Ctx& ctx, const RunConfig& cfg, const fs::path& input) {
    std::vector<std::pair<std::string, ScanRecord>> scans;
    if (fs::is_directory(input)) {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(input))
            if (entry.is_regular_file() && entry.path().extension() == ".csv")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw std::invalid_argument(input.string() + ": no .csv files");
        for (const auto& f : files)
            scans.emplace_back(f.filename().string(), read_scan(f));
    } else {
        scans.emplace_back(input.filename().string(), read_scan(input));
    }

    Table per_scan;
    per_scan.columns = {"scan_index",        "linewidth_hz",
                        "uncertainty_hz",    "calibration_scale_hz_per_unit",
                        "reduced_chisq",     "rejected"};
    MetaLines meta;
    std::vector<double> accepted, accepted_unc;
    int rejected = 0;
    for (std::size_t i = 0; i < scans.size(); ++i) {
        meta.emplace_back("scan_" + std::to_string(i), scans[i].first);
        ScanRecord rec = scans[i].second;
        if (!rec.sideband_offset_hz)
            rec.sideband_offset_hz = cfg.sideband_offset_hz;
        LinewidthFit fit;
        std::string reason;
        try {
            fit = fit_linewidth_sidebanded(rec);
            if (fit.rejected) reason = fit.reject_reason;
        } catch (const std::exception& e) {
            fit = LinewidthFit{};
            fit.rejected = true;
            reason = e.what();
        }
        if (fit.rejected) {
            ++rejected;
            meta.emplace_back("reject_" + std::to_string(i), reason);
        } else {
            accepted.push_back(fit.linewidth_hz);
            accepted_unc.push_back(fit.uncertainty_hz);
        }
        per_scan.rows.push_back({(double)i, fit.linewidth_hz,
                                 fit.uncertainty_hz,
                                 fit.calibration_scale_hz_per_unit,
                                 fit.reduced_chisq, fit.rejected ? 1.0 : 0.0});
    }
    write_table(ctx, "linewidth_scans.csv", per_scan, meta);

    auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };

    Report rep;
    rep.add("scans_total", (int)scans.size());
    rep.add("scans_rejected", rejected);
    if (!accepted.empty()) {
        double mean = 0.0;
        for (double v : accepted) mean += v;
        mean /= double(accepted.size());
        const double median = median_of(accepted);
        const double median_unc = median_of(accepted_unc);
        rep.add("linewidth_mean_hz", mean);
        rep.add("linewidth_median_hz", median);
        rep.add("uncertainty_median_hz", median_unc);
        const CavityGeometry g = cfg.geometry();
        validate(g);
        LinewidthFit agg;
        agg.linewidth_hz = median;
        agg.uncertainty_hz = median_unc;
        const FinesseEstimate fe = finesse_from_linewidth(agg, g);
        rep.add("fsr_hz", fsr(g));
        rep.add("finesse", fe.finesse);
        rep.add("finesse_uncertainty", fe.uncertainty);
    }
    write_report(ctx, "linewidth_report.csv", rep);

    if (ctx.svg && !accepted.empty()) {
        Series s;
        s.label = "linewidth";
        for (const auto& row : per_scan.rows)
            if (row[5] == 0.0) {
                s.x.push_back(row[0]);
                s.y.push_back(row[1] * 1e-9);
            }
        write_svg(ctx, "linewidth_scans.svg", "fitted linewidths",
                  "scan index", "linewidth (GHz)", {s});
    }

    if (accepted.empty()) {
        std::cerr << "error: all " << scans.size() << " scans rejected\n";
        return 1;
    }
    return 0;
}

int cmd_vibration(const Ctx& ctx, const RunConfig& cfg, const fs::path& dir,
                  double bin_width_s, double cycle_s, int mode_index) {
    const std::vector<ScanRecord> sweeps = read_scan_dir(dir);
    const CavityGeometry g = cfg.geometry();
    validate(g);
    const int m = mode_index > 0
                      ? mode_index
                      : central_order(g, cfg.laser_frequency_hz);
    const double slope = frequency_slope(m, g);

    const BroadeningFit overall = fit_vibration_broadening(sweeps);
    const double disp = displacement_from_broadening(overall.fwhm_hz, m, g);
    const double disp_unc = overall.fwhm_uncertainty_hz / slope;

    const bool have_sync =
        std::all_of(sweeps.begin(), sweeps.end(),
                    [](const ScanRecord& r) { return r.sync_offset_s.has_value(); });
    if (!have_sync)
        std::cerr << "warning: sync_offset_s column missing; "
                     "running unbinned\n";

    Report rep;
    rep.add("sweeps_total", (int)sweeps.size());
    rep.add("sweeps_used", overall.sweeps_used);
    rep.add("sweeps_excluded", overall.sweeps_excluded);
    rep.add("mode_index", m);
    rep.add("slope_hz_per_m", slope);
    rep.add("fwhm_hz", overall.fwhm_hz);
    rep.add("fwhm_uncertainty_hz", overall.fwhm_uncertainty_hz);
    rep.add("displacement_m", disp);
    rep.add("displacement_uncertainty_m", disp_unc);
    rep.add("sync_binned", have_sync);

    if (have_sync) {
        const auto bins = bin_by_sync(sweeps, bin_width_s, cycle_s);
        Table table;
        table.columns = {"bin_center_s", "sweep_count", "fwhm_hz",
                         "fwhm_uncertainty_hz", "displacement_m"};
        Series s;
        s.label = "displacement";
        for (const auto& b : bins) {
            double fwhm = 0.0, unc = 0.0, d = 0.0;
            if (b.fit) {
                fwhm = b.fit->fwhm_hz;
                unc = b.fit->fwhm_uncertainty_hz;
                d = displacement_from_broadening(fwhm, m, g);
                s.x.push_back(b.bin_center_s);
                s.y.push_back(d * 1e9);
            }
            table.rows.push_back({b.bin_center_s, (double)b.sweep_count, fwhm,
                                  unc, d});
        }
        write_table(ctx, "vibration_bins.csv", table);
        if (ctx.svg)
            write_svg(ctx, "vibration_bins.svg",
                      "vibration amplitude over the disturbance cycle",
                      "sync offset (s)", "displacement FWHM (nm)", {s});
        rep.add("bins", (int)bins.size());
    }
    write_report(ctx, "vibration_report.csv", rep);
    return 0;
}

int cmd_purcell(const Ctx& ctx, const RunConfig& cfg, double f_min,
                double f_max, int f_points, double sigma_max, int sigma_points,
                double finesse_ref, int nodes) {
    const CavityGeometry g = cfg.geometry();
    validate(g);
    if (!(f_min > 0.0) || !(f_max > f_min) || f_points < 2)
        throw std::invalid_argument("purcell: invalid finesse range");
    if (!(sigma_max >= 0.0) || sigma_points < 2 || !(finesse_ref > 0.0))
        throw std::invalid_argument("purcell: invalid sigma range");

    const EmitterSpec emitter = cfg.emitter();
    const int m = central_order(g, cfg.laser_frequency_hz);
    const double nu = resonance_approx(m, g);
    const GaussianMode gm = beam_waist_and_mode_volume(g, nu);
    const double n_d = g.refractive_index;

    auto resonant_purcell = [&](double finesse) {
        const double q = quality_factor(finesse, g, nu);
        return purcell_factor(q, gm.mode_volume_m3, nu, n_d);
    };

    Table vs_finesse;
    vs_finesse.columns = {"finesse", "purcell_factor", "lifetime_s",
                          "p_zpl_cavity"};
    Series s_p, s_tau;
    s_p.label = "p_zpl";
    s_tau.label = "lifetime (ns)";
    for (int i = 0; i < f_points; ++i) {
        const double f =
            f_min + (f_max - f_min) * double(i) / double(f_points - 1);
        const EmissionResult r =
            emission_on_resonance(resonant_purcell(f), emitter, nu, n_d);
        vs_finesse.rows.push_back({f, r.purcell_factor, r.lifetime_s,
                                   r.p_zpl_cavity});
        s_p.x.push_back(f);
        s_p.y.push_back(r.p_zpl_cavity);
        s_tau.x.push_back(f);
        s_tau.y.push_back(r.lifetime_s * 1e9);
    }
    write_table(ctx, "purcell_vs_finesse.csv", vs_finesse);

    EmitterSpec ideal = emitter;
    ideal.dipole_mismatch_rad = 0.0;
    ideal.antinode_offset_m = 0.0;

    Table vs_sigma;
    vs_sigma.columns = {"sigma_m", "p_zpl_ideal", "p_zpl_config"};
    Series s_ideal, s_cfg;
    s_ideal.label = "ideal";
    s_cfg.label = "config emitter";
    for (int i = 0; i < sigma_points; ++i) {
        const double sigma =
            sigma_max * double(i) / double(sigma_points - 1);
        const VibrationSpec v{sigma};
        const double p_ideal =
            vibration_averaged_emission(ideal, g, m, finesse_ref, v, nodes)
                .p_zpl_cavity;
        const double p_cfg =
            vibration_averaged_emission(emitter, g, m, finesse_ref, v, nodes)
                .p_zpl_cavity;
        vs_sigma.rows.push_back({sigma, p_ideal, p_cfg});
        s_ideal.x.push_back(sigma * 1e9);
        s_ideal.y.push_back(p_ideal);
        s_cfg.x.push_back(sigma * 1e9);
        s_cfg.y.push_back(p_cfg);
    }
    write_table(ctx, "pzpl_vs_sigma.csv", vs_sigma,
                {{"finesse", format_double(finesse_ref)}});

    const double fp_ref = resonant_purcell(finesse_ref);
    const EmissionResult res = emission_on_resonance(fp_ref, emitter, nu, n_d);
    const EmissionResult avg = vibration_averaged_emission(
        emitter, g, m, finesse_ref, cfg.vibration(), nodes);

    Report rep;
    rep.add("mode_index", m);
    rep.add("frequency_hz", nu);
    rep.add("finesse_ref", finesse_ref);
    rep.add("quality_factor", quality_factor(finesse_ref, g, nu));
    rep.add("waist_m", gm.waist_m);
    rep.add("mode_volume_m3", gm.mode_volume_m3);
    rep.add("purcell_resonant", fp_ref);
    rep.add("mismatch_factor", mismatch_factor(emitter, nu, n_d));
    rep.add("p_zpl_resonant", res.p_zpl_cavity);
    rep.add("lifetime_resonant_s", res.lifetime_s);
    rep.add("vibration_sigma_m", cfg.vibration_sigma_m);
    rep.add("p_zpl_averaged", avg.p_zpl_cavity);
    rep.add("lifetime_averaged_s", avg.lifetime_s);
    rep.add("zpl_improvement", res.p_zpl_cavity / emitter.zpl_branching);
    // headline figure: 13x ZPL improvement and 3x collection improvement
    rep.add("entanglement_rate_gain_13x3", entanglement_rate_gain(13.0, 3.0));
    write_report(ctx, "purcell_report.csv", rep);

    if (ctx.svg) {
        write_svg(ctx, "purcell_vs_finesse.svg", "resonant emission vs finesse",
                  "finesse", "p_zpl / lifetime", {s_p, s_tau});
        write_svg(ctx, "pzpl_vs_sigma.svg",
                  "vibration-averaged ZPL probability", "sigma_L (nm)",
                  "p_zpl", {s_ideal, s_cfg});
    }
    return 0;
}

int cmd_synth(const Ctx& ctx, const RunConfig& cfg, const std::string& kind,
              double noise_rel, int sweeps, int samples, double jitter_fwhm) {
    fs::create_directories(ctx.out_dir);
    const MetaLines provenance = {
        {"timestamp", iso_timestamp()},
        {"config_hash", ctx.config_hash},
        {"tool_version", kToolVersion},
    };
    auto stamp = [&](std::map<std::string, std::string>& meta) {
        for (const auto& [k, v] : provenance) meta[k] = v;
    };

    if (kind == "sideband") {
        synth::SidebandScanTruth t;
        t.sideband_offset_hz = cfg.sideband_offset_hz;
        if (noise_rel >= 0.0) t.noise_rel = noise_rel;
        if (samples > 0) t.samples = samples;
        ScanRecord rec = synth::sideband_scan(t, ctx.seed);
        stamp(rec.metadata);
        const fs::path path = ctx.out_dir / "sideband_scan.csv";
        write_scan(path, rec);
        std::cout << "wrote " << path.string() << "\n";
        return 0;
    }
    if (kind == "vibration" || kind == "two-phase") {
        synth::VibrationSweepTruth base;
        if (noise_rel >= 0.0) base.noise_rel = noise_rel;
        if (sweeps > 0) base.sweeps = sweeps;
        if (samples > 0) base.samples = samples;
        if (jitter_fwhm > 0.0) base.jitter_fwhm_hz = jitter_fwhm;
        std::vector<ScanRecord> recs;
        if (kind == "vibration") {
            recs = synth::vibration_sweeps(base, ctx.seed);
        } else {
            synth::TwoPhaseTruth t;
            t.base = base;
            recs = synth::two_phase_sweeps(t, ctx.seed);
        }
        for (std::size_t j = 0; j < recs.size(); ++j) {
            stamp(recs[j].metadata);
            char name[32];
            std::snprintf(name, sizeof name, "sweep_%03zu.csv", j);
            const fs::path path = ctx.out_dir / name;
            write_scan(path, recs[j]);
            std::cout << "wrote " << path.string() << "\n";
        }
        return 0;
    }
    if (kind == "mode-points") {
        synth::ModePointTruth t;
        t.membrane_thickness_m = cfg.membrane_thickness_m;
        t.air_gap0_m = cfg.air_gap_m;
        t.refractive_index = cfg.refractive_index;
        t.center_frequency_hz = cfg.laser_frequency_hz;
        if (noise_rel >= 0.0) t.frequency_noise_hz = noise_rel;
        const std::vector<ModePoint> points = synth::mode_points(t, ctx.seed);
        std::map<std::string, std::string> meta;
        meta["seed"] = std::to_string(ctx.seed);
        meta["truth_membrane_thickness_m"] =
            format_double(t.membrane_thickness_m);
        meta["truth_air_gap0_m"] = format_double(t.air_gap0_m);
        meta["truth_frequency_noise_hz"] = format_double(t.frequency_noise_hz);
        stamp(meta);
        const fs::path path = ctx.out_dir / "mode_points.csv";
        write_mode_points(path, points, meta);
        std::cout << "wrote " << path.string() << "\n";
        return 0;
    }
    throw std::invalid_argument(
        "synth: unknown kind '" + kind +
        "' (use sideband, vibration, two-phase, or mode-points)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"diamond-membrane microcavity modeling and scan analysis"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool svg = false;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--out", out_dir, "output directory (default: .)");
    app.add_option("--seed", seed, "seed for synthetic data (default: 0)");
    app.add_flag("--svg", svg, "also render simple SVG line plots");

    // modes
    CLI::App* modes = app.add_subcommand(
        "modes", "dispersion and mode-character tables over an air-gap range");
    modes->fallthrough();
    double la_min = 0.0, la_max = 0.0, la_step = 1.0e-8;
    int halfspan = 2;
    modes->add_option("--la-min", la_min, "air-gap range start (m)");
    modes->add_option("--la-max", la_max, "air-gap range end (m)");
    modes->add_option("--la-step", la_step, "air-gap step (m)");
    modes->add_option("--mode-span", halfspan,
                      "branches on each side of the central order");

    // fit-geometry
    CLI::App* fitgeo = app.add_subcommand(
        "fit-geometry", "fit (d, L_a0) to a mode-point CSV");
    fitgeo->fallthrough();
    std::string points_path;
    bool fix_d = false;
    fitgeo->add_option("points", points_path, "mode-point CSV file")
        ->required();
    fitgeo->add_flag("--fix-d", fix_d,
                     "hold the membrane thickness at the config value");

    // linewidth
    CLI::App* linewidth = app.add_subcommand(
        "linewidth", "sideband-calibrated linewidth fits");
    linewidth->fallthrough();
    std::string scan_path;
    linewidth->add_option("scan", scan_path, "scan CSV file or directory")
        ->required();

    // vibration
    CLI::App* vibration = app.add_subcommand(
        "vibration", "vibration broadening and sync-binned displacement");
    vibration->fallthrough();
    std::string sweep_dir;
    double bin_width = 0.1, cycle = 1.0;
    int mode_index = 0;
    vibration->add_option("sweeps", sweep_dir, "directory of sweep CSV files")
        ->required();
    vibration->add_option("--bin-width", bin_width, "sync bin width (s)");
    vibration->add_option("--cycle", cycle, "disturbance cycle length (s)");
    vibration->add_option("--mode-index", mode_index,
                          "longitudinal order (default: from config)");

    // purcell
    CLI::App* purcell = app.add_subcommand(
        "purcell", "emission curves vs finesse and vibration amplitude");
    purcell->fallthrough();
    double f_min = 4000.0, f_max = 15000.0, finesse_ref = 5000.0;
    int f_points = 45;
    double sigma_max = 0.5e-9;
    int sigma_points = 26, nodes = 64;
    purcell->add_option("--finesse-min", f_min, "finesse sweep start");
    purcell->add_option("--finesse-max", f_max, "finesse sweep end");
    purcell->add_option("--finesse-points", f_points, "finesse sweep points");
    purcell->add_option("--finesse", finesse_ref,
                        "finesse for the vibration sweep and the report");
    purcell->add_option("--sigma-max", sigma_max,
                        "largest vibration sigma_L (m)");
    purcell->add_option("--sigma-points", sigma_points,
                        "vibration sweep points");
    purcell->add_option("--nodes", nodes, "Gauss-Hermite nodes (>= 64)");

    // synth
    CLI::App* synth_cmd = app.add_subcommand(
        "synth", "generate deterministic synthetic data sets");
    synth_cmd->fallthrough();
    std::string kind;
    double noise_rel = -1.0, jitter_fwhm = 0.0;
    int sweeps = 0, samples = 0;
    synth_cmd
        ->add_option("--kind", kind,
                     "sideband | vibration | two-phase | mode-points")
        ->required();
    synth_cmd->add_option("--noise", noise_rel,
                          "noise level override (relative; Hz sigma for "
                          "mode-points)");
    synth_cmd->add_option("--sweeps", sweeps, "number of sweeps");
    synth_cmd->add_option("--samples", samples, "samples per scan");
    synth_cmd->add_option("--jitter-fwhm-hz", jitter_fwhm,
                          "center-jitter FWHM override (Hz)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        Ctx ctx{fs::path(out_dir), config_hash(cfg), seed, svg};

        if (modes->parsed())
            return cmd_modes(ctx, cfg, la_min, la_max, la_step, halfspan);
        if (fitgeo->parsed())
            return cmd_fit_geometry(ctx, cfg, points_path, fix_d);
        if (linewidth->parsed()) return cmd_linewidth(ctx, cfg, scan_path);
        if (vibration->parsed())
            return cmd_vibration(ctx, cfg, sweep_dir, bin_width, cycle,
                                 mode_index);
        if (purcell->parsed())
            return cmd_purcell(ctx, cfg, f_min, f_max, f_points, sigma_max,
                               sigma_points, finesse_ref, nodes);
        if (synth_cmd->parsed())
            return cmd_synth(ctx, cfg, kind, noise_rel, sweeps, samples,
                             jitter_fwhm);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
