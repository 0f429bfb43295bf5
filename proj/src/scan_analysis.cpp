#include "cavity/scan_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cavity/constants.hpp"
#include "cavity/emitter.hpp"
#include "cavity/least_squares.hpp"

namespace cavity {

namespace {

// ------------------------------------------------------------------ geometry

// Closed-form frequency and both partial derivatives at (m, L_a, d).
struct ModelPoint {
    double nu;
    double dnu_dla;
    double dnu_dd;
};

ModelPoint eq_derivs(int m, double la, double d, double nd) {
    ModelPoint out;
    const double p = la + nd * d;
    const double r = (nd - 1.0) / (nd + 1.0);
    const double theta = m * kPi * (la - nd * d) / p;
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    const double sn = r * std::sin(theta);
    const double aprime = r * std::cos(theta) / std::sqrt(1.0 - sn * sn);
    out.nu = kSpeedOfLight / (2.0 * kPi * p) * (kPi * m - sgn * std::asin(sn));
    // d theta / d L_a = 2 pi m n_d d / P^2,  d theta / d d = -2 pi m n_d L_a / P^2
    out.dnu_dla = -out.nu / p -
                  sgn * kSpeedOfLight * aprime * m * nd * d / (p * p * p);
    out.dnu_dd = -nd * out.nu / p +
                 sgn * kSpeedOfLight * aprime * m * nd * la / (p * p * p);
    return out;
}

std::vector<int> assign_indices(const std::vector<ModePoint>& points,
                                const CavityGeometry& init) {
    std::vector<int> idx(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CavityGeometry g = init;
        g.air_gap_m = init.air_gap_m + points[i].length_offset_m;
        if (!(g.air_gap_m > 0.0))
            throw std::invalid_argument(
                "fit_geometry: init air gap incompatible with offsets");
        const int m_est = std::max(
            1, (int)std::llround(2.0 * optical_length(g) *
                                 points[i].frequency_hz / kSpeedOfLight));
        int best_m = m_est;
        double best = 1e300;
        for (int m = std::max(1, m_est - 3); m <= m_est + 3; ++m) {
            const double diff =
                std::abs(resonance_approx(m, g) - points[i].frequency_hz);
            if (diff < best) {
                best = diff;
                best_m = m;
            }
        }
        idx[i] = best_m;
    }
    return idx;
}

struct GeometryCore {
    Eigen::VectorXd x;  // (d, la0) or (la0)
    double sigma_d = 0.0;
    double sigma_la0 = 0.0;
    double rms = 0.0;
    int iterations = 0;
    bool converged = false;
};

GeometryCore fit_geometry_core(const std::vector<ModePoint>& points,
                               const std::vector<int>& indices,
                               const CavityGeometry& init, bool fix_d) {
    const double nd = init.refractive_index;
    const double d_fixed = init.membrane_thickness_m;
    const long n = (long)points.size();

    auto unpack = [&](const Eigen::VectorXd& x, double& d, double& la0) {
        if (fix_d) {
            d = d_fixed;
            la0 = x(0);
        } else {
            d = x(0);
            la0 = x(1);
        }
    };

    ResidualFn residuals = [&, indices](const Eigen::VectorXd& x) {
        double d, la0;
        unpack(x, d, la0);
        Eigen::VectorXd r(n);
        for (long i = 0; i < n; ++i) {
            const double la = la0 + points[i].length_offset_m;
            if (!(la > 0.0) || d < 0.0) {
                // out of the physical domain: repel the step
                r.setConstant(1e20);
                return r;
            }
            CavityGeometry g;
            g.air_gap_m = la;
            g.membrane_thickness_m = d;
            g.refractive_index = nd;
            r(i) = resonance_approx(indices[i], g) - points[i].frequency_hz;
        }
        return r;
    };

    JacobianFn jac = [&, indices](const Eigen::VectorXd& x) {
        double d, la0;
        unpack(x, d, la0);
        Eigen::MatrixXd j(n, x.size());
        for (long i = 0; i < n; ++i) {
            const double la = la0 + points[i].length_offset_m;
            const ModelPoint mp = eq_derivs(indices[i], la, d, nd);
            if (fix_d) {
                j(i, 0) = mp.dnu_dla;
            } else {
                j(i, 0) = mp.dnu_dd;
                j(i, 1) = mp.dnu_dla;
            }
        }
        return j;
    };

    Eigen::VectorXd x0(fix_d ? 1 : 2);
    if (fix_d)
        x0 << init.air_gap_m;
    else
        x0 << std::max(init.membrane_thickness_m, 0.0), init.air_gap_m;

    const LmResult res = levenberg_marquardt(residuals, jac, x0);

    GeometryCore core;
    core.x = res.x;
    core.rms = std::sqrt(res.ssr / double(n));
    core.iterations = res.iterations;
    core.converged = res.converged;
    if (res.covariance.size() > 0) {
        if (fix_d) {
            core.sigma_la0 = std::sqrt(std::max(0.0, res.covariance(0, 0)));
        } else {
            core.sigma_d = std::sqrt(std::max(0.0, res.covariance(0, 0)));
            core.sigma_la0 = std::sqrt(std::max(0.0, res.covariance(1, 1)));
        }
    }
    return core;
}

CavityGeometry fitted_geometry(const GeometryCore& core,
                               const CavityGeometry& init, bool fix_d) {
    CavityGeometry g = init;
    if (fix_d) {
        g.air_gap_m = core.x(0);
    } else {
        g.membrane_thickness_m = std::max(core.x(0), 0.0);
        g.air_gap_m = core.x(1);
    }
    return g;
}

// Coordinate descent over the discrete assignment: fit, reassign the indices
// at the fitted geometry, refit, until the assignment stops changing.
GeometryCore settle_assignment(const std::vector<ModePoint>& points,
                               std::vector<int>& indices,
                               const CavityGeometry& start, bool fix_d) {
    GeometryCore core = fit_geometry_core(points, indices, start, fix_d);
    for (int round = 0; round < 8; ++round) {
        const CavityGeometry g = fitted_geometry(core, start, fix_d);
        std::vector<int> next;
        try {
            next = assign_indices(points, g);
        } catch (const std::invalid_argument&) {
            break;  // fitted gap left the physical domain; keep the last fit
        }
        if (next == indices) break;
        indices = std::move(next);
        core = fit_geometry_core(points, indices, g, fix_d);
    }
    return core;
}

// --------------------------------------------------------------- peak seeding

std::size_t argmax(const std::vector<double>& v, std::size_t lo,
                   std::size_t hi) {  // [lo, hi)
    std::size_t best = lo;
    for (std::size_t i = lo; i < hi; ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

// ---------------------------------------------------------------- vibration

struct CenteredSweep {
    std::vector<double> x;  // shifted to the sweep's own peak centroid
    std::vector<double> s;
};

// Centroid of the samples in the top 20% of the signal range, or nothing if
// the sweep has no usable peak.
std::optional<double> top20_centroid(const std::vector<double>& x,
                                     const std::vector<double>& s) {
    const auto [mn_it, mx_it] = std::minmax_element(s.begin(), s.end());
    const double mn = *mn_it, mx = *mx_it;
    if (!(mx > mn)) return std::nullopt;
    const double cut = mn + 0.8 * (mx - mn);
    double num = 0.0, den = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double w = s[i] - cut;
        if (w > 0.0) {
            num += w * x[i];
            den += w;
            ++count;
        }
    }
    if (count < 3 || !(den > 0.0)) return std::nullopt;
    return num / den;
}

double linear_interp(const std::vector<double>& x, const std::vector<double>& s,
                     double q) {
    // x ascending; q within [x.front(), x.back()]
    const auto it = std::upper_bound(x.begin(), x.end(), q);
    std::size_t hi = std::min<std::size_t>(x.size() - 1,
                                           (std::size_t)(it - x.begin()));
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    const double t = (q - x[lo]) / (x[hi] - x[lo]);
    return s[lo] + t * (s[hi] - s[lo]);
}

struct GaussianFitResult {
    double fwhm = 0.0;
    double fwhm_sigma = 0.0;
};

GaussianFitResult fit_gaussian_baseline(const std::vector<double>& x,
                                        const std::vector<double>& y) {
    const long n = (long)x.size();
    const double b0 = *std::min_element(y.begin(), y.end());
    const std::size_t ipk = argmax(y, 0, y.size());
    const double a0 = y[ipk] - b0;
    const double c0 = x[ipk];
    double m2num = 0.0, m2den = 0.0;
    for (long i = 0; i < n; ++i) {
        const double w = y[i] - b0;
        if (w > 0.0) {
            m2num += w * (x[i] - c0) * (x[i] - c0);
            m2den += w;
        }
    }
    const double step = (x.back() - x.front()) / double(n - 1);
    const double s0 = std::sqrt(std::max(m2num / std::max(m2den, 1e-300),
                                         step * step));

    ResidualFn residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(n);
        for (long i = 0; i < n; ++i) {
            const double u = (x[i] - p(2)) / p(3);
            r(i) = p(0) + p(1) * std::exp(-0.5 * u * u) - y[i];
        }
        return r;
    };
    JacobianFn jac = [&](const Eigen::VectorXd& p) {
        Eigen::MatrixXd j(n, 4);
        for (long i = 0; i < n; ++i) {
            const double u = (x[i] - p(2)) / p(3);
            const double e = std::exp(-0.5 * u * u);
            j(i, 0) = 1.0;
            j(i, 1) = e;
            j(i, 2) = p(1) * e * u / p(3);
            j(i, 3) = p(1) * e * u * u / p(3);
        }
        return j;
    };

    Eigen::VectorXd p0(4);
    p0 << b0, a0, c0, s0;
    const LmResult res = levenberg_marquardt(residuals, jac, p0);
    GaussianFitResult out;
    out.fwhm = fwhm_from_sigma(std::abs(res.x(3)));
    if (res.covariance.size() > 0)
        out.fwhm_sigma =
            fwhm_from_sigma(std::sqrt(std::max(0.0, res.covariance(3, 3))));
    return out;
}

}  // namespace

GeometryFit fit_geometry(const std::vector<ModePoint>& points,
                         const CavityGeometry& init, bool fix_d) {
    if (points.size() < 4)
        throw std::invalid_argument("fit_geometry: need at least 4 points");
    validate(init);
    for (const auto& p : points)
        if (!(p.frequency_hz > 0.0))
            throw std::invalid_argument("fit_geometry: non-positive frequency");

    std::vector<int> indices = assign_indices(points, init);
    GeometryCore core = settle_assignment(points, indices, init, fix_d);

    // The landscape is doubly multimodal.  Every index can be off by a
    // common integer (the fitted optical length stretches half a wave per
    // step), and at fixed optical length the dispersion term is periodic in
    // the membrane thickness with period P/(2 m n_d), so a plain descent
    // gets trapped one wiggle over.  Multistart over that (shift, thickness)
    // grid, settling each candidate, and keep the lowest residual.
    double nu_mean = 0.0;
    for (const auto& p : points) nu_mean += p.frequency_hz;
    nu_mean /= double(points.size());
    const double half_wave = kSpeedOfLight / (2.0 * nu_mean);
    double min_offset = 0.0;
    for (const auto& p : points)
        min_offset = std::min(min_offset, p.length_offset_m);

    const std::vector<int> base_idx = indices;
    const CavityGeometry base_g = fitted_geometry(core, init, fix_d);
    const double p_base = optical_length(base_g);
    const double m_mean =
        std::accumulate(base_idx.begin(), base_idx.end(), 0.0) /
        double(base_idx.size());
    const double d_period =
        p_base / (2.0 * std::max(m_mean, 1.0) * init.refractive_index);
    const int j_max = fix_d ? 0 : 8;
    for (int s = -6; s <= 6; ++s) {
        for (int j = -j_max; j <= j_max; ++j) {
            if (s == 0 && j == 0) continue;
            std::vector<int> cand = base_idx;
            bool ok = true;
            for (int& m : cand) {
                m += s;
                if (m < 1) ok = false;
            }
            if (!ok) continue;
            CavityGeometry start = base_g;
            if (!fix_d) {
                start.membrane_thickness_m += j * d_period;
                if (start.membrane_thickness_m < 0.0) continue;
            }
            start.air_gap_m = p_base + s * half_wave -
                              init.refractive_index * start.membrane_thickness_m;
            if (!(start.air_gap_m + min_offset > 0.0)) continue;
            GeometryCore c = settle_assignment(points, cand, start, fix_d);
            if (c.rms < 0.999 * core.rms) {
                core = c;
                indices = std::move(cand);
            }
        }
    }

    GeometryFit fit;
    if (fix_d) {
        fit.membrane_thickness_m = init.membrane_thickness_m;
        fit.air_gap0_m = core.x(0);
    } else {
        fit.membrane_thickness_m = core.x(0);
        fit.air_gap0_m = core.x(1);
    }
    fit.sigma_membrane_thickness_m = core.sigma_d;
    fit.sigma_air_gap0_m = core.sigma_la0;
    fit.rms_residual_hz = core.rms;
    fit.iterations = core.iterations;
    fit.converged = core.converged;
    fit.mode_indices = indices;

    // Half-wave ambiguity: the same data refitted with every index shifted.
    for (int shift : {-1, +1}) {
        std::vector<int> shifted = indices;
        bool ok = true;
        for (int& m : shifted) {
            m += shift;
            if (m < 1) ok = false;
        }
        if (!ok) continue;
        CavityGeometry astart = fitted_geometry(core, init, fix_d);
        if (astart.air_gap_m + shift * half_wave + min_offset > 0.0)
            astart.air_gap_m += shift * half_wave;
        const GeometryCore alt =
            fit_geometry_core(points, shifted, astart, fix_d);
        GeometryFitAlternative a;
        a.index_shift = shift;
        if (fix_d) {
            a.membrane_thickness_m = init.membrane_thickness_m;
            a.air_gap0_m = alt.x(0);
        } else {
            a.membrane_thickness_m = alt.x(0);
            a.air_gap0_m = alt.x(1);
        }
        a.rms_residual_hz = alt.rms;
        fit.alternatives.push_back(a);
    }

    // d is identifiable only if the offsets span at least one
    // avoided-crossing period of the fitted geometry.
    if (!fix_d && fit.membrane_thickness_m > 0.0) {
        const auto [omin, omax] = std::minmax_element(
            points.begin(), points.end(),
            [](const ModePoint& a, const ModePoint& b) {
                return a.length_offset_m < b.length_offset_m;
            });
        const double span = omax->length_offset_m - omin->length_offset_m;
        const double m_mean =
            std::accumulate(indices.begin(), indices.end(), 0.0) /
            double(indices.size());
        CavityGeometry gfit = init;
        gfit.air_gap_m = fit.air_gap0_m;
        gfit.membrane_thickness_m = fit.membrane_thickness_m;
        const double p = optical_length(gfit);
        const double period =
            p * p / (2.0 * m_mean * init.refractive_index *
                     fit.membrane_thickness_m);
        fit.d_identifiable = span >= period;
    }
    return fit;
}

LinewidthFit fit_linewidth_sidebanded(const ScanRecord& scan) {
    validate(scan);
    if (scan.axis != ScanAxis::cavity_length)
        throw std::invalid_argument(
            "fit_linewidth_sidebanded: needs a cavity_length scan");
    double df = 0.0;
    if (scan.sideband_offset_hz) {
        df = *scan.sideband_offset_hz;
    } else {
        throw std::invalid_argument(
            "fit_linewidth_sidebanded: sideband_offset_hz missing");
    }
    if (!(df > 0.0))
        throw std::invalid_argument("sideband offset must be > 0");

    // Normalize to an ascending axis; a reversed scan is the same data set.
    std::vector<double> x = scan.axis_value;
    std::vector<double> s = scan.signal_v;
    if (x.back() < x.front()) {
        std::reverse(x.begin(), x.end());
        std::reverse(s.begin(), s.end());
    }
    const std::size_t n = x.size();
    if (n < 32)
        throw std::runtime_error("peaks-unresolved: too few samples");

    // Seeds: carrier = tallest sample; sidebands = tallest samples left and
    // right of an exclusion zone around the carrier.
    const std::size_t ic = argmax(s, 0, n);
    const double b0 = *std::min_element(s.begin(), s.end());
    const double half = b0 + 0.5 * (s[ic] - b0);
    std::size_t il = ic, ir = ic;
    while (il > 0 && s[il] > half) --il;
    while (ir + 1 < n && s[ir] > half) ++ir;
    double w0 = x[ir] - x[il];
    const double span = x.back() - x.front();
    if (!(w0 > 0.0)) w0 = span / double(n);
    const double excl = std::max(3.0 * w0, 0.02 * span);

    const auto left_end = std::lower_bound(x.begin(), x.end(), x[ic] - excl);
    const auto right_begin = std::upper_bound(x.begin(), x.end(), x[ic] + excl);
    const std::size_t nl = (std::size_t)(left_end - x.begin());
    const std::size_t jr = (std::size_t)(right_begin - x.begin());
    if (nl == 0 || jr >= n)
        throw std::runtime_error(
            "peaks-unresolved: no room for sidebands beside the carrier");
    const std::size_t isl = argmax(s, 0, nl);
    const std::size_t isr = argmax(s, jr, n);

    // Parameters: (b, A_left, A_carrier, A_right, c_left, c_carrier,
    // c_right, w) with shared width.
    Eigen::VectorXd p0(8);
    p0 << b0, std::max(s[isl] - b0, 1e-12), std::max(s[ic] - b0, 1e-12),
        std::max(s[isr] - b0, 1e-12), x[isl], x[ic], x[isr], w0;

    const long nn = (long)n;
    auto lorentz = [](double xx, double c, double w) {
        const double u = 2.0 * (xx - c) / w;
        return 1.0 / (1.0 + u * u);
    };
    ResidualFn residuals = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(nn);
        for (long i = 0; i < nn; ++i) {
            double v = p(0);
            for (int k = 0; k < 3; ++k)
                v += p(1 + k) * lorentz(x[i], p(4 + k), p(7));
            r(i) = v - s[i];
        }
        return r;
    };
    JacobianFn jac = [&](const Eigen::VectorXd& p) {
        Eigen::MatrixXd j(nn, 8);
        const double w = p(7);
        for (long i = 0; i < nn; ++i) {
            j(i, 0) = 1.0;
            double dw = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double dx = x[i] - p(4 + k);
                const double l = lorentz(x[i], p(4 + k), w);
                j(i, 1 + k) = l;
                j(i, 4 + k) = p(1 + k) * 8.0 * dx / (w * w) * l * l;
                dw += p(1 + k) * 8.0 * dx * dx / (w * w * w) * l * l;
            }
            j(i, 7) = dw;
        }
        return j;
    };

    const LmResult res = levenberg_marquardt(residuals, jac, p0);

    // Order the three centers; the middle one is the carrier.
    std::array<int, 3> slot = {4, 5, 6};
    std::sort(slot.begin(), slot.end(), [&](int a, int b) {
        return res.x(a) < res.x(b);
    });
    const double c_left = res.x(slot[0]);
    const double c_mid = res.x(slot[1]);
    const double c_right = res.x(slot[2]);
    const double spacing = 0.5 * (c_right - c_left);
    if (!(spacing > 0.0))
        throw std::runtime_error("peaks-unresolved: collapsed sideband fit");

    LinewidthFit fit;
    fit.calibration_scale_hz_per_unit = df / spacing;
    fit.linewidth_hz = std::abs(res.x(7)) * fit.calibration_scale_hz_per_unit;
    fit.carrier_center_axis = c_mid;
    fit.sideband_spacing_axis = spacing;
    fit.reduced_chisq = res.ssr / double(nn - 8);

    // Quality screens: a fit can run to completion and still be unusable.
    // Runaway centers mean a sideband latched onto nothing, and a width the
    // sampling cannot support means the optimizer found a noise spike.
    const double step = (x[n - 1] - x[0]) / double(n - 1);
    const char* why = nullptr;
    if (c_left < x[0] || c_right > x[n - 1])
        why = "sideband centers outside the scanned range";
    else if (std::abs(res.x(7)) < step)
        why = "fitted width below the scan's sample spacing";

    if (res.covariance.size() > 0) {
        const auto& cov = res.covariance;
        double worst = 0.0;
        for (int sl : slot)
            worst = std::max(worst, std::sqrt(std::max(0.0, cov(sl, sl))));
        if (worst > 0.2 * spacing && !why)
            why = "center uncertainty exceeds 20% of the sideband spacing";
        // Propagate var(linewidth) through (w, c_left, c_right).
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(8);
        grad(7) = fit.calibration_scale_hz_per_unit;
        grad(slot[0]) = fit.linewidth_hz / (c_right - c_left);
        grad(slot[2]) = -fit.linewidth_hz / (c_right - c_left);
        fit.uncertainty_hz = std::sqrt(std::max(0.0, grad.dot(cov * grad)));
    }
    if (why) {
        fit.rejected = true;
        fit.reject_reason = why;
    }
    return fit;
}

FinesseEstimate finesse_from_linewidth(const LinewidthFit& fit,
                                       const CavityGeometry& g) {
    if (!(fit.linewidth_hz > 0.0))
        throw std::invalid_argument("finesse_from_linewidth: bad linewidth");
    FinesseEstimate out;
    const double f = fsr(g);
    out.finesse = f / fit.linewidth_hz;
    out.uncertainty = out.finesse * fit.uncertainty_hz / fit.linewidth_hz;
    return out;
}

BroadeningFit fit_vibration_broadening(const std::vector<ScanRecord>& sweeps) {
    if (sweeps.size() < 2)
        throw std::invalid_argument("fit_vibration_broadening: need >= 2 sweeps");

    std::vector<CenteredSweep> ok;
    std::vector<double> steps;
    int excluded = 0;
    for (const auto& rec : sweeps) {
        validate(rec);
        if (rec.axis != ScanAxis::laser_frequency)
            throw std::invalid_argument(
                "fit_vibration_broadening: needs laser_frequency sweeps");
        std::vector<double> x = rec.axis_value;
        std::vector<double> s = rec.signal_v;
        if (x.back() < x.front()) {
            std::reverse(x.begin(), x.end());
            std::reverse(s.begin(), s.end());
        }
        const auto center = top20_centroid(x, s);
        if (!center) {
            ++excluded;
            continue;
        }
        for (double& xx : x) xx -= *center;
        for (std::size_t i = 1; i < x.size(); ++i)
            steps.push_back(x[i] - x[i - 1]);
        ok.push_back({std::move(x), std::move(s)});
    }
    if (ok.size() < 2)
        throw std::runtime_error(
            "fit_vibration_broadening: fewer than 2 sweeps with a usable peak");

    double lo = -1e300, hi = 1e300;
    for (const auto& sw : ok) {
        lo = std::max(lo, sw.x.front());
        hi = std::min(hi, sw.x.back());
    }
    std::nth_element(steps.begin(), steps.begin() + steps.size() / 2,
                     steps.end());
    const double step = steps[steps.size() / 2];
    if (!(hi > lo) || !(step > 0.0))
        throw std::runtime_error(
            "fit_vibration_broadening: aligned sweeps do not overlap");
    const int npts = (int)std::floor((hi - lo) / step) + 1;
    if (npts < 16)
        throw std::runtime_error(
            "fit_vibration_broadening: overlap region too small");

    std::vector<double> grid(npts), avg(npts, 0.0);
    for (int i = 0; i < npts; ++i) grid[i] = lo + i * step;
    for (const auto& sw : ok)
        for (int i = 0; i < npts; ++i)
            avg[i] += linear_interp(sw.x, sw.s, grid[i]);
    for (double& a : avg) a /= double(ok.size());

    const GaussianFitResult gf = fit_gaussian_baseline(grid, avg);
    BroadeningFit out;
    out.fwhm_hz = gf.fwhm;
    out.fwhm_uncertainty_hz = gf.fwhm_sigma;
    out.sweeps_used = (int)ok.size();
    out.sweeps_excluded = excluded;
    return out;
}

double displacement_from_broadening(double fwhm_hz, int m,
                                    const CavityGeometry& g) {
    if (!(fwhm_hz > 0.0))
        throw std::invalid_argument("displacement_from_broadening: bad FWHM");
    const double slope = frequency_slope(m, g);
    if (!(slope > 0.0))
        throw std::domain_error(
            "displacement_from_broadening: branch slope vanishes");
    return fwhm_hz / slope;
}

std::vector<SyncBin> bin_by_sync(const std::vector<ScanRecord>& sweeps,
                                 double bin_width_s, double cycle_s) {
    if (!(bin_width_s > 0.0) || !(cycle_s > 0.0))
        throw std::invalid_argument("bin_by_sync: bad bin width or cycle");
    for (const auto& rec : sweeps)
        if (!rec.sync_offset_s)
            throw std::invalid_argument("bin_by_sync: missing-sync-offset");

    const int nbins = std::max(1, (int)std::ceil(cycle_s / bin_width_s - 1e-9));
    std::vector<std::vector<ScanRecord>> groups(nbins);
    for (const auto& rec : sweeps) {
        double t = std::fmod(*rec.sync_offset_s, cycle_s);
        if (t < 0.0) t += cycle_s;
        const int b = std::min(nbins - 1, (int)std::floor(t / bin_width_s));
        groups[b].push_back(rec);
    }

    std::vector<SyncBin> out(nbins);
    for (int b = 0; b < nbins; ++b) {
        const double b_lo = b * bin_width_s;
        const double b_hi = std::min((b + 1) * bin_width_s, cycle_s);
        out[b].bin_center_s = 0.5 * (b_lo + b_hi);
        out[b].sweep_count = (int)groups[b].size();
        if (groups[b].size() >= 2) {
            try {
                out[b].fit = fit_vibration_broadening(groups[b]);
            } catch (const std::runtime_error&) {
                // a thin bin whose sweeps lack usable peaks stays empty,
                // like a bin with too few sweeps
            }
        }
    }
    return out;
}

}  // namespace cavity
