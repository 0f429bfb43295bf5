#include "cavity/mode_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cavity/constants.hpp"

namespace cavity {

namespace {

// Characteristic equation of the two-layer cavity, f(k) = n_d tan(k L_a)
// + tan(n_d k d).  Between consecutive tangent poles f rises monotonically
// from -inf to +inf, so each open pole interval holds exactly one root.
double charfun(double k, double la, double d, double nd) {
    return nd * std::tan(k * la) + std::tan(nd * k * d);
}

// Golden-section search for an extremum of fn on [a, b].  maximize toggles
// between max and min.  Returns the abscissa.
template <typename F>
double golden_section(F&& fn, double a, double b, bool maximize) {
    constexpr double invphi = 0.6180339887498949;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    const double sgn = maximize ? 1.0 : -1.0;
    for (int it = 0; it < 200 && (b - a) > 1e-12 * std::abs(b); ++it) {
        if (sgn * f1 > sgn * f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = fn(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

void validate(const CavityGeometry& g) {
    if (!(g.air_gap_m > 0.0))
        throw std::invalid_argument("air_gap_m must be > 0");
    if (!(g.membrane_thickness_m >= 0.0))
        throw std::invalid_argument("membrane_thickness_m must be >= 0");
    if (!(g.refractive_index >= 1.0))
        throw std::invalid_argument("refractive_index must be >= 1");
    if (g.radius_of_curvature_m < 0.0)
        throw std::invalid_argument("radius_of_curvature_m must be >= 0");
    if (g.aperture_radius_m < 0.0)
        throw std::invalid_argument("aperture_radius_m must be >= 0");
}

double geometric_length(const CavityGeometry& g) {
    return g.air_gap_m + g.membrane_thickness_m / g.refractive_index;
}

double optical_length(const CavityGeometry& g) {
    return g.air_gap_m + g.refractive_index * g.membrane_thickness_m;
}

double resonance_approx(int m, const CavityGeometry& g) {
    validate(g);
    if (m < 1) throw std::invalid_argument("mode index m must be >= 1");
    const double la = g.air_gap_m;
    const double d = g.membrane_thickness_m;
    const double nd = g.refractive_index;
    if (d == 0.0) return kSpeedOfLight * m / (2.0 * la);  // bare ladder, exact
    const double p = la + nd * d;
    const double r = (nd - 1.0) / (nd + 1.0);
    const double theta = m * kPi * (la - nd * d) / p;
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;  // (-1)^m
    return kSpeedOfLight / (2.0 * kPi * p) *
           (kPi * m - sgn * std::asin(r * std::sin(theta)));
}

std::vector<std::pair<int, double>> resonance_exact(const CavityGeometry& g,
                                                    double nu_min_hz,
                                                    double nu_max_hz) {
    validate(g);
    if (!(nu_min_hz >= 0.0) || !(nu_max_hz > nu_min_hz))
        throw std::invalid_argument("bad frequency band");
    const double la = g.air_gap_m;
    const double d = g.membrane_thickness_m;
    const double nd = g.refractive_index;

    std::vector<std::pair<int, double>> out;
    if (d == 0.0) {
        int m = std::max(1, (int)std::floor(2.0 * la * nu_min_hz / kSpeedOfLight));
        for (;; ++m) {
            const double nu = kSpeedOfLight * m / (2.0 * la);
            if (nu > nu_max_hz) break;
            if (nu >= nu_min_hz) out.emplace_back(m, nu);
        }
        return out;
    }

    const double k_hi = 2.0 * kPi * nu_max_hz / kSpeedOfLight;
    // One extra pole of each family past the band so the last in-band root
    // still has a right bracket.
    const double k_stop = k_hi + kPi / la + kPi / (nd * d);

    // All tangent poles from k = 0 up to k_stop; the mode index of a root is
    // the number of poles (with multiplicity) below it.
    std::vector<double> poles;
    for (double len : {la, nd * d}) {
        for (int j = 0;; ++j) {
            const double p = (j + 0.5) * kPi / len;
            if (p > k_stop) break;
            poles.push_back(p);
        }
    }
    std::sort(poles.begin(), poles.end());

    // Merge coincident poles (air gap an exact multiple of the slab optical
    // thickness); a double pole is itself a root of the pole-free form.
    std::vector<std::pair<double, int>> merged;  // (k, multiplicity)
    for (double p : poles) {
        if (!merged.empty() && std::abs(p - merged.back().first) <= 1e-13 * p)
            merged.back().second += 1;
        else
            merged.emplace_back(p, 1);
    }

    int count = 0;  // poles passed so far, with multiplicity
    for (std::size_t i = 0; i < merged.size(); ++i) {
        const auto [p, mult] = merged[i];
        if (mult == 2) {
            const double nu = kSpeedOfLight * p / (2.0 * kPi);
            if (nu >= nu_min_hz && nu <= nu_max_hz) out.emplace_back(count + 1, nu);
            count += 2;
        } else {
            count += 1;
        }
        if (i + 1 == merged.size()) break;
        const double a = p, b = merged[i + 1].first;
        double eps = (b - a) * 1e-9;
        double fa = charfun(a + eps, la, d, nd);
        double fb = charfun(b - eps, la, d, nd);
        if (!(fa < 0.0 && fb > 0.0)) {
            eps = (b - a) * 1e-12;
            fa = charfun(a + eps, la, d, nd);
            fb = charfun(b - eps, la, d, nd);
        }
        if (!(fa < 0.0 && fb > 0.0)) continue;  // degenerate sliver, no root
        double lo = a + eps, hi = b - eps;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (charfun(mid, la, d, nd) < 0.0)
                lo = mid;
            else
                hi = mid;
            if (hi - lo <= 1e-15 * hi) break;
        }
        const double k = 0.5 * (lo + hi);
        const double nu = kSpeedOfLight * k / (2.0 * kPi);
        if (nu >= nu_min_hz && nu <= nu_max_hz) out.emplace_back(count, nu);
    }
    return out;
}

double frequency_slope(int m, const CavityGeometry& g) {
    validate(g);
    if (m < 1) throw std::invalid_argument("mode index m must be >= 1");
    const double la = g.air_gap_m;
    const double d = g.membrane_thickness_m;
    const double nd = g.refractive_index;
    if (d == 0.0) return kSpeedOfLight * m / (2.0 * la * la);  // = nu / L_a
    const double p = la + nd * d;
    const double r = (nd - 1.0) / (nd + 1.0);
    const double theta = m * kPi * (la - nd * d) / p;
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    const double nu = resonance_approx(m, g);
    // d theta / d L_a = 2 pi m n_d d / P^2; chain rule through asin.
    const double dtheta = 2.0 * kPi * m * nd * d / (p * p);
    const double s = r * std::sin(theta);
    const double dasin = r * std::cos(theta) / std::sqrt(1.0 - s * s) * dtheta;
    return nu / p + sgn * kSpeedOfLight / (2.0 * kPi * p) * dasin;
}

double air_character(int m, const CavityGeometry& g) {
    validate(g);
    if (m < 1) throw std::invalid_argument("mode index m must be >= 1");
    if (g.membrane_thickness_m == 0.0) return 1.0;  // bare cavity: air-like

    const double la = g.air_gap_m;
    const double nd = g.refractive_index;
    const double d = g.membrane_thickness_m;
    const double p = la + nd * d;
    // Spacing between adjacent slope extrema along the branch (max-to-min).
    const double period = p * p / (2.0 * m * nd * d);

    const double window = 1.6 * period;
    const double lo = la - window;
    const double hi = la + window;
    if (lo <= 0.0)
        throw std::runtime_error(
            "air_character: scan window leaves the physical range; "
            "no full steep-flat cycle around this operating point");

    auto slope_at = [&](double gap) {
        CavityGeometry gg = g;
        gg.air_gap_m = gap;
        return frequency_slope(m, gg);
    };

    constexpr int kGrid = 321;  // >= 201 per the sampling plan
    std::vector<double> xs(kGrid), ss(kGrid);
    for (int i = 0; i < kGrid; ++i) {
        xs[i] = lo + (hi - lo) * i / (kGrid - 1);
        ss[i] = slope_at(xs[i]);
    }

    // Interior extrema, refined by golden section on the bracketing cells.
    struct Extremum {
        double gap;
        double slope;
        bool is_max;
    };
    std::vector<Extremum> ext;
    for (int i = 1; i + 1 < kGrid; ++i) {
        const bool loc_max = ss[i] > ss[i - 1] && ss[i] >= ss[i + 1];
        const bool loc_min = ss[i] < ss[i - 1] && ss[i] <= ss[i + 1];
        if (!loc_max && !loc_min) continue;
        const double x = golden_section(slope_at, xs[i - 1], xs[i + 1], loc_max);
        ext.push_back({x, slope_at(x), loc_max});
    }
    if (ext.size() < 2)
        throw std::runtime_error(
            "air_character: no full steep-flat cycle found in the scan window");

    // Adjacent max/min pair whose gap interval covers the query point, or
    // the nearest pair otherwise (clamping handles overshoot).
    std::size_t pick = 0;
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
        if (ext[i].is_max == ext[i + 1].is_max) continue;  // spurious
        const double a = std::min(ext[i].gap, ext[i + 1].gap);
        const double b = std::max(ext[i].gap, ext[i + 1].gap);
        const double dist = (la < a) ? a - la : (la > b ? la - b : 0.0);
        if (dist < best) {
            best = dist;
            pick = i;
        }
    }
    const Extremum& e1 = ext[pick];
    const Extremum& e2 = ext[pick + 1];
    const Extremum& emax = e1.is_max ? e1 : e2;
    const Extremum& emin = e1.is_max ? e2 : e1;

    auto freq_at = [&](double gap) {
        CavityGeometry gg = g;
        gg.air_gap_m = gap;
        return resonance_approx(m, gg);
    };
    const double nu_max_slope = freq_at(emax.gap);
    const double nu_min_slope = freq_at(emin.gap);
    const double nu_q = resonance_approx(m, g);
    const double c =
        (nu_q - nu_min_slope) / (nu_max_slope - nu_min_slope);
    return std::clamp(c, 0.0, 1.0);
}

double fsr(const CavityGeometry& g) {
    validate(g);
    return kSpeedOfLight / (2.0 * optical_length(g));
}

GaussianMode beam_waist_and_mode_volume(const CavityGeometry& g, double nu_hz) {
    validate(g);
    if (!(nu_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
    if (!(g.radius_of_curvature_m > 0.0))
        throw std::invalid_argument("radius_of_curvature_m must be > 0");
    const double lg = geometric_length(g);
    const double rr = g.radius_of_curvature_m;
    if (!(lg > 0.0) || !(lg < rr))
        throw std::domain_error("unstable cavity: need 0 < L_g < R");
    const double lambda = kSpeedOfLight / nu_hz;
    GaussianMode mode;
    const double w0sq = (lambda / kPi) * std::sqrt(lg * (rr - lg));
    const double wmsq = (lambda / kPi) * rr * std::sqrt(lg / (rr - lg));
    mode.waist_m = std::sqrt(w0sq);
    mode.mirror_spot_m = std::sqrt(wmsq);
    mode.mode_volume_m3 = kPi / 4.0 * w0sq * optical_length(g);
    return mode;
}

std::vector<DispersionPoint> dispersion_curves(const CavityGeometry& g0,
                                               double la_min_m,
                                               double la_max_m,
                                               double la_step_m,
                                               int m_min,
                                               int m_max) {
    if (!(la_min_m > 0.0) || !(la_max_m >= la_min_m) || !(la_step_m > 0.0))
        throw std::invalid_argument("bad air-gap range");
    if (m_min < 1 || m_max < m_min)
        throw std::invalid_argument("bad mode-index range");
    std::vector<DispersionPoint> table;
    const int steps = (int)std::floor((la_max_m - la_min_m) / la_step_m + 0.5);
    for (int i = 0; i <= steps; ++i) {
        CavityGeometry g = g0;
        g.air_gap_m = la_min_m + i * la_step_m;
        if (g.air_gap_m > la_max_m * (1.0 + 1e-12)) break;
        for (int m = m_min; m <= m_max; ++m)
            table.push_back({g.air_gap_m, m, resonance_approx(m, g)});
    }
    return table;
}

double air_gap_for_order(int m, double membrane_thickness_m,
                         double refractive_index, double nu_ref_hz) {
    if (m < 1) throw std::invalid_argument("mode index m must be >= 1");
    if (!(nu_ref_hz > 0.0)) throw std::invalid_argument("frequency must be > 0");
    CavityGeometry g;
    g.membrane_thickness_m = membrane_thickness_m;
    g.refractive_index = refractive_index;
    const double lambda = kSpeedOfLight / nu_ref_hz;
    // nu(m, L_a) falls monotonically with L_a; bracket and bisect.
    double lo = 1e-12;
    double hi = (m + 1) * lambda / 2.0;
    g.air_gap_m = lo;
    if (resonance_approx(m, g) < nu_ref_hz)
        throw std::invalid_argument(
            "air_gap_for_order: order m unreachable at this frequency "
            "(membrane alone is too long)");
    g.air_gap_m = hi;
    if (resonance_approx(m, g) > nu_ref_hz)
        throw std::invalid_argument("air_gap_for_order: bracket failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        g.air_gap_m = mid;
        if (resonance_approx(m, g) > nu_ref_hz)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-16 * hi) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace cavity
