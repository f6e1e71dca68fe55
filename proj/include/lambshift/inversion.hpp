#ifndef LAMBSHIFT_INVERSION_HPP
#define LAMBSHIFT_INVERSION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "lambshift/errors.hpp"
#include "lambshift/imaging.hpp"
#include "lambshift/spectra.hpp"

namespace lambshift {

struct InversionResult {
    double h_est = 0.0;                       // nm
    double theta_est = 0.0;                   // degrees
    std::pair<double, double> lateral_est{0.0, 0.0};  // nm
    double residual = 0.0;                    // model-vs-observation misfit
    int iterations = 0;
    bool converged = false;
    bool flat_misfit_warning = false;
};

/// Forward map from (gap h, polar angle theta) to a scalar observable.
using ScalarForward = std::function<double(double h, double theta_deg)>;

namespace detail {

/// Bisects f(x) = target on [lo, hi] after verifying by sampling that f is
/// strictly monotone there. Never evaluates outside [lo, hi].
inline double monotone_bisect(const std::function<double(double)>& f, double target, double lo,
                              double hi, double x_tol, const char* what) {
    if (!(hi > lo)) throw domain_error(std::string(what) + ": bounds must satisfy lo < hi");
    constexpr int probe_count = 9;
    std::array<double, probe_count> probe{};
    for (int i = 0; i < probe_count; ++i) {
        probe[static_cast<std::size_t>(i)] =
            f(lo + (hi - lo) * static_cast<double>(i) / (probe_count - 1));
    }
    bool increasing = true, decreasing = true;
    for (int i = 1; i < probe_count; ++i) {
        if (!(probe[i] > probe[i - 1])) increasing = false;
        if (!(probe[i] < probe[i - 1])) decreasing = false;
    }
    if (!increasing && !decreasing) {
        throw non_monotone_error(std::string(what) + ": forward map is not monotone on the bounds");
    }
    const double f_lo = probe.front(), f_hi = probe.back();
    const double f_min = std::min(f_lo, f_hi), f_max = std::max(f_lo, f_hi);
    if (target < f_min || target > f_max) {
        throw out_of_range_error(std::string(what) + ": observation outside the attainable range");
    }
    double a = lo, b = hi;
    double fa = f_lo;
    while (b - a > x_tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        const bool left = increasing ? (target < fm) : (target > fm);
        if (left) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    (void)fa;
    return 0.5 * (a + b);
}

} // namespace detail

/// Recovers the gap from an observed dip frequency by bisection on the
/// monotone forward map; |error| < 1e-3 nm.
inline double invert_height(double omega_dip_obs, double theta_known_deg, double h_lo, double h_hi,
                            const ScalarForward& forward) {
    return detail::monotone_bisect([&](double h) { return forward(h, theta_known_deg); },
                                   omega_dip_obs, h_lo, h_hi, 1e-3, "invert_height");
}

/// Recovers the polar angle (degrees) from an observed dip frequency;
/// |error| < 0.1 degrees.
inline double invert_orientation(double omega_dip_obs, double h_known, double theta_lo_deg,
                                 double theta_hi_deg, const ScalarForward& forward) {
    return detail::monotone_bisect([&](double t) { return forward(h_known, t); }, omega_dip_obs,
                                   theta_lo_deg, theta_hi_deg, 0.1, "invert_orientation");
}

/// Model spectrum values, max-normalized, on the observed grid.
using SpectrumForward = std::function<std::vector<double>(double h, double theta_deg)>;

inline SpectrumForward make_spectrum_forward(const ForwardContext& ctx,
                                             std::vector<double> observed_grid, SpectrumKind kind) {
    return [ctx, grid = std::move(observed_grid), kind](double h, double theta_deg) {
        const double c = std::cos(units::deg_to_rad(theta_deg));
        const CouplingParams cp = ctx.coupling_at(ctx.probe_radius + h, c * c);
        std::vector<double> vals(grid.size());
        double peak = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            vals[i] = kind == SpectrumKind::emission
                          ? detail::emission_value(cp, grid[i])
                          : detail::scattering_value(cp, grid[i], ctx.lamb_shift);
            peak = std::max(peak, vals[i]);
        }
        for (double& v : vals) v /= peak;
        return vals;
    };
}

/// Full-lineshape fit of (h, theta) to an observed spectrum: mean-squared
/// misfit between max-normalized spectra, minimized by an 11 x 11 coarse
/// seed over the bounds followed by Nelder-Mead refinement with parameters
/// clamped to the bounds (solutions outside pin at the boundary).
inline InversionResult fit_spectrum(const Spectrum& observed, std::pair<double, double> h_bounds,
                                    std::pair<double, double> theta_bounds_deg,
                                    const SpectrumForward& forward, int max_iterations = 500,
                                    double improvement_tol = 1e-10) {
    observed.validate();
    if (!(h_bounds.second > h_bounds.first) || !(theta_bounds_deg.second > theta_bounds_deg.first)) {
        throw domain_error("fit_spectrum: bounds must satisfy lo < hi");
    }

    auto clamp = [](double v, std::pair<double, double> b) {
        return std::min(std::max(v, b.first), b.second);
    };
    auto misfit = [&](double h, double theta) {
        h = clamp(h, h_bounds);
        theta = clamp(theta, theta_bounds_deg);
        const std::vector<double> model = forward(h, theta);
        double acc = 0.0;
        for (std::size_t i = 0; i < model.size(); ++i) {
            const double r = model[i] - observed.values[i];
            acc += r * r;
        }
        return acc / static_cast<double>(model.size());
    };

    // coarse seeding
    constexpr int seed_n = 11;
    double best_h = h_bounds.first, best_t = theta_bounds_deg.first;
    double best_f = std::numeric_limits<double>::infinity();
    double worst_f = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < seed_n; ++i) {
        for (int j = 0; j < seed_n; ++j) {
            const double h = h_bounds.first +
                             (h_bounds.second - h_bounds.first) * static_cast<double>(i) / (seed_n - 1);
            const double t = theta_bounds_deg.first + (theta_bounds_deg.second - theta_bounds_deg.first) *
                                                          static_cast<double>(j) / (seed_n - 1);
            const double f = misfit(h, t);
            if (f < best_f) {
                best_f = f;
                best_h = h;
                best_t = t;
            }
            worst_f = std::max(worst_f, f);
        }
    }

    InversionResult result;
    result.flat_misfit_warning = (worst_f - best_f) < 1e-14;

    // Nelder-Mead on (h, theta)
    struct Vertex {
        double h, t, f;
    };
    const double dh = 0.05 * (h_bounds.second - h_bounds.first);
    const double dt = 0.05 * (theta_bounds_deg.second - theta_bounds_deg.first);
    std::array<Vertex, 3> simplex{
        Vertex{best_h, best_t, best_f},
        Vertex{clamp(best_h + dh, h_bounds), best_t, 0.0},
        Vertex{best_h, clamp(best_t + dt, theta_bounds_deg), 0.0}};
    if (simplex[1].h == simplex[0].h) simplex[1].h = clamp(best_h - dh, h_bounds);
    if (simplex[2].t == simplex[0].t) simplex[2].t = clamp(best_t - dt, theta_bounds_deg);
    simplex[1].f = misfit(simplex[1].h, simplex[1].t);
    simplex[2].f = misfit(simplex[2].h, simplex[2].t);

    int iter = 0;
    bool converged = false;
    for (; iter < max_iterations; ++iter) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        // converged once no vertex can improve on the best by the tolerance
        if (simplex[2].f - simplex[0].f < improvement_tol) {
            converged = true;
            break;
        }

        const double ch = 0.5 * (simplex[0].h + simplex[1].h);
        const double ct = 0.5 * (simplex[0].t + simplex[1].t);
        auto eval = [&](double h, double t) { return Vertex{h, t, misfit(h, t)}; };

        Vertex refl = eval(ch + (ch - simplex[2].h), ct + (ct - simplex[2].t));
        if (refl.f < simplex[0].f) {
            Vertex exp_v = eval(ch + 2.0 * (ch - simplex[2].h), ct + 2.0 * (ct - simplex[2].t));
            simplex[2] = exp_v.f < refl.f ? exp_v : refl;
        } else if (refl.f < simplex[1].f) {
            simplex[2] = refl;
        } else {
            const Vertex& base = refl.f < simplex[2].f ? refl : simplex[2];
            Vertex contr = eval(ch + 0.5 * (base.h - ch), ct + 0.5 * (base.t - ct));
            if (contr.f < std::min(refl.f, simplex[2].f)) {
                simplex[2] = contr;
            } else {
                // shrink toward the best vertex
                for (int k = 1; k < 3; ++k) {
                    simplex[k] = eval(simplex[0].h + 0.5 * (simplex[k].h - simplex[0].h),
                                      simplex[0].t + 0.5 * (simplex[k].t - simplex[0].t));
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

    result.h_est = clamp(simplex[0].h, h_bounds);
    result.theta_est = clamp(simplex[0].t, theta_bounds_deg);
    result.residual = simplex[0].f;
    result.iterations = iter;
    result.converged = converged;
    return result;
}

/// Lateral localization and spot-shape analysis of a scan map.
struct LateralResult {
    double x = 0.0;           // nm
    double y = 0.0;           // nm
    double azimuth_deg = 0.0; // major-axis direction, [-90, 90)
    double anisotropy = 1.0;  // sqrt(lambda_major / lambda_minor)
};

/// Locates the |shift| extremum (parabolic refinement over the 3x3
/// neighborhood) and reads the spot orientation off the second-moment tensor
/// of the |shift| distribution above half maximum.
inline LateralResult localize_lateral(const ScanMap& map) {
    const std::size_t nx = map.xs.size(), ny = map.ys.size();
    if (nx < 3 || ny < 3) throw domain_error("localize_lateral: map too small");

    auto value = [&](std::size_t ix, std::size_t iy) -> std::optional<double> {
        const auto& v = map.at(ix, iy);
        if (!v) return std::nullopt;
        return std::abs(*v);
    };

    // strict local maxima of |shift| over the 8-neighborhood
    std::vector<std::tuple<double, std::size_t, std::size_t>> maxima;
    for (std::size_t iy = 1; iy + 1 < ny; ++iy) {
        for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
            const auto center = value(ix, iy);
            if (!center) continue;
            bool is_max = true;
            for (int dy = -1; dy <= 1 && is_max; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    if (dx == 0 && dy == 0) continue;
                    const std::size_t jx = static_cast<std::size_t>(static_cast<long>(ix) + dx);
                    const std::size_t jy = static_cast<std::size_t>(static_cast<long>(iy) + dy);
                    const auto nb = value(jx, jy);
                    if (nb && *nb >= *center) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) maxima.emplace_back(*center, ix, iy);
        }
    }
    if (maxima.empty()) throw domain_error("localize_lateral: no interior extremum");
    std::sort(maxima.begin(), maxima.end(),
              [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    if (maxima.size() > 1 && std::get<0>(maxima[1]) >= 0.9 * std::get<0>(maxima[0])) {
        std::vector<std::pair<double, double>> candidates;
        for (const auto& m : maxima) {
            if (std::get<0>(m) >= 0.9 * std::get<0>(maxima[0])) {
                candidates.emplace_back(map.xs[std::get<1>(m)], map.ys[std::get<2>(m)]);
            }
        }
        throw ambiguity_error("localize_lateral: several comparable extrema", std::move(candidates));
    }

    const std::size_t px = std::get<1>(maxima[0]);
    const std::size_t py = std::get<2>(maxima[0]);
    const double peak_value = std::get<0>(maxima[0]);

    LateralResult out;
    out.x = map.xs[px];
    out.y = map.ys[py];
    const auto vxm = value(px - 1, py), vxc = value(px, py), vxp = value(px + 1, py);
    if (vxm && vxp) {
        // maxima of a parabola: same vertex formula on negated values
        if (auto v = numerics::parabola_vertex(map.xs[px - 1], -*vxm, map.xs[px], -*vxc,
                                               map.xs[px + 1], -*vxp)) {
            if (*v >= map.xs[px - 1] && *v <= map.xs[px + 1]) out.x = *v;
        }
    }
    const auto vym = value(px, py - 1), vyp = value(px, py + 1);
    if (vym && vyp) {
        if (auto v = numerics::parabola_vertex(map.ys[py - 1], -*vym, map.ys[py], -*vxc,
                                               map.ys[py + 1], -*vyp)) {
            if (*v >= map.ys[py - 1] && *v <= map.ys[py + 1]) out.y = *v;
        }
    }

    // second moments of the half-maximum level set, weighted by |shift|
    const double threshold = 0.5 * peak_value;
    double w_sum = 0.0, xc = 0.0, yc = 0.0;
    std::size_t cells = 0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const auto v = value(ix, iy);
            if (!v || *v < threshold) continue;
            w_sum += *v;
            xc += *v * map.xs[ix];
            yc += *v * map.ys[iy];
            ++cells;
        }
    }
    if (cells < 3) throw domain_error("localize_lateral: too few cells above half maximum");
    xc /= w_sum;
    yc /= w_sum;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const auto v = value(ix, iy);
            if (!v || *v < threshold) continue;
            const double dx = map.xs[ix] - xc, dy = map.ys[iy] - yc;
            sxx += *v * dx * dx;
            syy += *v * dy * dy;
            sxy += *v * dx * dy;
        }
    }
    sxx /= w_sum;
    syy /= w_sum;
    sxy /= w_sum;
    const double mean = 0.5 * (sxx + syy);
    const double disc = std::sqrt(0.25 * (sxx - syy) * (sxx - syy) + sxy * sxy);
    const double lambda_major = mean + disc;
    const double lambda_minor = std::max(mean - disc, 1e-300);
    out.anisotropy = std::sqrt(lambda_major / lambda_minor);
    out.azimuth_deg = units::rad_to_deg(0.5 * std::atan2(2.0 * sxy, sxx - syy));
    if (out.azimuth_deg >= 90.0) out.azimuth_deg -= 180.0;
    if (out.azimuth_deg < -90.0) out.azimuth_deg += 180.0;
    return out;
}

} // namespace lambshift

#endif
