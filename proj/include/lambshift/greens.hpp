#ifndef LAMBSHIFT_GREENS_HPP
#define LAMBSHIFT_GREENS_HPP

#include <cmath>
#include <complex>
#include <string>

#include "lambshift/errors.hpp"
#include "lambshift/material.hpp"
#include "lambshift/units.hpp"

namespace lambshift {

/// Multipole summation window. n_max < 0 selects adaptive truncation, which
/// stops once the geometric tail bound drops below rel_tol of the partial sum.
struct ModeRange {
    int n_min = 1;
    int n_max = -1;  // adaptive
    double rel_tol = 1e-8;

    static constexpr int hard_cap = 5000;

    bool adaptive() const { return n_max < 0; }

    void validate() const {
        if (n_min < 1) throw domain_error("mode range: n_min must be >= 1");
        if (!adaptive() && n_max < n_min) throw domain_error("mode range: n_max must be >= n_min");
        if (!(rel_tol > 0.0)) throw domain_error("mode range: rel_tol must be > 0");
    }

    static ModeRange hom() { return ModeRange{2, -1, 1e-8}; }
    static ModeRange single(int n) { return ModeRange{n, n, 1e-8}; }
};

/// Reduced scattered Green sums at the emitter position, nm^-3:
///   K_rr = sum_n (n+1)^2      alpha_n / d^(2n+4)
///   K_tt = sum_n n(n+1)/2     alpha_n / d^(2n+4)
/// The physical Green component is e.G^S.e = K / (4 pi k^2), so Im K >= 0
/// for a passive sphere.
struct ReducedGreenSum {
    std::complex<double> k_radial{0.0, 0.0};
    std::complex<double> k_tangential{0.0, 0.0};
    int n_used = 0;
    double tail_bound = 0.0;

    std::complex<double> project(double cos2_theta) const {
        return cos2_theta * k_radial + (1.0 - cos2_theta) * k_tangential;
    }
};

enum class Orientation { radial, tangential };

namespace detail {

/// Index of the highest resonant multipole at this frequency: the real part
/// of n eps_m + (n+1) eps_b crosses zero at n = -eps_b / (Re eps_m + eps_b).
inline int resonant_mode_index(std::complex<double> eps_m, double eps_b) {
    const double s = eps_m.real() + eps_b;
    if (s >= 0.0) return 0;
    const double n_res = -eps_b / s;
    if (n_res > static_cast<double>(ModeRange::hard_cap)) return ModeRange::hard_cap;
    return static_cast<int>(std::ceil(n_res));
}

} // namespace detail

/// Sums the multipole series for the reduced Green components at separation
/// d from the sphere center. Corrections (radiative by default) act on the
/// n = 1 term only.
inline ReducedGreenSum reduced_green_sum(const DrudeMaterial& mat, const HostMedium& host, double R,
                                         double d, double omega, const ModeRange& range = {},
                                         const PolarizabilityOptions& opts = {}) {
    mat.validate();
    host.validate();
    range.validate();
    if (!(R > 0.0)) throw domain_error("reduced_green_sum: R must be > 0");
    if (!(omega > 0.0)) throw domain_error("reduced_green_sum: omega must be > 0");
    if (!(d > R)) throw geometry_error("reduced_green_sum: emitter must lie outside the sphere (d > R)");

    const std::complex<double> eps_m = drude_permittivity(mat, omega);
    const double q = R / d;          // < 1
    const double q2 = q * q;
    const double inv_d3 = 1.0 / (d * d * d);
    const double k = units::host_wavenumber(omega, host.eps_b);

    // alpha_n / d^(2n+4) = alpha_red_n * q^(2n+1) / d^3; accumulating the
    // power incrementally keeps every intermediate in range for any n.
    double q_pow = std::pow(q, 2 * range.n_min + 1);

    // Terms can revive near the resonant index n_res where Re[n eps + (n+1)]
    // crosses zero, enhanced by at most ~1/Im eps over the smooth trend. The
    // tail bound below adds that revival, damped by the geometric envelope.
    const int n_res = detail::resonant_mode_index(eps_m, host.eps_b);
    const double boost = 1.0 + 1.0 / std::max(eps_m.imag(), 1e-6);
    const int n_floor = range.n_min + 4;

    ReducedGreenSum sum;
    std::complex<double> prev_term_rr{0.0, 0.0};
    double bound_rr = 0.0, bound_tt = 0.0;

    for (int n = range.n_min;; ++n) {
        if (!range.adaptive() && n > range.n_max) break;
        if (n > ModeRange::hard_cap) {
            throw truncation_error(
                "reduced_green_sum: series not converged by n=" + std::to_string(ModeRange::hard_cap) +
                    " (R=" + std::to_string(R) + " nm, d=" + std::to_string(d) + " nm, omega=" +
                    std::to_string(omega) + " eV)",
                ModeRange::hard_cap, bound_rr);
        }

        std::complex<double> alpha_red = detail::reduced_polarizability(eps_m, host.eps_b, n);
        if (n == 1) alpha_red = detail::corrected_reduced_alpha1(alpha_red, R, k, opts);

        const std::complex<double> base = alpha_red * (q_pow * inv_d3);
        const double np1 = static_cast<double>(n + 1);
        const std::complex<double> term_rr = np1 * np1 * base;
        const std::complex<double> term_tt = 0.5 * static_cast<double>(n) * np1 * base;

        sum.k_radial += term_rr;
        sum.k_tangential += term_tt;
        sum.n_used = n;
        q_pow *= q2;

        const double mag = std::abs(term_rr);
        const double prev_mag = std::abs(prev_term_rr);
        if (range.adaptive() && n >= n_floor && mag == 0.0 && prev_mag == 0.0) {
            break;  // index-matched sphere: the whole series vanishes
        }
        if (prev_mag > 0.0) {
            const double ratio = mag / prev_mag;
            if (ratio < 1.0) {
                double geo = ratio / (1.0 - ratio);
                if (n < n_res) {
                    // possible revival at n_res, a few modes wide
                    geo += 5.0 * boost * std::pow(q2, static_cast<double>(n_res - n));
                }
                bound_rr = mag * geo;
                bound_tt = std::abs(term_tt) * geo;
                if (range.adaptive() && n >= n_floor &&
                    bound_rr <= range.rel_tol * std::abs(sum.k_radial) &&
                    bound_tt <= range.rel_tol * std::abs(sum.k_tangential)) {
                    break;
                }
            }
        }
        prev_term_rr = term_rr;
    }

    const double abs_rr = std::abs(sum.k_radial);
    const double abs_tt = std::abs(sum.k_tangential);
    sum.tail_bound = std::max(abs_rr > 0.0 ? bound_rr / abs_rr : 0.0,
                              abs_tt > 0.0 ? bound_tt / abs_tt : 0.0);
    return sum;
}

/// Normalized spectral density of mode n: J_n = Im[e.G_n^S.e] / (k/6pi),
/// i.e. J = (3 / 2 k^3) Im K_n with the orientation weight.
inline double spectral_density(const DrudeMaterial& mat, const HostMedium& host, double R, double d,
                               double omega, int n, Orientation orientation,
                               const PolarizabilityOptions& opts = {}) {
    const ReducedGreenSum g = reduced_green_sum(mat, host, R, d, omega, ModeRange::single(n), opts);
    const double k = units::host_wavenumber(omega, host.eps_b);
    const std::complex<double> kk =
        orientation == Orientation::radial ? g.k_radial : g.k_tangential;
    return 1.5 / (k * k * k) * kk.imag();
}

/// Spectral density summed over n in `range` (adaptive by default).
inline double spectral_density_sum(const DrudeMaterial& mat, const HostMedium& host, double R,
                                   double d, double omega, const ModeRange& range,
                                   Orientation orientation, const PolarizabilityOptions& opts = {}) {
    const ReducedGreenSum g = reduced_green_sum(mat, host, R, d, omega, range, opts);
    const double k = units::host_wavenumber(omega, host.eps_b);
    const std::complex<double> kk =
        orientation == Orientation::radial ? g.k_radial : g.k_tangential;
    return 1.5 / (k * k * k) * kk.imag();
}

} // namespace lambshift

#endif
