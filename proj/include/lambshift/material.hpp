#ifndef LAMBSHIFT_MATERIAL_HPP
#define LAMBSHIFT_MATERIAL_HPP

#include <cmath>
#include <complex>
#include <vector>

#include "lambshift/errors.hpp"
#include "lambshift/numerics.hpp"
#include "lambshift/units.hpp"

namespace lambshift {

/// Drude metal: eps(omega) = eps_inf - omega_p^2 / (omega^2 + i omega gamma_p).
struct DrudeMaterial {
    double eps_inf = 6.0;
    double omega_p = 7.9;    // eV
    double gamma_p = 0.051;  // eV

    void validate() const {
        if (!(omega_p > 0.0)) throw domain_error("material: omega_p must be > 0");
        if (!(gamma_p >= 0.0)) throw domain_error("material: gamma_p must be >= 0");
    }

    static DrudeMaterial silver() { return DrudeMaterial{6.0, 7.9, 0.051}; }
};

/// Non-absorbing host medium.
struct HostMedium {
    double eps_b = 1.0;

    void validate() const {
        if (!(eps_b >= 1.0)) throw domain_error("host: eps_b must be >= 1");
    }
};

/// Corrections applied to the n = 1 polarizability. Radiative reaction is
/// physical and on by default; the dynamic-depolarization (finite size) term
/// red-shifts the dipole resonance with growing R and is off by default.
struct PolarizabilityOptions {
    bool radiative_correction = true;
    bool finite_size = false;
};

/// Effective dipole-mode parameters of the sphere.
struct DipoleModeParams {
    double omega_d = 0.0;  // eV
    double gamma_d = 0.0;  // eV, FWHM of Im alpha_1
    double mu_d = 0.0;     // e*nm
    double eta1 = 0.0;     // eV, [d Re eps / d omega]^-1 at omega_d

    void validate() const {
        if (!(gamma_d > 0.0)) throw domain_error("dipole mode: gamma_d must be > 0");
        if (!(mu_d > 0.0)) throw domain_error("dipole mode: mu_d must be > 0");
    }
};

inline std::complex<double> drude_permittivity(const DrudeMaterial& mat, double omega) {
    mat.validate();
    if (!(omega > 0.0)) throw domain_error("drude_permittivity: omega must be > 0");
    const std::complex<double> denom(omega * omega, omega * mat.gamma_p);
    return std::complex<double>(mat.eps_inf, 0.0) - mat.omega_p * mat.omega_p / denom;
}

namespace detail {

/// alpha_n / R^(2n+1) = n (eps_m - eps_b) / (n eps_m + (n+1) eps_b).
inline std::complex<double> reduced_polarizability(std::complex<double> eps_m, double eps_b, int n) {
    const std::complex<double> den =
        static_cast<double>(n) * eps_m + static_cast<double>(n + 1) * eps_b;
    if (den == std::complex<double>(0.0, 0.0)) {
        throw singular_error("multipole_polarizability: response pole hit exactly (lossless resonance)");
    }
    return static_cast<double>(n) * (eps_m - eps_b) / den;
}

/// Applies the n = 1 corrections to the reduced polarizability.
/// alpha_eff = alpha / (1 - (k^2/R) alpha - i (2 k^3 / 3) alpha), with the
/// finite-size term included only when requested.
inline std::complex<double> corrected_reduced_alpha1(std::complex<double> alpha1_red, double R,
                                                     double k, const PolarizabilityOptions& opts) {
    if (!opts.radiative_correction && !opts.finite_size) return alpha1_red;
    const double kr = k * R;
    std::complex<double> den(1.0, 0.0);
    if (opts.finite_size) den -= kr * kr * alpha1_red;
    if (opts.radiative_correction) den -= std::complex<double>(0.0, 2.0 / 3.0 * kr * kr * kr) * alpha1_red;
    if (den == std::complex<double>(0.0, 0.0)) {
        throw singular_error("multipole_polarizability: corrected response pole hit exactly");
    }
    return alpha1_red / den;
}

} // namespace detail

/// Quasi-static multipole polarizability of the sphere, nm^(2n+1).
/// The radiative (and optional finite-size) correction acts on n = 1 only;
/// for n >= 2 the flags are a no-op.
inline std::complex<double> multipole_polarizability(const DrudeMaterial& mat, const HostMedium& host,
                                                     double R, int n, double omega,
                                                     const PolarizabilityOptions& opts = {}) {
    host.validate();
    if (n < 1) throw domain_error("multipole_polarizability: mode index n must be >= 1");
    if (!(R > 0.0)) throw domain_error("multipole_polarizability: R must be > 0");
    if (!(omega > 0.0)) throw domain_error("multipole_polarizability: omega must be > 0");

    const std::complex<double> eps_m = drude_permittivity(mat, omega);
    std::complex<double> alpha_red = detail::reduced_polarizability(eps_m, host.eps_b, n);
    if (n == 1) {
        const double k = units::host_wavenumber(omega, host.eps_b);
        alpha_red = detail::corrected_reduced_alpha1(alpha_red, R, k, opts);
    }
    const std::complex<double> alpha = alpha_red * std::pow(R, 2 * n + 1);
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
        throw singular_error("multipole_polarizability: non-finite value (response pole)");
    }
    return alpha;
}

inline std::complex<double> multipole_polarizability(const DrudeMaterial& mat, const HostMedium& host,
                                                     double R, int n, double omega,
                                                     bool radiative_correction) {
    return multipole_polarizability(mat, host, R, n, omega,
                                    PolarizabilityOptions{radiative_correction, false});
}

/// Extracts (omega_d, gamma_d, eta1, mu_d) from the n = 1 response:
/// omega_d is the peak of Im alpha_1 located on a 0.1 meV grid over
/// [0.3 omega_p, omega_p] and refined parabolically, gamma_d its FWHM,
/// eta1 the inverse slope of Re eps at omega_d (centered difference,
/// step 1e-4 eV), and mu_d = eps_b sqrt(3 eta1 R^3 / k_coulomb) in e*nm.
inline DipoleModeParams dipole_mode_params(const DrudeMaterial& mat, const HostMedium& host, double R,
                                           const PolarizabilityOptions& opts = {}) {
    mat.validate();
    host.validate();
    if (!(R > 0.0)) throw domain_error("dipole_mode_params: R must be > 0");

    const double w_lo = 0.3 * mat.omega_p;
    const double w_hi = mat.omega_p;
    const double dw = 1e-4;
    const std::size_t count = static_cast<std::size_t>((w_hi - w_lo) / dw) + 1;

    std::vector<double> im_alpha(count);
    auto im_at = [&](std::size_t i) { return im_alpha[i]; };
    for (std::size_t i = 0; i < count; ++i) {
        const double w = w_lo + static_cast<double>(i) * dw;
        im_alpha[i] = multipole_polarizability(mat, host, R, 1, w, opts).imag();
    }

    std::size_t peak = 0;
    for (std::size_t i = 1; i < count; ++i) {
        if (im_alpha[i] > im_alpha[peak]) peak = i;
    }
    if (peak == 0 || peak + 1 >= count) {
        throw domain_error("dipole_mode_params: no dipole resonance inside [0.3 omega_p, omega_p]");
    }

    const double wp = w_lo + static_cast<double>(peak) * dw;
    double omega_d = wp;
    if (auto v = numerics::parabola_vertex(wp - dw, im_at(peak - 1), wp, im_at(peak), wp + dw,
                                           im_at(peak + 1))) {
        omega_d = *v;
    }

    // FWHM via linear interpolation of the half-maximum crossings.
    const double half = 0.5 * im_alpha[peak];
    double w_left = 0.0, w_right = 0.0;
    bool found_left = false, found_right = false;
    for (std::size_t i = peak; i-- > 0;) {
        if (im_alpha[i] <= half) {
            const double f = (half - im_alpha[i]) / (im_alpha[i + 1] - im_alpha[i]);
            w_left = w_lo + (static_cast<double>(i) + f) * dw;
            found_left = true;
            break;
        }
    }
    for (std::size_t i = peak + 1; i < count; ++i) {
        if (im_alpha[i] <= half) {
            const double f = (im_alpha[i - 1] - half) / (im_alpha[i - 1] - im_alpha[i]);
            w_right = w_lo + (static_cast<double>(i - 1) + f) * dw;
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right) {
        throw domain_error("dipole_mode_params: resonance line not contained in the search window");
    }

    DipoleModeParams out;
    out.omega_d = omega_d;
    out.gamma_d = w_right - w_left;

    const double h = 1e-4;
    const double re_plus = drude_permittivity(mat, omega_d + h).real();
    const double re_minus = drude_permittivity(mat, omega_d - h).real();
    const double slope = (re_plus - re_minus) / (2.0 * h);
    if (!(slope > 0.0)) throw domain_error("dipole_mode_params: non-positive permittivity slope");
    out.eta1 = 1.0 / slope;
    out.mu_d = host.eps_b * std::sqrt(3.0 * out.eta1 * R * R * R / units::k_coulomb);
    out.validate();
    return out;
}

} // namespace lambshift

#endif
