#ifndef LAMBSHIFT_TESTS_SI_REFERENCE_HPP
#define LAMBSHIFT_TESTS_SI_REFERENCE_HPP

// Brute-force SI-unit evaluation of every reduced-unit formula in the
// library. Everything here is derived from raw CODATA constants (e, eps0,
// hbar, c) and the defining formulas; the only algebraic liberty taken is
// summing the multipole series via the (R/d)^(2n+1)/d^3 grouping, since
// naive powers of metre-scale lengths underflow a double. Inputs and outputs
// use eV / nm / debye so tests can compare directly against the library.

#include <cmath>
#include <complex>
#include <utility>

namespace si_reference {

constexpr double e_charge = 1.602176634e-19;        // C
constexpr double eps0 = 8.8541878128e-12;           // F/m
constexpr double hbar = 1.0545718176461565e-34;     // J s
constexpr double c_light = 299792458.0;             // m/s
constexpr double pi = 3.141592653589793;
constexpr double debye_si = 1e-21 / c_light;        // C m

inline double ev_to_rad_per_s(double ev) { return ev * e_charge / hbar; }
inline double rad_per_s_to_ev(double w) { return w * hbar / e_charge; }
inline double nm_to_m(double nm) { return nm * 1e-9; }

/// Drude permittivity evaluated with angular frequencies in rad/s.
inline std::complex<double> drude(double eps_inf, double omega_p_ev, double gamma_p_ev,
                                  double omega_ev) {
    const double w = ev_to_rad_per_s(omega_ev);
    const double wp = ev_to_rad_per_s(omega_p_ev);
    const double g = ev_to_rad_per_s(gamma_p_ev);
    return std::complex<double>(eps_inf, 0.0) - wp * wp / std::complex<double>(w * w, w * g);
}

/// Host wavenumber in 1/m.
inline double wavenumber(double omega_ev, double eps_b) {
    return ev_to_rad_per_s(omega_ev) * std::sqrt(eps_b) / c_light;
}

/// Reduced multipole polarizability alpha_n / R^(2n+1) (dimensionless).
inline std::complex<double> alpha_reduced(std::complex<double> eps_m, double eps_b, int n) {
    return static_cast<double>(n) * (eps_m - eps_b) /
           (static_cast<double>(n) * eps_m + static_cast<double>(n + 1) * eps_b);
}

/// (K_rr, K_tt) in 1/m^3 summed over n in [n_min, n_max], radiative
/// correction on the n = 1 term when requested.
inline std::pair<std::complex<double>, std::complex<double>> green_sums(
    double eps_inf, double omega_p_ev, double gamma_p_ev, double eps_b, double r_nm, double d_nm,
    double omega_ev, int n_min, int n_max, bool radiative) {
    const std::complex<double> eps_m = drude(eps_inf, omega_p_ev, gamma_p_ev, omega_ev);
    const double r_m = nm_to_m(r_nm);
    const double d_m = nm_to_m(d_nm);
    const double q = r_m / d_m;
    std::complex<double> k_rr(0.0, 0.0), k_tt(0.0, 0.0);
    for (int n = n_min; n <= n_max; ++n) {
        std::complex<double> a = alpha_reduced(eps_m, eps_b, n);
        if (n == 1 && radiative) {
            const double k = wavenumber(omega_ev, eps_b);
            const double kr = k * r_m;
            a /= 1.0 - std::complex<double>(0.0, 2.0 / 3.0 * kr * kr * kr) * a;
        }
        const double scale = std::pow(q, 2 * n + 1) / (d_m * d_m * d_m);
        k_rr += static_cast<double>((n + 1) * (n + 1)) * a * scale;
        k_tt += 0.5 * static_cast<double>(n) * static_cast<double>(n + 1) * a * scale;
    }
    return {k_rr, k_tt};
}

/// Lamb shift of the emitter from modes n_min..n_max, returned in eV:
/// Delta' = -(omega^2 / (hbar eps0 c^2)) mu_e . Re[G] . mu_e with
/// G = (c^2 / (4 pi omega^2 eps_b)) K.
inline double lamb_shift_ev(double eps_inf, double omega_p_ev, double gamma_p_ev, double eps_b,
                            double r_nm, double d_nm, double omega_ev, double mu_e_debye,
                            double cos2_theta, int n_min, int n_max) {
    const auto [k_rr, k_tt] = green_sums(eps_inf, omega_p_ev, gamma_p_ev, eps_b, r_nm, d_nm,
                                         omega_ev, n_min, n_max, false);
    const double w = ev_to_rad_per_s(omega_ev);
    const double mu = mu_e_debye * debye_si;
    const std::complex<double> green =
        (c_light * c_light / (4.0 * pi * w * w * eps_b)) *
        (cos2_theta * k_rr + (1.0 - cos2_theta) * k_tt);
    const double shift_rad_s = -(w * w / (hbar * eps0 * c_light * c_light)) * mu * mu * green.real();
    return rad_per_s_to_ev(shift_rad_s);
}

/// Extra decay rate gamma' in eV (same structure, 2x imaginary part).
inline double decay_ev(double eps_inf, double omega_p_ev, double gamma_p_ev, double eps_b,
                       double r_nm, double d_nm, double omega_ev, double mu_e_debye,
                       double cos2_theta, int n_min, int n_max) {
    const auto [k_rr, k_tt] = green_sums(eps_inf, omega_p_ev, gamma_p_ev, eps_b, r_nm, d_nm,
                                         omega_ev, n_min, n_max, false);
    const double w = ev_to_rad_per_s(omega_ev);
    const double mu = mu_e_debye * debye_si;
    const std::complex<double> green =
        (c_light * c_light / (4.0 * pi * w * w * eps_b)) *
        (cos2_theta * k_rr + (1.0 - cos2_theta) * k_tt);
    const double rate_rad_s =
        (2.0 * w * w / (hbar * eps0 * c_light * c_light)) * mu * mu * green.imag();
    return rad_per_s_to_ev(rate_rad_s);
}

/// Effective dipole-mode moment |mu_d| = eps_b sqrt(12 pi eps0 hbar eta1 R^3)
/// in debye; eta1 from a centered difference of Re eps over +-1e-4 eV.
inline double mu_d_debye(double eps_inf, double omega_p_ev, double gamma_p_ev, double eps_b,
                         double r_nm, double omega_d_ev) {
    const double h_ev = 1e-4;
    const double re_plus = drude(eps_inf, omega_p_ev, gamma_p_ev, omega_d_ev + h_ev).real();
    const double re_minus = drude(eps_inf, omega_p_ev, gamma_p_ev, omega_d_ev - h_ev).real();
    const double slope = (re_plus - re_minus) / (2.0 * ev_to_rad_per_s(h_ev));  // per rad/s
    const double eta1 = 1.0 / slope;                                            // rad/s
    const double r_m = nm_to_m(r_nm);
    const double mu = eps_b * std::sqrt(12.0 * pi * eps0 * hbar * eta1 * r_m * r_m * r_m);
    return mu / debye_si;
}

/// Near-field coupling g = omega_d^2 mu0 mu_e G0 mu_d / hbar with
/// G0 = (-I + 3 e_r e_r) / (4 pi k^2 r^3), contracted to the
/// sqrt(1 + 3 cos^2 theta) channel; returned in eV.
inline double coupling_ev(double mu_e_debye, double mu_d_debye_v, double eps_b, double d_nm,
                          double cos2_theta, double omega_d_ev) {
    const double mu0 = 1.0 / (eps0 * c_light * c_light);
    const double w = ev_to_rad_per_s(omega_d_ev);
    const double k = wavenumber(omega_d_ev, eps_b);
    const double r = nm_to_m(d_nm);
    const double mu_e = mu_e_debye * debye_si;
    const double mu_d = mu_d_debye_v * debye_si;
    const double g0 = std::sqrt(1.0 + 3.0 * cos2_theta) / (4.0 * pi * k * k * r * r * r);
    const double g_rad_s = w * w * mu0 * mu_e * g0 * mu_d / hbar;
    return rad_per_s_to_ev(g_rad_s);
}

} // namespace si_reference

#endif
