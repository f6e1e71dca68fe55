#ifndef LAMBSHIFT_UNITS_HPP
#define LAMBSHIFT_UNITS_HPP

#include <cmath>

// Unit convention used throughout: energies, frequencies and linewidths in
// eV (hbar == 1, "frequency" means hbar*omega), lengths in nm, dipole
// moments in e*nm. Everything below is derived from CODATA 2018 values of
// e, eps0, hbar and c.

namespace lambshift::units {

/// Coulomb constant e^2/(4 pi eps0), eV*nm.
inline constexpr double k_coulomb = 1.4399645478425671;

/// hbar*c, eV*nm.
inline constexpr double hbar_c = 197.32698045930249;

/// One debye in e*nm.
inline constexpr double debye = 0.020819433270935595;

inline constexpr double pi = 3.141592653589793;

/// Wavenumber in the host medium, nm^-1.
inline double host_wavenumber(double omega_ev, double eps_b) {
    return omega_ev * std::sqrt(eps_b) / hbar_c;
}

inline double debye_to_enm(double mu_debye) { return mu_debye * debye; }
inline double enm_to_debye(double mu_enm) { return mu_enm / debye; }

inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

} // namespace lambshift::units

#endif
