#ifndef LAMBSHIFT_QED_HPP
#define LAMBSHIFT_QED_HPP

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "lambshift/errors.hpp"
#include "lambshift/greens.hpp"
#include "lambshift/material.hpp"
#include "lambshift/units.hpp"

namespace lambshift {

/// Quantum emitter: transition energy, total linewidth, dipole moment and
/// orientation. gamma_e is the full linewidth (radiative plus nonradiative).
struct EmitterParams {
    double mu_e = 24.0 * units::debye;  // e*nm
    double omega_e = 2.785;             // eV
    double gamma_e = 0.015;             // eV
    std::array<double, 3> orientation{0.0, 0.0, 1.0};

    void validate() const {
        if (!(mu_e > 0.0)) throw domain_error("emitter: mu_e must be > 0");
        if (!(omega_e > 0.0)) throw domain_error("emitter: omega_e must be > 0");
        if (!(gamma_e >= 0.0)) throw domain_error("emitter: gamma_e must be >= 0");
        const double norm2 = orientation[0] * orientation[0] + orientation[1] * orientation[1] +
                             orientation[2] * orientation[2];
        if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12) {
            throw domain_error("emitter: orientation must be a unit vector");
        }
    }
};

/// Reduced probe geometry: sphere radius, center separation d, and the
/// squared cosine of the angle between the emitter dipole and the axis.
struct ProbeGeometry {
    double radius = 10.0;     // nm
    double distance = 12.0;   // nm, emitter to sphere center
    double cos2_theta = 1.0;

    void validate() const {
        if (!(radius > 0.0)) throw domain_error("geometry: radius must be > 0");
        if (!(distance > radius)) throw geometry_error("geometry: emitter must be outside the sphere");
        if (!(cos2_theta >= 0.0 && cos2_theta <= 1.0)) {
            throw domain_error("geometry: cos2_theta must lie in [0, 1]");
        }
    }

    double gap() const { return distance - radius; }
};

/// Derived coupled-system parameters: emitter-dipole coupling and the two
/// complex effective frequencies, plus the higher-order-mode shift and decay
/// they were assembled from.
struct CouplingParams {
    double g_de = 0.0;                          // eV
    std::complex<double> omega_e_eff{0.0, 0.0}; // eV
    std::complex<double> omega_d_eff{0.0, 0.0}; // eV
    double delta_hom = 0.0;                     // eV, Delta'_e
    double gamma_hom = 0.0;                     // eV, gamma'_e

    void validate() const {
        if (omega_e_eff.imag() > 0.0) throw domain_error("coupling: Im omega_e_eff must be <= 0");
        if (omega_d_eff.imag() > 0.0) throw domain_error("coupling: Im omega_d_eff must be <= 0");
        if (!(gamma_hom >= 0.0)) throw domain_error("coupling: gamma_hom must be >= 0");
    }
};

namespace detail {

/// Complex higher-order-mode self-energy -mu_e^2 k_coulomb K / eps_b with
/// K = cos2 K_rr + sin2 K_tt summed over n >= n_min. Its real part is the
/// Lamb shift, -2x its imaginary part the extra decay.
inline std::complex<double> hom_self_energy(const DrudeMaterial& mat, const HostMedium& host,
                                            const ProbeGeometry& geom, const EmitterParams& emitter,
                                            double omega, const ModeRange& range,
                                            const PolarizabilityOptions& opts) {
    geom.validate();
    emitter.validate();
    const ReducedGreenSum g =
        reduced_green_sum(mat, host, geom.radius, geom.distance, omega, range, opts);
    const double scale = emitter.mu_e * emitter.mu_e * units::k_coulomb / host.eps_b;
    return -scale * g.project(geom.cos2_theta);
}

} // namespace detail

/// Lamb shift induced by the dark modes (n >= 2 by default), eV.
/// Delta'_e = -(mu_e^2 k_coulomb / eps_b) [cos2 Re K_rr + sin2 Re K_tt].
inline double hom_lamb_shift(const DrudeMaterial& mat, const HostMedium& host,
                             const ProbeGeometry& geom, const EmitterParams& emitter, double omega,
                             const ModeRange& range = ModeRange::hom(),
                             const PolarizabilityOptions& opts = {}) {
    return detail::hom_self_energy(mat, host, geom, emitter, omega, range, opts).real();
}

/// Decay-rate enhancement by the dark modes, eV.
/// gamma'_e = 2 (mu_e^2 k_coulomb / eps_b) [cos2 Im K_rr + sin2 Im K_tt] >= 0.
inline double hom_decay(const DrudeMaterial& mat, const HostMedium& host, const ProbeGeometry& geom,
                        const EmitterParams& emitter, double omega,
                        const ModeRange& range = ModeRange::hom(),
                        const PolarizabilityOptions& opts = {}) {
    return -2.0 * detail::hom_self_energy(mat, host, geom, emitter, omega, range, opts).imag();
}

/// Near-field emitter / dipole-mode coupling, eV:
/// g = k_coulomb mu_d mu_e sqrt(1 + 3 cos2) / (eps_b d^3).
inline double coupling_gde(const HostMedium& host, const ProbeGeometry& geom,
                           const EmitterParams& emitter, const DipoleModeParams& dipole) {
    host.validate();
    geom.validate();
    emitter.validate();
    const double d = geom.distance;
    return units::k_coulomb * dipole.mu_d * emitter.mu_e *
           std::sqrt(1.0 + 3.0 * geom.cos2_theta) / (host.eps_b * d * d * d);
}

/// Assembles the coupled-system parameters. The self-energy is evaluated at
/// omega = omega_e (pole approximation); `self_consistent` runs one
/// fixed-point pass omega -> omega_e + Delta'_e(omega) instead.
inline CouplingParams effective_frequencies(const DrudeMaterial& mat, const HostMedium& host,
                                            const ProbeGeometry& geom, const EmitterParams& emitter,
                                            const DipoleModeParams& dipole,
                                            bool self_consistent = false,
                                            const ModeRange& range = ModeRange::hom(),
                                            const PolarizabilityOptions& opts = {}) {
    std::complex<double> sigma =
        detail::hom_self_energy(mat, host, geom, emitter, emitter.omega_e, range, opts);
    if (self_consistent) {
        const double omega_shifted = emitter.omega_e + sigma.real();
        if (omega_shifted > 0.0) {
            sigma = detail::hom_self_energy(mat, host, geom, emitter, omega_shifted, range, opts);
        }
    }
    CouplingParams cp;
    cp.delta_hom = sigma.real();
    cp.gamma_hom = -2.0 * sigma.imag();
    cp.g_de = coupling_gde(host, geom, emitter, dipole);
    cp.omega_e_eff = std::complex<double>(emitter.omega_e + cp.delta_hom,
                                          -0.5 * (emitter.gamma_e + cp.gamma_hom));
    cp.omega_d_eff = std::complex<double>(dipole.omega_d, -0.5 * dipole.gamma_d);
    cp.validate();
    return cp;
}

/// Total Lamb shift and decay rate at the given frequency:
/// shift = Delta'_e(omega) + Re[g^2 / (omega - omega'_d)],
/// rate  = gamma_e + gamma'_e(omega) - 2 Im[g^2 / (omega - omega'_d)].
inline std::pair<double, double> total_shift_and_rate(const DrudeMaterial& mat,
                                                      const HostMedium& host,
                                                      const ProbeGeometry& geom,
                                                      const EmitterParams& emitter,
                                                      const DipoleModeParams& dipole, double omega,
                                                      const ModeRange& range = ModeRange::hom(),
                                                      const PolarizabilityOptions& opts = {}) {
    const std::complex<double> sigma =
        detail::hom_self_energy(mat, host, geom, emitter, omega, range, opts);
    const double g = coupling_gde(host, geom, emitter, dipole);
    const std::complex<double> omega_d_eff(dipole.omega_d, -0.5 * dipole.gamma_d);
    const std::complex<double> dip_term = g * g / (omega - omega_d_eff);
    const double shift = sigma.real() + dip_term.real();
    const double rate = emitter.gamma_e - 2.0 * sigma.imag() - 2.0 * dip_term.imag();
    return {shift, rate};
}

/// Diagnostic pair of curves comparing the pseudo-mode dipole term
/// g^2 / (omega - omega'_d) against the n = 1 Green self-energy
/// -mu_e^2 k_coulomb K^(n=1) / eps_b on a frequency grid.
struct DipoleTermCurves {
    std::vector<double> omegas;
    std::vector<std::complex<double>> pseudo_mode;
    std::vector<std::complex<double>> green_n1;
};

inline DipoleTermCurves dipole_term_equivalence(const DrudeMaterial& mat, const HostMedium& host,
                                                const ProbeGeometry& geom,
                                                const EmitterParams& emitter,
                                                const DipoleModeParams& dipole,
                                                const std::vector<double>& omegas,
                                                const PolarizabilityOptions& opts = {}) {
    const double g = coupling_gde(host, geom, emitter, dipole);
    const std::complex<double> omega_d_eff(dipole.omega_d, -0.5 * dipole.gamma_d);
    DipoleTermCurves out;
    out.omegas = omegas;
    out.pseudo_mode.reserve(omegas.size());
    out.green_n1.reserve(omegas.size());
    for (double w : omegas) {
        out.pseudo_mode.push_back(g * g / (w - omega_d_eff));
        out.green_n1.push_back(
            detail::hom_self_energy(mat, host, geom, emitter, w, ModeRange::single(1), opts));
    }
    return out;
}

} // namespace lambshift

#endif
