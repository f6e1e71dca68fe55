#ifndef LAMBSHIFT_SPECTRA_HPP
#define LAMBSHIFT_SPECTRA_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "lambshift/errors.hpp"
#include "lambshift/numerics.hpp"
#include "lambshift/qed.hpp"

namespace lambshift {

enum class SpectrumKind { emission, scattering };

/// Sampled spectrum, max-normalized to 1.
struct Spectrum {
    std::vector<double> omegas;
    std::vector<double> values;
    SpectrumKind kind = SpectrumKind::scattering;
    std::uint64_t params_fingerprint = 0;
    double norm_constant = 1.0;       // raw peak value before normalization
    bool coarse_grid_warning = false; // step too coarse for the emitter line

    void validate() const {
        if (omegas.size() != values.size() || omegas.size() < 3) {
            throw domain_error("spectrum: grid and values must match and hold >= 3 points");
        }
        for (std::size_t i = 1; i < omegas.size(); ++i) {
            if (!(omegas[i] > omegas[i - 1])) {
                throw domain_error("spectrum: frequency grid must be strictly increasing");
            }
        }
        for (double v : values) {
            if (!(v >= 0.0)) throw domain_error("spectrum: values must be non-negative");
        }
    }
};

/// Interference-dip location and contrast.
struct DipResult {
    double omega_dip = 0.0;  // eV
    double depth = 0.0;      // min(bracketing maxima) - dip value, normalized units
    bool refined = false;
};

/// Two-channel decomposition of the scattering response.
struct EigenDecomposition {
    std::complex<double> omega_plus{0.0, 0.0};
    std::complex<double> omega_minus{0.0, 0.0};
    std::complex<double> f_plus{0.0, 0.0};
    std::complex<double> f_minus{0.0, 0.0};
};

namespace detail {

inline std::complex<double> emitter_pole(const CouplingParams& cp, bool lamb_shift_enabled) {
    // Disabling the Lamb shift removes Delta'_e from the effective emitter
    // frequency; the linewidth terms stay.
    return lamb_shift_enabled ? cp.omega_e_eff : cp.omega_e_eff - cp.delta_hom;
}

inline double emission_value(const CouplingParams& cp, double omega) {
    const std::complex<double> denom =
        omega - cp.omega_e_eff - cp.g_de * cp.g_de / (omega - cp.omega_d_eff);
    return 1.0 / std::norm(denom);
}

inline double scattering_value(const CouplingParams& cp, double omega, bool lamb_shift_enabled) {
    const std::complex<double> omega_e = emitter_pole(cp, lamb_shift_enabled);
    const std::complex<double> denom =
        omega - cp.omega_d_eff - cp.g_de * cp.g_de / (omega - omega_e);
    return -(1.0 / denom).imag();
}

inline std::uint64_t spectrum_fingerprint(const CouplingParams& cp, const FrequencyGrid& grid,
                                          SpectrumKind kind, bool lamb_shift_enabled) {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%d|%d|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g|%.17g",
                  kind == SpectrumKind::emission ? 0 : 1, lamb_shift_enabled ? 1 : 0, cp.g_de,
                  cp.omega_e_eff.real(), cp.omega_e_eff.imag(), cp.omega_d_eff.real(),
                  cp.omega_d_eff.imag(), cp.delta_hom, grid.omega_min, grid.omega_max, grid.step);
    return numerics::fnv1a64(buf);
}

/// Indices of strict local maxima of `v`.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        if (v[i] > v[i - 1] && v[i] > v[i + 1]) out.push_back(i);
    }
    return out;
}

/// Grid-minimum index between the two highest local maxima; throws
/// no_dip_error (carrying the single-peak position) when no bracket exists.
inline std::size_t bracketed_minimum(const std::vector<double>& omegas,
                                     const std::vector<double>& values, std::size_t* left_max,
                                     std::size_t* right_max) {
    const auto maxima = local_maxima(values);
    auto report_no_dip = [&]() -> std::size_t {
        const std::size_t peak =
            static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
        throw no_dip_error("spectrum has no interference dip", omegas[peak]);
    };
    if (maxima.size() < 2) return report_no_dip();

    std::size_t best = maxima[0], second = maxima[1];
    if (values[second] > values[best]) std::swap(best, second);
    for (std::size_t i = 2; i < maxima.size(); ++i) {
        const std::size_t m = maxima[i];
        if (values[m] > values[best]) {
            second = best;
            best = m;
        } else if (values[m] > values[second]) {
            second = m;
        }
    }
    std::size_t lo = std::min(best, second), hi = std::max(best, second);
    if (hi - lo < 2) return report_no_dip();

    std::size_t dip = lo + 1;
    for (std::size_t i = lo + 1; i < hi; ++i) {
        if (values[i] < values[dip]) dip = i;
    }
    *left_max = lo;
    *right_max = hi;
    return dip;
}

} // namespace detail

/// Emission spectrum S ~ |omega - omega'_e - g^2/(omega - omega'_d)|^-2,
/// max-normalized.
inline Spectrum emission_spectrum(const CouplingParams& cp, const FrequencyGrid& grid) {
    grid.validate();
    cp.validate();
    Spectrum s;
    s.kind = SpectrumKind::emission;
    s.omegas = grid.points();
    s.values.resize(s.omegas.size());
    for (std::size_t i = 0; i < s.omegas.size(); ++i) {
        s.values[i] = detail::emission_value(cp, s.omegas[i]);
    }
    s.norm_constant = *std::max_element(s.values.begin(), s.values.end());
    for (double& v : s.values) v /= s.norm_constant;
    s.coarse_grid_warning = grid.step > 0.25 * (-2.0 * cp.omega_e_eff.imag());
    s.params_fingerprint = detail::spectrum_fingerprint(cp, grid, s.kind, true);
    s.validate();
    return s;
}

/// Scattering spectrum S ~ -Im[omega - omega'_d - g^2/(omega - omega'_e)]^-1,
/// max-normalized. With lamb_shift_enabled = false the emitter pole is
/// evaluated with Delta'_e forced to zero.
inline Spectrum scattering_spectrum(const CouplingParams& cp, const FrequencyGrid& grid,
                                    bool lamb_shift_enabled = true) {
    grid.validate();
    cp.validate();
    Spectrum s;
    s.kind = SpectrumKind::scattering;
    s.omegas = grid.points();
    s.values.resize(s.omegas.size());
    for (std::size_t i = 0; i < s.omegas.size(); ++i) {
        s.values[i] = detail::scattering_value(cp, s.omegas[i], lamb_shift_enabled);
    }
    s.norm_constant = *std::max_element(s.values.begin(), s.values.end());
    for (double& v : s.values) {
        v /= s.norm_constant;
        if (v < -1e-12) throw error("scattering_spectrum: negative intensity beyond rounding");
        if (v < 0.0) v = 0.0;
    }
    s.coarse_grid_warning = grid.step > 0.25 * (-2.0 * cp.omega_e_eff.imag());
    s.params_fingerprint = detail::spectrum_fingerprint(cp, grid, s.kind, lamb_shift_enabled);
    s.validate();
    return s;
}

/// Splits the scattering response into its two eigen-channels:
/// omega_+- = (omega'_e + omega'_d +- Delta_ls) / 2 with
/// Delta_ls = sqrt((omega'_d - omega'_e)^2 + 4 g^2), and exact
/// partial-fraction weights f_+- = 1/2 +- (omega'_d - omega'_e)/(2 Delta_ls).
inline EigenDecomposition eigen_decomposition(const CouplingParams& cp) {
    cp.validate();
    if (!(cp.g_de >= 0.0)) throw domain_error("eigen_decomposition: g must be >= 0");
    const std::complex<double> detuning = cp.omega_d_eff - cp.omega_e_eff;
    const std::complex<double> delta_ls =
        std::sqrt(detuning * detuning + 4.0 * cp.g_de * cp.g_de);
    const double scale =
        std::max({1.0, std::abs(cp.omega_e_eff), std::abs(cp.omega_d_eff), 2.0 * cp.g_de});
    if (std::abs(delta_ls) <= 1e-14 * scale) {
        throw degenerate_error("eigen_decomposition: exceptional point (Delta_ls = 0)");
    }
    EigenDecomposition ed;
    ed.omega_plus = 0.5 * (cp.omega_e_eff + cp.omega_d_eff + delta_ls);
    ed.omega_minus = 0.5 * (cp.omega_e_eff + cp.omega_d_eff - delta_ls);
    ed.f_plus = 0.5 + detuning / (2.0 * delta_ls);
    ed.f_minus = 0.5 - detuning / (2.0 * delta_ls);
    return ed;
}

/// Grid minimum between the two highest local maxima, refined by a parabola
/// through the three surrounding samples.
inline DipResult find_dip(const Spectrum& s) {
    s.validate();
    std::size_t lo = 0, hi = 0;
    const std::size_t j = detail::bracketed_minimum(s.omegas, s.values, &lo, &hi);

    DipResult out;
    out.omega_dip = s.omegas[j];
    double dip_value = s.values[j];
    if (j > 0 && j + 1 < s.omegas.size()) {
        if (auto v = numerics::parabola_vertex(s.omegas[j - 1], s.values[j - 1], s.omegas[j],
                                               s.values[j], s.omegas[j + 1], s.values[j + 1])) {
            if (*v > s.omegas[j - 1] && *v < s.omegas[j + 1]) {
                out.omega_dip = *v;
                out.refined = true;
                // parabola value at the vertex
                const double x1 = s.omegas[j - 1], x2 = s.omegas[j], x3 = s.omegas[j + 1];
                const double y1 = s.values[j - 1], y2 = s.values[j], y3 = s.values[j + 1];
                const double l1 = (*v - x2) * (*v - x3) / ((x1 - x2) * (x1 - x3));
                const double l2 = (*v - x1) * (*v - x3) / ((x2 - x1) * (x2 - x3));
                const double l3 = (*v - x1) * (*v - x2) / ((x3 - x1) * (x3 - x2));
                dip_value = y1 * l1 + y2 * l2 + y3 * l3;
            }
        }
    }
    out.depth = std::min(s.values[lo], s.values[hi]) - dip_value;
    if (out.depth < 0.0) out.depth = 0.0;
    return out;
}

/// Dip position from the closed-form scattering response: grid bracketing
/// followed by golden-section refinement of the continuous formula. Smooth in
/// the parameters, which the scan/sweep engines and inversions rely on.
/// A dip whose normalized contrast stays below `min_depth` is treated as
/// unresolvable and reported as no_dip_error.
inline double scattering_dip_refined(const CouplingParams& cp, const FrequencyGrid& grid,
                                     bool lamb_shift_enabled = true, double min_depth = 0.0) {
    grid.validate();
    const auto omegas = grid.points();
    std::vector<double> values(omegas.size());
    double peak = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        values[i] = detail::scattering_value(cp, omegas[i], lamb_shift_enabled);
        peak = std::max(peak, values[i]);
    }
    std::size_t lo = 0, hi = 0;
    const std::size_t j = detail::bracketed_minimum(omegas, values, &lo, &hi);
    const double a = std::max(omegas[lo], omegas[j > 0 ? j - 1 : j]);
    const double b = std::min(omegas[hi], omegas[j + 1 < omegas.size() ? j + 1 : j]);
    const double dip = numerics::golden_minimize(
        [&](double w) { return detail::scattering_value(cp, w, lamb_shift_enabled); }, a, b);
    if (min_depth > 0.0) {
        const double dip_value = detail::scattering_value(cp, dip, lamb_shift_enabled);
        const double depth = (std::min(values[lo], values[hi]) - dip_value) / peak;
        if (depth < min_depth) {
            std::size_t p = 0;
            for (std::size_t i = 1; i < values.size(); ++i) {
                if (values[i] > values[p]) p = i;
            }
            throw no_dip_error("interference dip below the resolvability floor", omegas[p]);
        }
    }
    return dip;
}

/// Emission-peak position refined on the continuous formula.
inline double emission_peak_refined(const CouplingParams& cp, const FrequencyGrid& grid) {
    grid.validate();
    const auto omegas = grid.points();
    std::size_t peak = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double v = detail::emission_value(cp, omegas[i]);
        if (v > best) {
            best = v;
            peak = i;
        }
    }
    if (peak == 0 || peak + 1 >= omegas.size()) return omegas[peak];
    return numerics::golden_minimize(
        [&](double w) { return -detail::emission_value(cp, w); }, omegas[peak - 1],
        omegas[peak + 1]);
}

/// Dip shifts (meV) against a reference dip; when the reference spectrum has
/// no dip the dipole-mode frequency is used instead and flagged.
struct DipShiftTable {
    std::vector<double> param;
    std::vector<std::optional<double>> shift_mev;
    double reference_dip = 0.0;
    bool reference_is_dipole_freq = false;
};

inline DipShiftTable dip_shift(const std::vector<double>& params,
                               const std::vector<std::optional<double>>& dips,
                               std::optional<double> reference_dip, double fallback_omega_d) {
    if (params.size() != dips.size()) throw domain_error("dip_shift: size mismatch");
    DipShiftTable t;
    t.param = params;
    t.reference_is_dipole_freq = !reference_dip.has_value();
    t.reference_dip = reference_dip.value_or(fallback_omega_d);
    t.shift_mev.reserve(dips.size());
    for (const auto& d : dips) {
        if (d) {
            t.shift_mev.push_back((*d - t.reference_dip) * 1e3);
        } else {
            t.shift_mev.push_back(std::nullopt);
        }
    }
    return t;
}

} // namespace lambshift

#endif
