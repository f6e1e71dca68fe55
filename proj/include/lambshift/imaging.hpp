#ifndef LAMBSHIFT_IMAGING_HPP
#define LAMBSHIFT_IMAGING_HPP

#include <array>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "lambshift/errors.hpp"
#include "lambshift/numerics.hpp"
#include "lambshift/spectra.hpp"

namespace lambshift {

/// Reduces a 3D probe position to the on-axis model: d is the emitter to
/// sphere-center distance and cos2_theta the squared projection of the
/// emitter dipole onto that axis.
inline ProbeGeometry effective_geometry(const std::array<double, 3>& probe_center,
                                        const std::array<double, 3>& emitter_pos,
                                        const std::array<double, 3>& orientation, double radius) {
    const double dx = probe_center[0] - emitter_pos[0];
    const double dy = probe_center[1] - emitter_pos[1];
    const double dz = probe_center[2] - emitter_pos[2];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (!(d > radius)) throw geometry_error("effective_geometry: probe overlaps the emitter");
    const double proj = (orientation[0] * dx + orientation[1] * dy + orientation[2] * dz) / d;
    ProbeGeometry geom;
    geom.radius = radius;
    geom.distance = d;
    geom.cos2_theta = proj * proj;
    geom.validate();
    return geom;
}

/// Shared forward context for sweeps, scans and inversions.
struct ForwardContext {
    DrudeMaterial material;
    HostMedium host;
    DipoleModeParams dipole;
    EmitterParams emitter;
    double probe_radius = 10.0;
    FrequencyGrid spectrum_grid;
    bool lamb_shift = true;
    bool self_consistent = false;
    ModeRange hom_range = ModeRange::hom();
    PolarizabilityOptions polar{};
    // Dips shallower than this fraction of the peak are reported as missing.
    double dip_depth_floor = 2.5e-3;

    CouplingParams coupling_at(double d, double cos2_theta) const {
        ProbeGeometry geom{probe_radius, d, cos2_theta};
        return effective_frequencies(material, host, geom, emitter, dipole, self_consistent,
                                     hom_range, polar);
    }

    /// Refined scattering-dip position for a gap h and polar angle theta.
    double dip_at(double h, double theta_deg) const {
        const double c = std::cos(units::deg_to_rad(theta_deg));
        const CouplingParams cp = coupling_at(probe_radius + h, c * c);
        return scattering_dip_refined(cp, spectrum_grid, lamb_shift, dip_depth_floor);
    }
};

enum class SweepKind { distance, polarization, z_offset };

struct SweepSpec {
    SweepKind kind = SweepKind::distance;
    double from = 20.0;
    double to = 1.5;
    int points = 38;
    double theta_deg = 0.0;       // fixed polar angle for distance sweeps
    double h_nm = 2.0;            // fixed gap for polarization sweeps
    double extra_z_offset = 0.0;  // added to every z value (e.g. buried emitter)

    void validate() const {
        if (points < 2) throw domain_error("sweep: need at least 2 points");
        if (from == to) throw domain_error("sweep: empty range");
    }
};

struct SweepRow {
    double param = 0.0;                 // h (nm), theta (deg) or z (nm)
    double delta_hom = 0.0;             // eV
    double gamma_hom = 0.0;             // eV
    double g_de = 0.0;                  // eV
    double emission_peak = 0.0;         // eV
    std::optional<double> omega_dip;    // eV
    std::optional<double> shift_mev;    // vs far-separation reference
    std::optional<std::string> error;   // per-point failure, sweep continues
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double reference_dip = 0.0;
    bool reference_is_dipole_freq = false;
};

namespace detail {

/// (d, cos2_theta) for one sweep point.
inline std::pair<double, double> sweep_point_geometry(const ForwardContext& ctx,
                                                      const SweepSpec& spec, double param) {
    switch (spec.kind) {
        case SweepKind::distance: {
            const double c = std::cos(units::deg_to_rad(spec.theta_deg));
            return {ctx.probe_radius + param, c * c};
        }
        case SweepKind::polarization: {
            const double c = std::cos(units::deg_to_rad(param));
            return {ctx.probe_radius + spec.h_nm, c * c};
        }
        case SweepKind::z_offset:
        default: {
            // probe directly above: the axis is z, so cos2 comes from the
            // emitter orientation
            const double c = ctx.emitter.orientation[2];
            return {ctx.probe_radius + param + spec.extra_z_offset, c * c};
        }
    }
}

inline double sweep_reference_separation(const SweepSpec& spec) {
    double far = 20.0;
    if (spec.kind != SweepKind::polarization) {
        far = std::max(far, std::max(spec.from, spec.to));
    }
    return far;
}

} // namespace detail

/// Runs a 1D parameter sweep. Every row carries the higher-order-mode shift
/// and decay, the coupling, the emission peak, the scattering dip and its
/// shift against a far-separation reference (gap = max(20 nm, sweep range)).
/// Per-point failures are recorded in the row and the sweep continues.
inline SweepResult sweep(const ForwardContext& ctx, const SweepSpec& spec, int jobs = 1) {
    spec.validate();
    ctx.spectrum_grid.validate();

    SweepResult result;
    result.rows.resize(static_cast<std::size_t>(spec.points));

    // Reference configuration: far separation, dip falls back to omega_d
    // when the reference spectrum has no dip.
    const double ref_gap = detail::sweep_reference_separation(spec);
    double ref_d, ref_cos2;
    if (spec.kind == SweepKind::polarization) {
        const double c = std::cos(units::deg_to_rad(spec.from));
        ref_d = ctx.probe_radius + std::max(20.0, spec.h_nm);
        ref_cos2 = c * c;
    } else {
        std::tie(ref_d, ref_cos2) = detail::sweep_point_geometry(ctx, spec, ref_gap);
    }
    try {
        const CouplingParams ref_cp = ctx.coupling_at(ref_d, ref_cos2);
        result.reference_dip = scattering_dip_refined(ref_cp, ctx.spectrum_grid, ctx.lamb_shift,
                                                       ctx.dip_depth_floor);
    } catch (const no_dip_error&) {
        result.reference_dip = ctx.dipole.omega_d;
        result.reference_is_dipole_freq = true;
    }

    const double step = (spec.to - spec.from) / static_cast<double>(spec.points - 1);
    numerics::parallel_for(result.rows.size(), jobs, [&](std::size_t i) {
        SweepRow& row = result.rows[i];
        row.param = spec.from + static_cast<double>(i) * step;
        try {
            const auto [d, cos2] = detail::sweep_point_geometry(ctx, spec, row.param);
            const CouplingParams cp = ctx.coupling_at(d, cos2);
            row.delta_hom = cp.delta_hom;
            row.gamma_hom = cp.gamma_hom;
            row.g_de = cp.g_de;
            row.emission_peak = emission_peak_refined(cp, ctx.spectrum_grid);
            try {
                row.omega_dip = scattering_dip_refined(cp, ctx.spectrum_grid, ctx.lamb_shift,
                                                       ctx.dip_depth_floor);
                row.shift_mev = (*row.omega_dip - result.reference_dip) * 1e3;
            } catch (const no_dip_error& e) {
                row.error = std::string("no dip (single peak at ") + std::to_string(e.peak_omega) +
                            " eV)";
            }
        } catch (const error& e) {
            row.error = e.what();
        }
    });
    return result;
}

/// Lateral scan setup. The grid is centered on the lateral origin; the
/// sphere center travels the plane z = emitter_z + z_offset + R.
struct ScanConfig {
    double half_extent = 2.0;  // nm, grid spans [-half_extent, +half_extent]
    double step = 0.1;         // nm
    double z_offset = 1.0;     // nm, gap between sphere bottom and emitter plane
    std::array<double, 3> emitter_pos{0.0, 0.0, 0.0};

    void validate() const {
        if (!(step > 0.0)) throw domain_error("scan: step must be > 0");
        if (!(half_extent >= step)) throw domain_error("scan: extent must cover at least one step");
        if (!(z_offset > 0.0)) throw domain_error("scan: z_offset must be > 0");
    }

    std::vector<double> axis() const {
        // built as signed-index * step so that x and -x are exact negations;
        // mirrored probe positions then evaluate bitwise identically
        const int half = static_cast<int>(std::round(half_extent / step));
        std::vector<double> out(static_cast<std::size_t>(2 * half + 1));
        for (int i = -half; i <= half; ++i) {
            out[static_cast<std::size_t>(i + half)] = static_cast<double>(i) * step;
        }
        return out;
    }

    std::uint64_t fingerprint() const {
        char buf[256];
        std::snprintf(buf, sizeof buf, "%.17g|%.17g|%.17g|%.17g|%.17g|%.17g", half_extent, step,
                      z_offset, emitter_pos[0], emitter_pos[1], emitter_pos[2]);
        return numerics::fnv1a64(buf);
    }
};

/// Dense dip-shift map (meV, negative = red). Cells without a resolvable dip
/// are missing rather than zero. Row-major: shifts[iy * xs.size() + ix].
struct ScanMap {
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<std::optional<double>> shifts;
    double reference_dip = 0.0;
    bool reference_is_dipole_freq = false;
    std::uint64_t config_fingerprint = 0;

    const std::optional<double>& at(std::size_t ix, std::size_t iy) const {
        return shifts[iy * xs.size() + ix];
    }
};

/// Scans the probe over the lateral grid and maps the dip shift against a
/// far-lateral reference (offset = 10x the grid extent). Grid points are
/// independent work items; output is deterministic for any `jobs`.
inline ScanMap scan_2d(const ForwardContext& ctx, const ScanConfig& config, int jobs = 1) {
    config.validate();
    ctx.spectrum_grid.validate();

    ScanMap map;
    map.xs = config.axis();
    map.ys = config.axis();
    map.shifts.assign(map.xs.size() * map.ys.size(), std::nullopt);
    map.config_fingerprint = config.fingerprint();

    const double center_z = config.emitter_pos[2] + config.z_offset + ctx.probe_radius;
    const double far_offset = 10.0 * (2.0 * config.half_extent);

    auto dip_at_lateral = [&](double x, double y) {
        const ProbeGeometry geom = effective_geometry(
            {x, y, center_z}, config.emitter_pos, ctx.emitter.orientation, ctx.probe_radius);
        const CouplingParams cp = ctx.coupling_at(geom.distance, geom.cos2_theta);
        return scattering_dip_refined(cp, ctx.spectrum_grid, ctx.lamb_shift, ctx.dip_depth_floor);
    };

    try {
        map.reference_dip =
            dip_at_lateral(config.emitter_pos[0] + far_offset, config.emitter_pos[1]);
    } catch (const no_dip_error&) {
        map.reference_dip = ctx.dipole.omega_d;
        map.reference_is_dipole_freq = true;
    }

    const std::size_t nx = map.xs.size();
    numerics::parallel_for(map.shifts.size(), jobs, [&](std::size_t idx) {
        const std::size_t iy = idx / nx;
        const std::size_t ix = idx % nx;
        try {
            const double dip = dip_at_lateral(map.xs[ix], map.ys[iy]);
            map.shifts[idx] = (dip - map.reference_dip) * 1e3;
        } catch (const no_dip_error&) {
            // left missing
        }
    });
    return map;
}

enum class Axis { x, y };

/// FWHM of the |shift| profile through the map row/column nearest `through`,
/// from linear interpolation of the half-maximum crossings.
inline double map_fwhm(const ScanMap& map, Axis axis, double through = 0.0) {
    const std::vector<double>& line = axis == Axis::x ? map.xs : map.ys;
    const std::vector<double>& other = axis == Axis::x ? map.ys : map.xs;
    std::size_t fixed = 0;
    for (std::size_t i = 1; i < other.size(); ++i) {
        if (std::abs(other[i] - through) < std::abs(other[fixed] - through)) fixed = i;
    }
    std::vector<double> profile(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        const auto& v = axis == Axis::x ? map.at(i, fixed) : map.at(fixed, i);
        if (!v) throw domain_error("map_fwhm: missing value on the profile");
        profile[i] = std::abs(*v);
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (profile[i] > profile[peak]) peak = i;
    }
    const double half = 0.5 * profile[peak];
    double left = line.front(), right = line.back();
    bool found_left = false, found_right = false;
    for (std::size_t i = peak; i-- > 0;) {
        if (profile[i] <= half) {
            const double f = (half - profile[i]) / (profile[i + 1] - profile[i]);
            left = line[i] + f * (line[i + 1] - line[i]);
            found_left = true;
            break;
        }
    }
    for (std::size_t i = peak + 1; i < profile.size(); ++i) {
        if (profile[i] <= half) {
            const double f = (profile[i - 1] - half) / (profile[i - 1] - profile[i]);
            right = line[i - 1] + f * (line[i] - line[i - 1]);
            found_right = true;
            break;
        }
    }
    if (!found_left || !found_right) {
        throw domain_error("map_fwhm: half-maximum not reached inside the scan window");
    }
    return right - left;
}

} // namespace lambshift

#endif
