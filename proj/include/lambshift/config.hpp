#ifndef LAMBSHIFT_CONFIG_HPP
#define LAMBSHIFT_CONFIG_HPP

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambshift/errors.hpp"
#include "lambshift/imaging.hpp"
#include "lambshift/io.hpp"

namespace lambshift {

enum class Subcommand { material, modes, spectrum, sweep, scan, invert };

inline const char* subcommand_name(Subcommand s) {
    switch (s) {
        case Subcommand::material: return "material";
        case Subcommand::modes: return "modes";
        case Subcommand::spectrum: return "spectrum";
        case Subcommand::sweep: return "sweep";
        case Subcommand::scan: return "scan";
        case Subcommand::invert: return "invert";
    }
    return "?";
}

/// Declarative run configuration. Keys carry their unit in the name; unknown
/// keys are rejected so a typo cannot silently fall back to a default.
struct RunConfig {
    DrudeMaterial material;
    HostMedium host;
    EmitterParams emitter;
    std::array<double, 3> emitter_pos{0.0, 0.0, 0.0};
    double probe_radius = 0.0;

    ModeRange hom_range = ModeRange::hom();
    PolarizabilityOptions polar{};
    bool self_consistent = false;

    std::optional<double> omega_d_override;
    std::optional<double> gamma_d_override;
    std::optional<double> mu_d_override;

    std::optional<FrequencyGrid> grid;  // defaults to omega_d +- 0.3 eV, 0.2 meV step

    // geometry for single-point subcommands (spectrum, modes, invert)
    double h_nm = 2.0;
    std::optional<double> theta_deg;  // default: derived from the orientation vector

    // spectrum
    SpectrumKind spectrum_kind = SpectrumKind::scattering;
    bool lamb_shift = true;

    // modes
    int modes_n_columns = 5;
    Orientation modes_orientation = Orientation::radial;

    // sweep
    SweepSpec sweep_spec;

    // scan
    ScanConfig scan_config;

    // invert
    std::string invert_mode = "height";
    std::string observed_path;
    std::pair<double, double> h_bounds{1.2, 6.0};
    std::pair<double, double> theta_bounds{0.0, 90.0};

    std::string fingerprint;  // checksum of the canonical config text
};

namespace config_detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& section,
                           const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key())) {
            throw config_error(section.empty() ? it.key() : section + "." + it.key(),
                               "unknown key");
        }
    }
}

inline double require_number(const json& obj, const std::string& section, const std::string& key) {
    if (!obj.contains(key)) throw config_error(section + "." + key, "missing required value");
    if (!obj[key].is_number()) throw config_error(section + "." + key, "must be a number");
    return obj[key].get<double>();
}

inline double number_or(const json& obj, const std::string& section, const std::string& key,
                        double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw config_error(section + "." + key, "must be a number");
    return obj[key].get<double>();
}

inline bool bool_or(const json& obj, const std::string& section, const std::string& key,
                    bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_boolean()) throw config_error(section + "." + key, "must be a boolean");
    return obj[key].get<bool>();
}

inline std::array<double, 3> vec3_or(const json& obj, const std::string& section,
                                     const std::string& key, std::array<double, 3> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
        throw config_error(section + "." + key, "must be an array of 3 numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline std::pair<double, double> bounds_or(const json& obj, const std::string& section,
                                           const std::string& key,
                                           std::pair<double, double> fallback) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        throw config_error(section + "." + key, "must be an array [lo, hi]");
    }
    const auto out = std::make_pair(v[0].get<double>(), v[1].get<double>());
    if (!(out.second > out.first)) throw config_error(section + "." + key, "needs lo < hi");
    return out;
}

inline void check_positive(double v, const std::string& field) {
    if (!(v > 0.0)) throw config_error(field, "must be > 0");
}

} // namespace config_detail

/// Parses and validates the run configuration for the given subcommand.
/// Relative paths inside the config resolve against the config file's
/// directory.
inline RunConfig load_config(const std::filesystem::path& path, Subcommand sub) {
    using nlohmann::json;
    namespace cd = config_detail;

    const std::string text = io::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error("config", std::string("JSON parse failure: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config", "top level must be an object");

    RunConfig cfg;
    cfg.fingerprint = io::hex_checksum(numerics::fnv1a64(j.dump()));

    cd::reject_unknown(j, "",
                       {"material", "host", "emitter", "probe", "mode_range", "polarizability",
                        "dipole_mode", "grid", "geometry", "spectrum", "modes", "sweep", "scan",
                        "invert", "qed"});

    if (j.contains("material")) {
        const auto& m = j["material"];
        cd::reject_unknown(m, "material", {"eps_inf", "omega_p_eV", "gamma_p_eV"});
        cfg.material.eps_inf = cd::number_or(m, "material", "eps_inf", cfg.material.eps_inf);
        cfg.material.omega_p = cd::number_or(m, "material", "omega_p_eV", cfg.material.omega_p);
        cfg.material.gamma_p = cd::number_or(m, "material", "gamma_p_eV", cfg.material.gamma_p);
        cd::check_positive(cfg.material.omega_p, "material.omega_p_eV");
        if (cfg.material.gamma_p < 0.0) throw config_error("material.gamma_p_eV", "must be >= 0");
    }
    if (j.contains("host")) {
        const auto& m = j["host"];
        cd::reject_unknown(m, "host", {"eps_b"});
        cfg.host.eps_b = cd::number_or(m, "host", "eps_b", cfg.host.eps_b);
        if (!(cfg.host.eps_b >= 1.0)) throw config_error("host.eps_b", "must be >= 1");
    }
    if (j.contains("emitter")) {
        const auto& m = j["emitter"];
        cd::reject_unknown(m, "emitter",
                           {"mu_e_debye", "omega_e_eV", "gamma_e_eV", "orientation", "position_nm"});
        cfg.emitter.mu_e = units::debye_to_enm(
            cd::number_or(m, "emitter", "mu_e_debye", units::enm_to_debye(cfg.emitter.mu_e)));
        cfg.emitter.omega_e = cd::number_or(m, "emitter", "omega_e_eV", cfg.emitter.omega_e);
        cfg.emitter.gamma_e = cd::number_or(m, "emitter", "gamma_e_eV", cfg.emitter.gamma_e);
        cfg.emitter.orientation = cd::vec3_or(m, "emitter", "orientation", cfg.emitter.orientation);
        cfg.emitter_pos = cd::vec3_or(m, "emitter", "position_nm", cfg.emitter_pos);
        cd::check_positive(cfg.emitter.mu_e, "emitter.mu_e_debye");
        cd::check_positive(cfg.emitter.omega_e, "emitter.omega_e_eV");
        // normalize the orientation once here; downstream code requires unit norm
        auto& o = cfg.emitter.orientation;
        const double n = std::sqrt(o[0] * o[0] + o[1] * o[1] + o[2] * o[2]);
        if (!(n > 0.0)) throw config_error("emitter.orientation", "must be nonzero");
        o = {o[0] / n, o[1] / n, o[2] / n};
    }

    if (!j.contains("probe")) throw config_error("probe", "missing required section");
    {
        const auto& m = j["probe"];
        cd::reject_unknown(m, "probe", {"radius_nm"});
        cfg.probe_radius = cd::require_number(m, "probe", "radius_nm");
        cd::check_positive(cfg.probe_radius, "probe.radius_nm");
    }

    if (j.contains("mode_range")) {
        const auto& m = j["mode_range"];
        cd::reject_unknown(m, "mode_range", {"n_max", "rel_tol"});
        if (m.contains("n_max")) {
            if (!m["n_max"].is_number_integer()) {
                throw config_error("mode_range.n_max", "must be an integer (0 = adaptive)");
            }
            const int n_max = m["n_max"].get<int>();
            cfg.hom_range.n_max = n_max <= 0 ? -1 : n_max;
        }
        cfg.hom_range.rel_tol = cd::number_or(m, "mode_range", "rel_tol", cfg.hom_range.rel_tol);
        cd::check_positive(cfg.hom_range.rel_tol, "mode_range.rel_tol");
    }
    if (j.contains("polarizability")) {
        const auto& m = j["polarizability"];
        cd::reject_unknown(m, "polarizability", {"radiative_correction", "finite_size"});
        cfg.polar.radiative_correction =
            cd::bool_or(m, "polarizability", "radiative_correction", true);
        cfg.polar.finite_size = cd::bool_or(m, "polarizability", "finite_size", false);
    }
    if (j.contains("qed")) {
        const auto& m = j["qed"];
        cd::reject_unknown(m, "qed", {"self_consistent"});
        cfg.self_consistent = cd::bool_or(m, "qed", "self_consistent", false);
    }
    if (j.contains("dipole_mode")) {
        const auto& m = j["dipole_mode"];
        cd::reject_unknown(m, "dipole_mode", {"omega_d_eV", "gamma_d_eV", "mu_d_enm"});
        if (m.contains("omega_d_eV")) cfg.omega_d_override = cd::require_number(m, "dipole_mode", "omega_d_eV");
        if (m.contains("gamma_d_eV")) cfg.gamma_d_override = cd::require_number(m, "dipole_mode", "gamma_d_eV");
        if (m.contains("mu_d_enm")) cfg.mu_d_override = cd::require_number(m, "dipole_mode", "mu_d_enm");
    }
    if (j.contains("grid")) {
        const auto& m = j["grid"];
        cd::reject_unknown(m, "grid", {"omega_min_eV", "omega_max_eV", "step_eV"});
        FrequencyGrid g;
        g.omega_min = cd::require_number(m, "grid", "omega_min_eV");
        g.omega_max = cd::require_number(m, "grid", "omega_max_eV");
        g.step = cd::number_or(m, "grid", "step_eV", 2e-4);
        try {
            g.validate();
        } catch (const error& e) {
            throw config_error("grid", e.what());
        }
        cfg.grid = g;
    }
    if (j.contains("geometry")) {
        const auto& m = j["geometry"];
        cd::reject_unknown(m, "geometry", {"h_nm", "theta_deg"});
        cfg.h_nm = cd::number_or(m, "geometry", "h_nm", cfg.h_nm);
        cd::check_positive(cfg.h_nm, "geometry.h_nm");
        if (m.contains("theta_deg")) cfg.theta_deg = cd::require_number(m, "geometry", "theta_deg");
    }
    if (j.contains("spectrum")) {
        const auto& m = j["spectrum"];
        cd::reject_unknown(m, "spectrum", {"kind", "lamb_shift"});
        if (m.contains("kind")) {
            const std::string kind = m["kind"].is_string() ? m["kind"].get<std::string>() : "";
            if (kind == "emission") {
                cfg.spectrum_kind = SpectrumKind::emission;
            } else if (kind == "scattering") {
                cfg.spectrum_kind = SpectrumKind::scattering;
            } else {
                throw config_error("spectrum.kind", "must be \"emission\" or \"scattering\"");
            }
        }
        cfg.lamb_shift = cd::bool_or(m, "spectrum", "lamb_shift", true);
    }
    if (j.contains("modes")) {
        const auto& m = j["modes"];
        cd::reject_unknown(m, "modes", {"n_columns", "orientation"});
        const double n_cols = cd::number_or(m, "modes", "n_columns", cfg.modes_n_columns);
        if (n_cols < 1 || n_cols != std::floor(n_cols)) {
            throw config_error("modes.n_columns", "must be a positive integer");
        }
        cfg.modes_n_columns = static_cast<int>(n_cols);
        if (m.contains("orientation")) {
            const std::string o = m["orientation"].is_string() ? m["orientation"].get<std::string>() : "";
            if (o == "radial") {
                cfg.modes_orientation = Orientation::radial;
            } else if (o == "tangential") {
                cfg.modes_orientation = Orientation::tangential;
            } else {
                throw config_error("modes.orientation", "must be \"radial\" or \"tangential\"");
            }
        }
    }
    if (j.contains("sweep")) {
        const auto& m = j["sweep"];
        cd::reject_unknown(m, "sweep",
                           {"kind", "from", "to", "points", "theta_deg", "h_nm",
                            "extra_z_offset_nm"});
        const std::string kind = m.contains("kind") && m["kind"].is_string()
                                     ? m["kind"].get<std::string>()
                                     : "";
        if (kind == "h") {
            cfg.sweep_spec.kind = SweepKind::distance;
        } else if (kind == "theta") {
            cfg.sweep_spec.kind = SweepKind::polarization;
        } else if (kind == "z") {
            cfg.sweep_spec.kind = SweepKind::z_offset;
        } else {
            throw config_error("sweep.kind", "must be \"h\", \"theta\" or \"z\"");
        }
        cfg.sweep_spec.from = cd::require_number(m, "sweep", "from");
        cfg.sweep_spec.to = cd::require_number(m, "sweep", "to");
        const double points = cd::number_or(m, "sweep", "points", 41);
        if (points < 2 || points != std::floor(points)) {
            throw config_error("sweep.points", "must be an integer >= 2");
        }
        cfg.sweep_spec.points = static_cast<int>(points);
        cfg.sweep_spec.theta_deg = cd::number_or(m, "sweep", "theta_deg", 0.0);
        cfg.sweep_spec.h_nm = cd::number_or(m, "sweep", "h_nm", 2.0);
        cfg.sweep_spec.extra_z_offset = cd::number_or(m, "sweep", "extra_z_offset_nm", 0.0);
        if (cfg.sweep_spec.kind != SweepKind::polarization &&
            (!(cfg.sweep_spec.from > 0.0) || !(cfg.sweep_spec.to > 0.0))) {
            throw config_error("sweep.from", "separations must be > 0");
        }
    }
    if (j.contains("scan")) {
        const auto& m = j["scan"];
        cd::reject_unknown(m, "scan", {"half_extent_nm", "step_nm", "z_offset_nm"});
        cfg.scan_config.half_extent = cd::require_number(m, "scan", "half_extent_nm");
        cfg.scan_config.step = cd::require_number(m, "scan", "step_nm");
        cfg.scan_config.z_offset = cd::require_number(m, "scan", "z_offset_nm");
        cfg.scan_config.emitter_pos = cfg.emitter_pos;
        try {
            cfg.scan_config.validate();
        } catch (const error& e) {
            throw config_error("scan", e.what());
        }
    }
    if (j.contains("invert")) {
        const auto& m = j["invert"];
        cd::reject_unknown(m, "invert",
                           {"mode", "observed_csv", "bounds", "h_bounds_nm", "theta_bounds_deg",
                            "h_nm", "theta_deg"});
        const std::string mode = m.contains("mode") && m["mode"].is_string()
                                     ? m["mode"].get<std::string>()
                                     : "";
        if (mode != "height" && mode != "orientation" && mode != "spectrum" && mode != "map") {
            throw config_error("invert.mode",
                               "must be \"height\", \"orientation\", \"spectrum\" or \"map\"");
        }
        cfg.invert_mode = mode;
        if (!m.contains("observed_csv") || !m["observed_csv"].is_string()) {
            throw config_error("invert.observed_csv", "missing observed data path");
        }
        std::filesystem::path obs = m["observed_csv"].get<std::string>();
        if (obs.is_relative()) obs = path.parent_path() / obs;
        cfg.observed_path = obs.string();
        cfg.h_bounds = cd::bounds_or(m, "invert", "h_bounds_nm",
                                     cd::bounds_or(m, "invert", "bounds", cfg.h_bounds));
        cfg.theta_bounds = cd::bounds_or(m, "invert", "theta_bounds_deg", cfg.theta_bounds);
        if (m.contains("h_nm")) cfg.h_nm = cd::require_number(m, "invert", "h_nm");
        if (m.contains("theta_deg")) cfg.theta_deg = cd::require_number(m, "invert", "theta_deg");
    }

    // sections required per subcommand
    auto require_section = [&](const char* name) {
        if (!j.contains(name)) {
            throw config_error(name, std::string("section required for subcommand '") +
                                          subcommand_name(sub) + "'");
        }
    };
    switch (sub) {
        case Subcommand::material: break;
        case Subcommand::modes: require_section("geometry"); break;
        case Subcommand::spectrum:
            require_section("emitter");
            require_section("geometry");
            break;
        case Subcommand::sweep:
            require_section("emitter");
            require_section("sweep");
            break;
        case Subcommand::scan:
            require_section("emitter");
            require_section("scan");
            break;
        case Subcommand::invert:
            require_section("emitter");
            require_section("invert");
            break;
    }
    return cfg;
}

/// Reduced polar angle for single-point runs: explicit theta_deg wins,
/// otherwise the angle comes from the orientation vector with the probe
/// directly above the emitter.
inline double effective_cos2_theta(const RunConfig& cfg) {
    if (cfg.theta_deg) {
        const double c = std::cos(units::deg_to_rad(*cfg.theta_deg));
        return c * c;
    }
    return cfg.emitter.orientation[2] * cfg.emitter.orientation[2];
}

} // namespace lambshift

#endif
