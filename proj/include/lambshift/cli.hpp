#ifndef LAMBSHIFT_CLI_HPP
#define LAMBSHIFT_CLI_HPP

#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "lambshift/config.hpp"
#include "lambshift/inversion.hpp"
#include "lambshift/io.hpp"

namespace lambshift::cli {

struct GlobalOptions {
    std::filesystem::path config_path;
    std::filesystem::path out_dir;
    int jobs = 1;
    std::uint64_t seed = 0;
    bool no_lamb_shift = false;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;
inline constexpr int exit_io = 4;

namespace detail {

inline DipoleModeParams resolve_dipole(const RunConfig& cfg) {
    DipoleModeParams dp = dipole_mode_params(cfg.material, cfg.host, cfg.probe_radius, cfg.polar);
    if (cfg.omega_d_override) dp.omega_d = *cfg.omega_d_override;
    if (cfg.gamma_d_override) dp.gamma_d = *cfg.gamma_d_override;
    if (cfg.mu_d_override) dp.mu_d = *cfg.mu_d_override;
    dp.validate();
    return dp;
}

inline FrequencyGrid resolve_grid(const RunConfig& cfg, const DipoleModeParams& dp) {
    if (cfg.grid) return *cfg.grid;
    return FrequencyGrid{dp.omega_d - 0.3, dp.omega_d + 0.3, 2e-4};
}

inline ForwardContext make_context(const RunConfig& cfg, const GlobalOptions& opts) {
    ForwardContext ctx;
    ctx.material = cfg.material;
    ctx.host = cfg.host;
    ctx.dipole = resolve_dipole(cfg);
    ctx.emitter = cfg.emitter;
    ctx.probe_radius = cfg.probe_radius;
    ctx.spectrum_grid = resolve_grid(cfg, ctx.dipole);
    ctx.lamb_shift = cfg.lamb_shift && !opts.no_lamb_shift;
    ctx.self_consistent = cfg.self_consistent;
    ctx.hom_range = cfg.hom_range;
    ctx.polar = cfg.polar;
    return ctx;
}

inline std::string opt_cell(const std::optional<double>& v) {
    return v ? io::format_double(*v) : std::string();
}

} // namespace detail

inline void run_material(const RunConfig& cfg, io::OutputSink& sink) {
    const DipoleModeParams dp =
        dipole_mode_params(cfg.material, cfg.host, cfg.probe_radius, cfg.polar);

    nlohmann::json j;
    j["omega_d_eV"] = dp.omega_d;
    j["gamma_d_eV"] = dp.gamma_d;
    j["mu_d_enm"] = dp.mu_d;
    j["mu_d_debye"] = units::enm_to_debye(dp.mu_d);
    j["eta1_eV"] = dp.eta1;
    j["quasistatic_resonance_eV"] =
        cfg.material.omega_p / std::sqrt(cfg.material.eps_inf + 2.0 * cfg.host.eps_b);
    j["radiative_correction"] = cfg.polar.radiative_correction;
    j["finite_size"] = cfg.polar.finite_size;
    sink.write("material.json", j.dump(2) + "\n");

    io::CsvBuilder csv({"omega_eV", "eps_re", "eps_im"});
    const double w_lo = 0.3 * cfg.material.omega_p;
    const double w_hi = cfg.material.omega_p;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
        const double w = w_lo + (w_hi - w_lo) * static_cast<double>(i) / n;
        const auto eps = drude_permittivity(cfg.material, w);
        csv.row({io::format_double(w), io::format_double(eps.real()),
                 io::format_double(eps.imag())});
    }
    sink.write("epsilon.csv", csv.str());
}

inline void run_modes(const RunConfig& cfg, io::OutputSink& sink, const GlobalOptions& opts) {
    const DipoleModeParams dp = detail::resolve_dipole(cfg);
    const FrequencyGrid grid = detail::resolve_grid(cfg, dp);
    const auto omegas = grid.points();
    const double d = cfg.probe_radius + cfg.h_nm;

    const int n_cols = cfg.modes_n_columns;
    std::vector<std::vector<double>> rows(omegas.size());
    numerics::parallel_for(omegas.size(), opts.jobs, [&](std::size_t i) {
        std::vector<double> row;
        row.reserve(static_cast<std::size_t>(n_cols) + 1);
        for (int n = 1; n <= n_cols; ++n) {
            row.push_back(spectral_density(cfg.material, cfg.host, cfg.probe_radius, d, omegas[i],
                                           n, cfg.modes_orientation, cfg.polar));
        }
        row.push_back(spectral_density_sum(cfg.material, cfg.host, cfg.probe_radius, d, omegas[i],
                                           cfg.hom_range, cfg.modes_orientation, cfg.polar));
        rows[i] = std::move(row);
    });

    std::vector<std::string> header{"omega_eV"};
    for (int n = 1; n <= n_cols; ++n) header.push_back("J_" + std::to_string(n));
    header.push_back("J_hom_total");
    io::CsvBuilder csv(header);
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        std::vector<std::string> cells{io::format_double(omegas[i])};
        for (double v : rows[i]) cells.push_back(io::format_double(v));
        csv.row(cells);
    }
    sink.write("modes.csv", csv.str());
}

inline void run_spectrum(const RunConfig& cfg, io::OutputSink& sink, const GlobalOptions& opts) {
    const ForwardContext ctx = detail::make_context(cfg, opts);
    const CouplingParams cp =
        ctx.coupling_at(cfg.probe_radius + cfg.h_nm, effective_cos2_theta(cfg));

    const Spectrum s = cfg.spectrum_kind == SpectrumKind::emission
                           ? emission_spectrum(cp, ctx.spectrum_grid)
                           : scattering_spectrum(cp, ctx.spectrum_grid, ctx.lamb_shift);
    sink.write("spectrum.csv", io::spectrum_csv(s));

    nlohmann::json j;
    j["kind"] = s.kind == SpectrumKind::emission ? "emission" : "scattering";
    j["params_fingerprint"] = io::hex_checksum(s.params_fingerprint);
    j["normalization_constant"] = s.norm_constant;
    j["coarse_grid_warning"] = s.coarse_grid_warning;
    j["lamb_shift"] = ctx.lamb_shift;
    j["delta_hom_meV"] = cp.delta_hom * 1e3;
    j["gamma_hom_meV"] = cp.gamma_hom * 1e3;
    j["g_meV"] = cp.g_de * 1e3;
    if (s.kind == SpectrumKind::scattering) {
        try {
            const DipResult dip = find_dip(s);
            j["dip"] = {{"omega_dip_eV", dip.omega_dip},
                        {"depth", dip.depth},
                        {"refined", dip.refined}};
        } catch (const no_dip_error& e) {
            j["dip"] = nullptr;
            j["single_peak_eV"] = e.peak_omega;
        }
    } else {
        j["emission_peak_eV"] = emission_peak_refined(cp, ctx.spectrum_grid);
    }
    sink.write("spectrum.json", j.dump(2) + "\n");
}

inline void run_sweep(const RunConfig& cfg, io::OutputSink& sink, const GlobalOptions& opts) {
    const ForwardContext ctx = detail::make_context(cfg, opts);
    const SweepResult result = sweep(ctx, cfg.sweep_spec, opts.jobs);

    const char* param_name = cfg.sweep_spec.kind == SweepKind::distance        ? "h_nm"
                             : cfg.sweep_spec.kind == SweepKind::polarization ? "theta_deg"
                                                                              : "z_nm";
    io::CsvBuilder csv({param_name, "delta_hom_meV", "gamma_hom_meV", "g_meV", "emission_peak_eV",
                        "omega_dip_eV", "dip_shift_meV", "error"});
    for (const SweepRow& row : result.rows) {
        csv.row({io::format_double(row.param), io::format_double(row.delta_hom * 1e3),
                 io::format_double(row.gamma_hom * 1e3), io::format_double(row.g_de * 1e3),
                 io::format_double(row.emission_peak), detail::opt_cell(row.omega_dip),
                 detail::opt_cell(row.shift_mev), row.error.value_or("")});
    }
    sink.write("sweep.csv", csv.str());

    nlohmann::json j;
    j["kind"] = param_name;
    j["reference_dip_eV"] = result.reference_dip;
    j["reference_is_dipole_freq"] = result.reference_is_dipole_freq;
    j["lamb_shift"] = ctx.lamb_shift;
    sink.write("sweep.json", j.dump(2) + "\n");
}

inline void run_scan(const RunConfig& cfg, io::OutputSink& sink, const GlobalOptions& opts) {
    const ForwardContext ctx = detail::make_context(cfg, opts);
    ScanConfig sc = cfg.scan_config;
    sc.emitter_pos = cfg.emitter_pos;
    const ScanMap map = scan_2d(ctx, sc, opts.jobs);

    io::CsvBuilder csv({"x_nm", "y_nm", "shift_meV"});
    for (std::size_t iy = 0; iy < map.ys.size(); ++iy) {
        for (std::size_t ix = 0; ix < map.xs.size(); ++ix) {
            csv.row({io::format_double(map.xs[ix]), io::format_double(map.ys[iy]),
                     detail::opt_cell(map.at(ix, iy))});
        }
    }
    sink.write("scan.csv", csv.str());

    nlohmann::json j;
    j["xs_nm"] = map.xs;
    j["ys_nm"] = map.ys;
    nlohmann::json shifts = nlohmann::json::array();
    for (std::size_t iy = 0; iy < map.ys.size(); ++iy) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t ix = 0; ix < map.xs.size(); ++ix) {
            const auto& v = map.at(ix, iy);
            if (v) {
                row.push_back(*v);
            } else {
                row.push_back(nullptr);
            }
        }
        shifts.push_back(std::move(row));
    }
    j["shift_meV"] = std::move(shifts);
    j["z_offset_nm"] = sc.z_offset;
    j["reference_dip_eV"] = map.reference_dip;
    j["reference_is_dipole_freq"] = map.reference_is_dipole_freq;
    j["config_fingerprint"] = io::hex_checksum(map.config_fingerprint);
    sink.write("scan.json", j.dump(2) + "\n");
}

namespace detail {

/// Rebuilds a ScanMap from the x,y,shift CSV emitted by run_scan.
inline ScanMap load_scan_csv(const std::filesystem::path& path) {
    const std::string text = io::read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw io_error("empty scan CSV: " + path.string());

    struct Cell {
        double x, y;
        std::optional<double> shift;
    };
    std::vector<Cell> cells;
    std::map<double, std::size_t> xs, ys;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw io_error("malformed scan CSV row: " + line);
        }
        Cell cell{};
        try {
            cell.x = std::stod(line.substr(0, c1));
            cell.y = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
            const std::string rest = line.substr(c2 + 1);
            if (!rest.empty()) cell.shift = std::stod(rest);
        } catch (const std::exception&) {
            throw io_error("malformed scan CSV row: " + line);
        }
        xs.emplace(cell.x, 0);
        ys.emplace(cell.y, 0);
        cells.push_back(cell);
    }
    ScanMap map;
    for (auto& [x, idx] : xs) {
        idx = map.xs.size();
        map.xs.push_back(x);
    }
    for (auto& [y, idx] : ys) {
        idx = map.ys.size();
        map.ys.push_back(y);
    }
    map.shifts.assign(map.xs.size() * map.ys.size(), std::nullopt);
    for (const Cell& c : cells) {
        map.shifts[ys.at(c.y) * map.xs.size() + xs.at(c.x)] = c.shift;
    }
    return map;
}

} // namespace detail

inline void run_invert(const RunConfig& cfg, io::OutputSink& sink, const GlobalOptions& opts) {
    const ForwardContext ctx = detail::make_context(cfg, opts);
    nlohmann::json j;
    j["mode"] = cfg.invert_mode;

    if (cfg.invert_mode == "map") {
        const ScanMap map = detail::load_scan_csv(cfg.observed_path);
        const LateralResult res = localize_lateral(map);
        j["x_nm"] = res.x;
        j["y_nm"] = res.y;
        j["azimuth_deg"] = res.azimuth_deg;
        j["anisotropy"] = res.anisotropy;
        sink.write("invert.json", j.dump(2) + "\n");
        return;
    }

    const Spectrum observed = io::load_spectrum_csv(cfg.observed_path, SpectrumKind::scattering);

    if (cfg.invert_mode == "spectrum") {
        const SpectrumForward forward =
            make_spectrum_forward(ctx, observed.omegas, SpectrumKind::scattering);
        const InversionResult res =
            fit_spectrum(observed, cfg.h_bounds, cfg.theta_bounds, forward);
        j["h_est_nm"] = res.h_est;
        j["theta_est_deg"] = res.theta_est;
        j["residual"] = res.residual;
        j["iterations"] = res.iterations;
        j["converged"] = res.converged;
        j["flat_misfit_warning"] = res.flat_misfit_warning;
        sink.write("invert.json", j.dump(2) + "\n");
        return;
    }

    const DipResult dip = find_dip(observed);
    const ScalarForward forward = [&ctx](double h, double theta_deg) {
        return ctx.dip_at(h, theta_deg);
    };
    if (cfg.invert_mode == "height") {
        const double theta = cfg.theta_deg.value_or(
            units::rad_to_deg(std::acos(std::sqrt(effective_cos2_theta(cfg)))));
        const double h = invert_height(dip.omega_dip, theta, cfg.h_bounds.first,
                                       cfg.h_bounds.second, forward);
        j["h_est_nm"] = h;
        j["theta_known_deg"] = theta;
        j["residual"] = std::abs(forward(h, theta) - dip.omega_dip);
        j["converged"] = true;
    } else {  // orientation
        const double theta = invert_orientation(dip.omega_dip, cfg.h_nm, cfg.theta_bounds.first,
                                                cfg.theta_bounds.second, forward);
        j["theta_est_deg"] = theta;
        j["h_known_nm"] = cfg.h_nm;
        j["residual"] = std::abs(forward(cfg.h_nm, theta) - dip.omega_dip);
        j["converged"] = true;
    }
    j["omega_dip_obs_eV"] = dip.omega_dip;
    sink.write("invert.json", j.dump(2) + "\n");
}

/// Loads the config, dispatches the subcommand, emits outputs plus manifest,
/// and maps failures to exit codes with a machine-readable JSON error on
/// stderr: 2 validation, 3 numerical, 4 I/O.
inline int run(Subcommand sub, const GlobalOptions& opts) {
    auto fail = [](int code, const char* kind, const std::string& message,
                   const std::string& field = "") {
        nlohmann::json err;
        err["error"]["exit_code"] = code;
        err["error"]["kind"] = kind;
        err["error"]["message"] = message;
        if (!field.empty()) err["error"]["field"] = field;
        std::cerr << err.dump() << std::endl;
        return code;
    };

    try {
        const RunConfig cfg = load_config(opts.config_path, sub);
        io::OutputSink sink(opts.out_dir, cfg.fingerprint, opts.seed, opts.jobs);
        switch (sub) {
            case Subcommand::material: run_material(cfg, sink); break;
            case Subcommand::modes: run_modes(cfg, sink, opts); break;
            case Subcommand::spectrum: run_spectrum(cfg, sink, opts); break;
            case Subcommand::sweep: run_sweep(cfg, sink, opts); break;
            case Subcommand::scan: run_scan(cfg, sink, opts); break;
            case Subcommand::invert: run_invert(cfg, sink, opts); break;
        }
        sink.finish();
        return exit_ok;
    } catch (const config_error& e) {
        return fail(exit_validation, "validation", e.what(), e.field);
    } catch (const io_error& e) {
        return fail(exit_io, "io", e.what());
    } catch (const error& e) {
        return fail(exit_numerical, "numerical", e.what());
    } catch (const std::exception& e) {
        return fail(exit_numerical, "internal", e.what());
    }
}

} // namespace lambshift::cli

#endif
