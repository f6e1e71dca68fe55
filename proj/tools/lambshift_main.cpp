#include <CLI11.hpp>

#include "lambshift/cli.hpp"
#include "lambshift/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Plasmon-sphere Lamb shift simulator: spectra, scan imaging and inversion"};
    app.set_version_flag("--version", lambshift::version);
    app.require_subcommand(1);

    lambshift::cli::GlobalOptions opts;
    lambshift::Subcommand selected = lambshift::Subcommand::material;

    const std::vector<std::pair<std::string, lambshift::Subcommand>> subs = {
        {"material", lambshift::Subcommand::material},
        {"modes", lambshift::Subcommand::modes},
        {"spectrum", lambshift::Subcommand::spectrum},
        {"sweep", lambshift::Subcommand::sweep},
        {"scan", lambshift::Subcommand::scan},
        {"invert", lambshift::Subcommand::invert},
    };
    const std::map<std::string, std::string> descriptions = {
        {"material", "dipole-mode parameters and the Drude permittivity table"},
        {"modes", "spectral densities J_n over the frequency grid"},
        {"spectrum", "emission or scattering spectrum at fixed geometry"},
        {"sweep", "1D sweep over distance, polarization angle or z offset"},
        {"scan", "2D lateral dip-shift map"},
        {"invert", "recover emitter parameters from observed data"},
    };

    for (const auto& [name, sub] : subs) {
        CLI::App* cmd = app.add_subcommand(name, descriptions.at(name));
        cmd->add_option("--config", opts.config_path, "run configuration file (JSON)")
            ->required();
        cmd->add_option("--out", opts.out_dir, "output directory")->required();
        cmd->add_option("--jobs", opts.jobs, "worker threads for grid/sweep points")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", opts.seed, "random seed recorded in the manifest");
        cmd->add_flag("--no-lamb-shift", opts.no_lamb_shift,
                      "drop the higher-order-mode shift from the scattering response");
        cmd->callback([&selected, sub = sub] { selected = sub; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return lambshift::cli::exit_validation;
    }

    return lambshift::cli::run(selected, opts);
}
