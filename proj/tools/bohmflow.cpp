// Command-line driver: bohmflow <subcommand> --config PATH --out DIR [--seed N]

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bohmflow/cli/commands.hpp"
#include "bohmflow/cli/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

}  // namespace

int main(int argc, char** argv) {
    using namespace bohmflow;
    CLI::App app{"Bohmian trajectories and lattice beables for damped Werner states"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;

    const std::pair<const char*, const char*> subs[] = {
        {"state", "damped density matrices (JSON)"},
        {"concurrence", "concurrence curve, separability threshold and sudden-death time"},
        {"trajectories", "Bohmian trajectories (CSV + metadata JSON)"},
        {"amplitude", "oscillation amplitude against epsilon"},
        {"beables", "lattice jump process: walker paths, drift and marginal checks"},
        {"validate", "invariant suite; nonzero exit on any failure"},
    };
    for (const auto& [name, help] : subs) {
        auto* sc = app.add_subcommand(name, help);
        sc->add_option("--config", config_path, "configuration file (JSON or key = value)");
        sc->add_option("--out", out_dir, "output directory");
        sc->add_option("--seed", seed, "overrides the configured seed");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    cli::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = cli::load_config(config_path);
        if (seed) cfg.seed = *seed;
        cfg.validate();
    } catch (const cli::ConfigError& e) {
        std::cerr << "configuration error in field '" << e.field() << "': " << e.what() << '\n';
        return kExitConfig;
    }

    const auto par = Parallelism::from_environment();
    try {
        if (cmd == "state") cli::run_state(cfg, out_dir);
        else if (cmd == "concurrence") cli::run_concurrence(cfg, out_dir);
        else if (cmd == "trajectories") cli::run_trajectories(cfg, out_dir, par);
        else if (cmd == "amplitude") cli::run_amplitude(cfg, out_dir);
        else if (cmd == "beables") cli::run_beables(cfg, out_dir, par);
        else if (cmd == "validate") {
            if (!cli::run_validate(cfg, out_dir, par)) {
                std::cerr << "validation failed; see " << (std::filesystem::path(out_dir) / "validate.json").string() << '\n';
                return kExitNumerical;
            }
        }
    } catch (const cli::ConfigError& e) {
        std::cerr << "configuration error in field '" << e.field() << "': " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        cli::json payload = {{"subcommand", cmd}, {"error", e.what()}};
        if (const auto* node = dynamic_cast<const NodalSingularity*>(&e))
            payload["point"] = {{"x1", node->x1()}, {"x2", node->x2()}, {"omega_t", node->omega_t()}};
        if (const auto* diag = dynamic_cast<const DiagnosticFailure*>(&e)) payload["count"] = diag->count();
        std::cerr << payload.dump(2) << '\n';
        return kExitNumerical;
    }
    return 0;
}
