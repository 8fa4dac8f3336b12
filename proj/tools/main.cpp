#include "vortexlab/config.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace vortexlab;

int main(int argc, char** argv) {
    CLI::App app{"vortexlab: planar vortex equations, singular sinh-Gordon solves, and Vekua diagnostics"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_dir = "out";
    int grid_override = 0;
    std::uint64_t seed_override = 0;
    bool seed_set = false;

    app.add_option("--config", config_path, "configuration file (key = value, [section] headers)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--grid", grid_override, "override [grid] n");
    app.add_option("--seed", seed_override, "override the RNG seed")->each([&](const std::string&) {
        seed_set = true;
    });
    bool csv = false;
    app.add_flag("--csv", csv, "also write .csv heatmaps next to field files");

    const char* stages[] = {"generate", "solve", "refine", "verify", "vekua", "energy"};
    for (const char* s : stages) app.add_subcommand(s);
    auto* report_cmd = app.add_subcommand("report");
    std::string report_path;
    report_cmd->add_option("path", report_path, "report.json to validate and re-emit")->required();

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (command == "report") return run_report(report_path);
        if (config_path.empty()) throw ConfigError("missing --config");
        RunConfig cfg = parse_config_file(config_path);
        if (grid_override > 0) cfg.grid = GridSpec(cfg.grid.extent, grid_override);
        if (seed_set) cfg.seed = seed_override;
        cfg.csv_export = csv;
        return run_pipeline(cfg, command, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
