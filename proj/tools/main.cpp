// hyperfall <mode> --config <path> [--out <dir>]
//
// Exit status: 0 success, 2 configuration error, 3 solver error,
// 4 convergence-gate failure.

#include "hyperfall/config.hpp"
#include "hyperfall/errors.hpp"
#include "hyperfall/report.hpp"
#include "hyperfall/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char **argv) {
    CLI::App app{"Steady free fall and sedimentation of slender rigid bodies in a hyperviscous fluid"};
    app.set_version_flag("--version", hyperfall::version());

    std::string mode;
    std::string config_path;
    std::string out_dir;
    std::string seed;
    app.add_option("mode", mode, "mobility | steady | fall | kernel-check | convergence")
        ->required()
        ->check(CLI::IsMember({"mobility", "steady", "fall", "kernel-check", "convergence"}));
    app.add_option("--config,-c", config_path, "JSON run configuration")->required();
    app.add_option("--out,-o", out_dir, "output directory (overrides outputs.dir)");
    app.add_option("--seed", seed, "accepted for interface compatibility; runs are deterministic");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hyperfall::ExitConfig;
    }

    hyperfall::RunConfig config;
    try {
        config = hyperfall::load_config(config_path, mode);
    } catch (const hyperfall::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return hyperfall::exit_code_for(e);
    }
    if (!out_dir.empty())
        config.outputs.dir = out_dir;

    const hyperfall::RunOutcome outcome = hyperfall::run(config);
    if (!outcome.message.empty())
        std::cerr << (outcome.exit_code == 0 ? "" : "error: ") << outcome.message << "\n";
    for (const auto &path : outcome.artifacts)
        std::cout << "wrote " << path.string() << "\n";
    return outcome.exit_code;
}
