// ddmet: run or validate an experiment configuration.
//
//   ddmet run <config> [--threads N]
//   ddmet validate <config>
//   ddmet --version
//
// Exit codes: 0 ok, 2 configuration problem, 3 numerical failure.

#include "ddmet/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace {

using namespace ddmet::cli;

void report(const ConfigError& e, const std::string& source) {
    for (const auto& d : e.diagnostics()) std::cerr << format(d, source) << '\n';
}

// OUTPUT_DIR is the only setting taken from the environment.
void apply_environment(RunConfig& config) {
    if (const char* dir = std::getenv("OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
}

int validate_command(const std::string& path) {
    try {
        RunConfig config = load_config(path);
        apply_environment(config);
        for (const auto& [key, value] : resolved_entries(config)) std::cout << key << " = " << value << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        report(e, path);
        return kExitConfig;
    }
}

int run_command(const std::string& path, unsigned threads) {
    RunConfig config;
    try {
        config = load_config(path);
    } catch (const ConfigError& e) {
        report(e, path);
        return kExitConfig;
    }
    apply_environment(config);

    RunManifest manifest;
    try {
        manifest = run(config, RunOptions{threads});
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << path << ": output_dir: " << e.what() << '\n';
        return kExitConfig;
    }

    const auto manifest_path = std::filesystem::path(config.output_dir) / "manifest.json";
    if (manifest.status != "ok") {
        std::cerr << "numerical failure: " << manifest.error << '\n';
        std::cerr << "manifest: " << manifest_path.string() << '\n';
        return kExitNumerical;
    }
    for (const auto& f : manifest.outputs) {
        std::cout << (std::filesystem::path(config.output_dir) / f.path).string() << '\n';
    }
    std::cout << manifest_path.string() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decoupled frequency sensing: QFI curves, oracles and decoupling checks", "ddmet"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string run_path;
    unsigned threads = 1;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario and write CSV/JSON artifacts");
    run_cmd->add_option("config", run_path, "configuration file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--threads", threads, "worker threads for curve evaluation")
        ->check(CLI::Range(1u, 1024u));

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "check a configuration and print resolved values");
    validate_cmd->add_option("config", validate_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    if (*run_cmd) return run_command(run_path, threads);
    return validate_command(validate_path);
}
