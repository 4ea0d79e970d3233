#include "config.hpp"
#include "pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <future>
#include <iostream>
#include <mutex>

namespace fs = std::filesystem;
using namespace delaylab::tools;

namespace {

fs::path scenario_dir() {
    if (const char* env = std::getenv("DELAYLAB_SCENARIO_DIR"); env && *env) return env;
    return DELAYLAB_SCENARIO_DIR;
}

fs::path output_dir(const std::string& name, const std::string& explicit_out) {
    if (!explicit_out.empty()) return explicit_out;
    if (const char* env = std::getenv("DELAYLAB_OUTPUT_ROOT"); env && *env) return fs::path(env) / name;
    return fs::path("runs") / name;
}

std::vector<fs::path> scenario_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

/// A bundled scenario name or a path to a config file.
fs::path resolve(const std::string& arg) {
    if (fs::exists(arg)) return arg;
    const fs::path bundled = scenario_dir() / (arg + ".json");
    if (fs::exists(bundled)) return bundled;
    throw std::runtime_error("no such config or bundled scenario: " + arg);
}

void print_result(std::ostream& out, const RunResult& r) {
    for (const auto& c : r.checks)
        out << "  [" << (c.pass ? "PASS" : "FAIL") << "] " << c.name << ": " << c.detail << '\n';
    out << r.name << ": " << (r.ok() ? "ok" : "checks failed") << " -> " << r.out_dir.string() << '\n';
}

int cmd_run(const std::string& config, const std::string& out, std::optional<double> step, bool plots) {
    const Scenario sc = load_scenario(resolve(config));
    const RunResult r = run_scenario(sc, {output_dir(sc.name, out), step, plots});
    print_result(std::cout, r);
    return r.ok() ? kExitOk : kExitCheckFailed;
}

int cmd_list() {
    for (const auto& file : scenario_files(scenario_dir())) {
        try {
            const Scenario sc = load_scenario(file);
            std::cout << sc.name << "\n  covers: " << sc.covers << "\n  " << sc.description << '\n';
        } catch (const std::exception& e) {
            std::cerr << e.what() << '\n';
            return kExitError;
        }
    }
    return kExitOk;
}

int cmd_batch(const std::string& dir, const std::string& out, std::optional<double> step, bool plots) {
    const auto files = scenario_files(dir);
    if (files.empty()) throw std::runtime_error("no .json configs in " + dir);
    std::mutex io;
    std::vector<std::future<int>> jobs;
    for (const auto& file : files) {
        jobs.push_back(std::async(std::launch::async, [&, file] {
            try {
                const Scenario sc = load_scenario(file);
                const fs::path dest = out.empty() ? output_dir(sc.name, "") : fs::path(out) / sc.name;
                const RunResult r = run_scenario(sc, {dest, step, plots});
                const std::lock_guard lock(io);
                print_result(std::cout, r);
                return r.ok() ? kExitOk : kExitCheckFailed;
            } catch (const std::exception& e) {
                const std::lock_guard lock(io);
                std::cerr << "error: " << e.what() << '\n';
                return kExitError;
            }
        }));
    }
    int status = kExitOk;
    for (auto& j : jobs) {
        const int s = j.get();
        if (s == kExitError || status == kExitError) status = kExitError;
        else if (s == kExitCheckFailed) status = kExitCheckFailed;
    }
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed consensus scenario runner"};
    app.require_subcommand(1);

    std::string config, out, dir;
    std::optional<double> step;
    bool no_plots = false;

    auto* run = app.add_subcommand("run", "Run one scenario (bundled name or config path)");
    run->add_option("config", config, "Config JSON or bundled scenario name")->required();
    run->add_option("--out", out, "Output directory");
    run->add_option("--step", step, "Integration step override")->check(CLI::PositiveNumber);
    run->add_flag("--no-plots", no_plots, "Skip SVG output");

    app.add_subcommand("list", "List bundled scenarios");

    auto* batch = app.add_subcommand("batch", "Run every config in a directory concurrently");
    batch->add_option("dir", dir, "Directory of config JSON files")->required();
    batch->add_option("--out", out, "Output root (one subdirectory per scenario)");
    batch->add_option("--step", step, "Integration step override")->check(CLI::PositiveNumber);
    batch->add_flag("--no-plots", no_plots, "Skip SVG output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config, out, step, !no_plots);
        if (batch->parsed()) return cmd_batch(dir, out, step, !no_plots);
        return cmd_list();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
