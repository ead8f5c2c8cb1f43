#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "snaq/commands.h"

using namespace snaq;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void write_outputs(const std::string &dir, const std::vector<OutputFile> &files) {
    std::filesystem::create_directories(dir);
    for (const OutputFile &f : files) {
        std::filesystem::path p = std::filesystem::path(dir) / f.name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << f.content;
        std::cout << p.string() << "\n";
    }
}

int resolve_threads(std::optional<int> flag, int from_config) {
    int t = from_config;
    if (flag) {
        t = *flag;
    } else if (const char *env = std::getenv("SNAQSIM_THREADS")) {
        try {
            t = std::stoi(env);
        } catch (const std::exception &) {
            throw UsageError(std::string("SNAQSIM_THREADS is not an integer: '") + env + "'");
        }
    }
    if (t < 0) throw UsageError("thread count must be nonnegative");
    if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
    return t;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Shuttling-array surface code simulator and resource estimator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<uint64_t> seed, shots;
    std::optional<int> threads;
    std::optional<double> target;
    std::string ler_csv;
    std::vector<std::string> fits;

    app.add_option("--config", config_path, "Experiment config (key = value text)")->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--shots", shots, "Shots per basis");
    app.add_option("--threads", threads, "Worker threads, 0 for all cores (default: SNAQSIM_THREADS)");

    auto *circuit = app.add_subcommand("circuit", "Emit memory-experiment circuits");
    auto *sample = app.add_subcommand("sample", "Estimate logical error rates into ler.csv");
    auto *fit = app.add_subcommand("fit", "Fit the scaling law to an LER csv");
    fit->add_option("--ler", ler_csv, "LER csv from the sample command")->check(CLI::ExistingFile);
    auto *latency = app.add_subcommand("latency", "SE round, separation and speedup tables");
    latency->add_option("--target", target, "Target logical error rate for the speedup table");
    latency->add_option("--fits", fits, "Fit JSON files")->check(CLI::ExistingFile);
    auto *distill = app.add_subcommand("distill", "15-to-1 distillation cost table");
    for (auto *sub : {circuit, sample, fit, latency, distill}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    }

    try {
        ExperimentConfig c = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
        if (seed) c.seed = *seed;
        if (shots) c.shots = *shots;
        if (!out_dir.empty()) c.out_dir = out_dir;
        if (target) c.target = *target;
        if (!ler_csv.empty()) c.ler_csv = ler_csv;
        if (!fits.empty()) c.fits = fits;
        c.threads = resolve_threads(threads, c.threads);

        std::vector<OutputFile> files;
        if (*circuit) files = cmd_circuit(c);
        if (*sample) files = cmd_sample(c);
        if (*fit) files = cmd_fit(c);
        if (*latency) files = cmd_latency(c);
        if (*distill) files = cmd_distill(c);
        write_outputs(c.out_dir, files);
    } catch (const UsageError &e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return 0;
}
