// capsim: run one scenario or a sweep and write summaries, series and tables.

#include "capsim/config_io.hpp"
#include "capsim/sweep.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#ifndef CAPSIM_SHARE_DIR
#define CAPSIM_SHARE_DIR "."
#endif

namespace fs = std::filesystem;
using namespace capsim;

int main(int argc, char** argv) {
    CLI::App app{"Chemical sensors among red blood cells in a capillary"};

    std::string config_path, out_dir, reference;
    std::optional<int> scenario;
    std::optional<double> resolution;
    std::uint64_t seed = 1;
    bool sweep = false, no_cells = false, resume = false, overwrite = false, no_reference = false;

    app.add_option("--config", config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_flag("--sweep", sweep, "run every point of the config's sweep axes");
    app.add_option("--scenario", scenario, "1 = wall band, 2 = moving sphere; picks the shipped config when --config is absent")
        ->check(CLI::IsMember({1, 2}));
    app.add_flag("--no-cells", no_cells, "empty vessel only");
    app.add_option("--resolution", resolution, "grid spacing in um")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for the sampled counts");
    app.add_flag("--resume", resume, "skip sweep points that already finished");
    app.add_flag("--overwrite", overwrite, "clear a non-empty output directory");
    app.add_option("--reference", reference, "reference table csv for the relative-difference columns")
        ->check(CLI::ExistingFile);
    app.add_flag("--no-reference", no_reference, "omit the reference columns");
    CLI11_PARSE(app, argc, argv);

    if (config_path.empty()) {
        if (!scenario) {
            std::cerr << "error: give --config or --scenario\n";
            return 2;
        }
        config_path = std::string(CAPSIM_SHARE_DIR) + "/configs/scenario" + std::to_string(*scenario) + ".cfg";
    }
    if (reference.empty() && !no_reference) {
        const std::string bundled = std::string(CAPSIM_SHARE_DIR) + "/data/reference_tables.csv";
        if (fs::exists(bundled)) reference = bundled;
    }
    if (no_reference) reference.clear();

    std::vector<SweepPoint> points;
    try {
        ConfigFile file = load_config_file(config_path);
        SimulationConfig& base = file.config;
        if (scenario && int(base.scenario.scenario) != *scenario) {
            std::cerr << "error: --scenario " << *scenario << " does not match scenario in " << config_path << '\n';
            return 2;
        }
        if (resolution) base.numerics.grid_spacing = *resolution * 1e-6;
        if (no_cells) {
            base.scenario.with_cells = false;
            file.sweep.cells = {false};
        }
        base = validate(base);
        points = sweep ? expand_sweep(base, file.sweep) : expand_sweep(base, SweepAxes{});
    } catch (const ConfigError& e) {
        std::cerr << "config error in " << config_path << ":\n";
        for (const auto& p : e.problems()) std::cerr << "  " << p << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error in " << config_path << ": " << e.what() << '\n';
        return 2;
    }

    RunOptions options;
    options.out = out_dir;
    options.seed = seed;
    options.resume = resume;
    options.overwrite = overwrite;
    options.workers = worker_count(1);
    options.reference = reference;
    try {
        prepare_output(options);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    const auto outcomes = run_sweep(points, options);
    int failed = 0, skipped = 0;
    for (const auto& o : outcomes) {
        failed += !o.ok;
        skipped += o.skipped;
    }
    std::cerr << points.size() << " point(s), " << skipped << " resumed, " << failed << " failed\n";
    for (const auto& o : outcomes)
        if (!o.ok) std::cerr << "  " << o.name << ": " << o.error << '\n';
    return failed ? 1 : 0;
}
