#pragma once

// Sweep orchestration: expands the sweep axes into points, runs them in a
// bounded worker pool and merges the per-point files into the tables.

#include "capsim/config_io.hpp"
#include "capsim/run_output.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace capsim {

struct SweepPoint {
    std::string name;  // directory name, e.g. s1_cells_v1_D1e-10
    SimulationConfig config;
};

// Cartesian product speed x diffusion x cells, in that nesting order. Axes
// that are empty keep the base config's value.
std::vector<SweepPoint> expand_sweep(const SimulationConfig& base, const SweepAxes& axes);

std::string point_name(const SimulationConfig& config);

struct RunOptions {
    std::filesystem::path out;
    std::uint64_t seed = 1;
    bool resume = false;
    bool overwrite = false;
    int workers = 1;
    std::string reference;  // bundled reference csv, optional
};

struct PointOutcome {
    std::string name;
    bool ok = false;
    bool skipped = false;  // resumed from an earlier run
    std::string error;
    std::vector<TableEntry> entries;
};

// Per-run seed, independent of scheduling order.
std::uint64_t point_seed(std::uint64_t seed, const SimulationConfig& config);

// Writes summary.txt, series.csv, the scenario CSVs and entries.csv into dir.
void write_run_files(const std::filesystem::path& dir, const RunRecord& record, std::uint64_t seed);

// True when dir holds a finished run for exactly this configuration.
bool point_complete(const std::filesystem::path& dir, const SimulationConfig& config);

// Prepares the output directory: refuses a non-empty one unless resume or
// overwrite is set; overwrite clears it.
void prepare_output(const RunOptions& options);

// Runs every point under out/points/<name>, then writes table_band.csv and
// table_sphere.csv into out. Outcomes come back in point order.
std::vector<PointOutcome> run_sweep(const std::vector<SweepPoint>& points, const RunOptions& options);

// Worker count from CAPSIM_WORKERS, falling back to `fallback`.
int worker_count(int fallback);

}  // namespace capsim
