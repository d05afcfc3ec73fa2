#pragma once

// End-to-end runs of the two sensing scenarios and their summary metrics.

#include "capsim/domain_model.hpp"
#include "capsim/stokes_solver.hpp"
#include "capsim/transport_solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace capsim {

struct SensorMetrics {
    // Scenario 1
    double average_rate = 0;               // over the final period, 1/s
    std::vector<double> period_averages;   // one per completed period
    std::vector<double> band_positions;    // band centre relative to a cell slot, m
    std::vector<double> band_forces;       // N
    double band_force_max = 0;
    double band_force_min = 0;
    double band_force_mean = 0;
    double band_force_variation = 0;       // (max - min) / mean

    // Scenario 2
    std::vector<double> distance;          // sensor centre minus source centre, m
    double max_rate = 0;                   // 1/s
    double max_rate_distance = 0;          // m
    double near_source_counts = 0;         // integral of flux dt while |distance| <= window
    double final_flux = 0;                 // 1/s at the end distance

    // Both
    std::vector<double> time;              // s, end of each step
    std::vector<double> flux;              // sensor uptake per step, 1/s
};

struct RunDiagnostics {
    double grid_spacing = 0;
    int nz = 0, nr = 0;
    double dt = 0;
    int steps = 0;
    int periods = 0;
    double period_change = 0;        // last relative change of the period average
    bool converged = false;
    double ledger_closure = 0;       // worst 100-step window
    double pressure_gradient = 0;    // G used for the flow
    double force_residual = 0;       // reference-cell force at G over 6 pi eta v r
    double flow_divergence = 0;      // max volume outflow over v dr^2
    double min_concentration = 0;
    double sensor_surface_concentration = 0;  // scenario 1, band-averaged at the end, over C
    double cell_gap = 0;
    bool gap_clamped = false;
    double seconds = 0;              // wall time
};

struct RunRecord {
    SimulationConfig config;
    DerivedQuantities derived;
    SensorMetrics metrics;
    RunDiagnostics diagnostics;
    std::vector<SeriesRow> series;
};

// Cell shape for the configured speed (or gap override) and targets.
CellShape shape_for(const SimulationConfig& config, GapLookup* gap = nullptr);

// Scenario 1: absorbing band on the wall, fixed inlet concentration, run to
// periodic steady state with a shift by one cell spacing every period.
RunRecord run_scenario1(const SimulationConfig& config);

// Scenario 2: sphere sensor on the axis midway between the central cells, a
// wall source sweeping past it.
RunRecord run_scenario2(const SimulationConfig& config);

RunRecord run(const SimulationConfig& config);

// Per-interval Poisson draws with mean flux[i] * dt[i] (dt may have a single
// entry used for every interval). Deterministic for a given seed.
std::vector<std::int64_t> sample_counts(const std::vector<double>& flux, const std::vector<double>& dt,
                                        std::uint64_t seed);

struct ComparisonRow {
    std::string metric;
    double with_cells = 0;
    double without_cells = 0;
    double relative_difference = 0;  // (without - with) / with
    bool flagged = false;
};

struct ComparisonTable {
    Scenario scenario = Scenario::BandOnWall;
    std::vector<ComparisonRow> rows;
};

// Side-by-side metrics. Throws when the configurations differ in anything
// other than the cell model.
ComparisonTable compare_models(const RunRecord& with_cells, const RunRecord& without_cells,
                               double threshold = 0.5);

}  // namespace capsim
