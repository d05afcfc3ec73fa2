#pragma once

// Run artifacts: key = value summaries, CSV series and the published-layout
// comparison tables. Every file starts with a header carrying the code
// version and the configuration hash.

#include "capsim/scenarios.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace capsim {

inline constexpr const char* kVersion = "capsim 0.1.0";

// "# capsim 0.1.0" and "# config_hash = <hex>" lines.
void write_header(std::ostream& os, const std::string& config_hash);

// Flat summary: config, derived quantities, metrics, diagnostics and the
// closed-form baselines. Contains no wall-clock data.
void write_summary(std::ostream& os, const RunRecord& record);

// Band force against band position over one cell period.
void write_band_force_csv(std::ostream& os, const RunRecord& record);

// Scenario 2 flux against sensor-source distance.
void write_flux_distance_csv(std::ostream& os, const RunRecord& record);

// Per-step flux and its Poisson-sampled counts.
void write_counts_csv(std::ostream& os, const RunRecord& record, std::uint64_t seed);

// Bundled reference values: table,quantity,model,speed_mm_s,diffusion_m2_s,value
struct ReferenceValue {
    std::string table;     // "band" or "sphere"
    std::string quantity;  // e.g. average_rate
    std::string model;     // "cells" or "empty"
    double speed = 0;      // mm/s
    double diffusion = 0;  // m^2/s, 0 when the quantity does not depend on it
    double value = 0;
};
std::vector<ReferenceValue> parse_reference_csv(const std::string& text);
std::vector<ReferenceValue> load_reference_csv(const std::string& path);

// One summary value per (table, quantity, model, speed, diffusion) key.
struct TableEntry {
    std::string table, quantity, model;
    double speed = 0;      // mm/s
    double diffusion = 0;  // m^2/s or 0
    double value = 0;
};
std::vector<TableEntry> table_entries(const RunRecord& record);

// Published-layout table: one row per (quantity, model, diffusion), one column
// per speed, plus reference and relative-difference columns when reference
// values are given. Missing points are written as NA.
void emit_tables(std::ostream& os, const std::string& table, const std::vector<TableEntry>& entries,
                 const std::vector<ReferenceValue>& reference);

// Speed columns in the order first seen, sorted ascending.
std::vector<double> table_speeds(const std::vector<TableEntry>& entries, const std::string& table);

}  // namespace capsim
