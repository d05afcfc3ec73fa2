#pragma once

// Flat "key = value" configuration files. Keys carry their unit as a suffix
// (radius_um, cell_speed_mm_s, ...); values are converted to SI on parse.

#include "capsim/domain_model.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsim {

struct SweepAxes {
    std::vector<double> speeds;      // m/s
    std::vector<double> diffusions;  // m^2/s
    std::vector<bool> cells;         // with_cells values
    bool empty() const { return speeds.empty() && diffusions.empty() && cells.empty(); }
};

struct ConfigFile {
    SimulationConfig config;
    SweepAxes sweep;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> problems);
    const std::vector<std::string>& problems() const { return problems_; }

private:
    std::vector<std::string> problems_;
};

// Parses and validates. Unknown keys, duplicate keys, missing required keys
// and unparsable values are all reported together in one ConfigError;
// invariant violations raise ValidationError.
ConfigFile parse_config_file(const std::string& text);
SimulationConfig parse_config(const std::string& text);
ConfigFile load_config_file(const std::string& path);

// Canonical text form (every key, SI values converted back to file units,
// round-trip precision). parse_config(format_config(c)) reproduces c.
std::string format_config(const SimulationConfig& config);

// 64-bit FNV-1a of the canonical text.
std::uint64_t config_hash(const SimulationConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace capsim
