#include "capsim/config_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace capsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return errno == 0 && end == t.c_str() + t.size() && std::isfinite(out);
}

bool parse_int(const std::string& text, int& out) {
    double d;
    if (!parse_double(text, d) || d != std::floor(d) || std::abs(d) > 1e9) return false;
    out = static_cast<int>(d);
    return true;
}

bool parse_bool(const std::string& text, bool& out) {
    const std::string t = trim(text);
    if (t == "true" || t == "yes" || t == "1") return out = true, true;
    if (t == "false" || t == "no" || t == "0") return out = false, true;
    return false;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

enum class Need { Always, Scenario1, Scenario2, Optional };

struct Key {
    const char* name;
    Need need;
    // Returns false when the value does not parse.
    std::function<bool(ConfigFile&, const std::string&)> set;
    // Empty when the key is not part of the canonical form for this config.
    std::function<std::string(const SimulationConfig&)> get;
};

template <class F>
Key scaled(const char* name, Need need, double unit, F field) {
    return {name, need,
            [unit, field](ConfigFile& f, const std::string& v) {
                double d;
                if (!parse_double(v, d)) return false;
                field(f.config) = d * unit;
                return true;
            },
            [unit, field](const SimulationConfig& c) {
                return num(field(const_cast<SimulationConfig&>(c)) / unit);
            }};
}

template <class F>
Key integer(const char* name, Need need, F field) {
    return {name, need,
            [field](ConfigFile& f, const std::string& v) {
                int i;
                if (!parse_int(v, i)) return false;
                field(f.config) = i;
                return true;
            },
            [field](const SimulationConfig& c) {
                return std::to_string(field(const_cast<SimulationConfig&>(c)));
            }};
}

template <class F>
Key boolean(const char* name, Need need, F field) {
    return {name, need,
            [field](ConfigFile& f, const std::string& v) {
                bool b;
                if (!parse_bool(v, b)) return false;
                field(f.config) = b;
                return true;
            },
            [field](const SimulationConfig& c) {
                return std::string(field(const_cast<SimulationConfig&>(c)) ? "true" : "false");
            }};
}

SourceSpec& source_of(SimulationConfig& c) {
    if (!c.scenario.source) c.scenario.source = SourceSpec{};
    return *c.scenario.source;
}

template <class F>
Key source_key(const char* name, double unit, F field) {
    return {name, Need::Scenario2,
            [unit, field](ConfigFile& f, const std::string& v) {
                double d;
                if (!parse_double(v, d)) return false;
                field(source_of(f.config)) = d * unit;
                return true;
            },
            [unit, field](const SimulationConfig& c) {
                if (!c.scenario.source) return std::string();
                return num(field(const_cast<SourceSpec&>(*c.scenario.source)) / unit);
            }};
}

Key list_key(const char* name, double unit, std::vector<double> SweepAxes::*member) {
    return {name, Need::Optional,
            [unit, member](ConfigFile& f, const std::string& v) {
                std::vector<double> out;
                for (const auto& item : split_list(v)) {
                    double d;
                    if (!parse_double(item, d)) return false;
                    out.push_back(d * unit);
                }
                f.sweep.*member = out;
                return !out.empty();
            },
            [](const SimulationConfig&) { return std::string(); }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> k = [] {
        std::vector<Key> v;
        v.push_back({"scenario", Need::Always,
                     [](ConfigFile& f, const std::string& s) {
                         int i;
                         if (!parse_int(s, i) || (i != 1 && i != 2)) return false;
                         f.config.scenario.scenario = i == 1 ? Scenario::BandOnWall : Scenario::SphereInFlow;
                         return true;
                     },
                     [](const SimulationConfig& c) {
                         return std::string(c.scenario.scenario == Scenario::BandOnWall ? "1" : "2");
                     }});
        v.push_back(boolean("with_cells", Need::Always, [](SimulationConfig& c) -> bool& { return c.scenario.with_cells; }));
        v.push_back(integer("n_cells", Need::Always, [](SimulationConfig& c) -> int& { return c.scenario.n_cells; }));
        v.push_back(scaled("density_kg_m3", Need::Always, 1.0, [](SimulationConfig& c) -> double& { return c.fluid.density; }));
        v.push_back(scaled("viscosity_pa_s", Need::Always, 1.0, [](SimulationConfig& c) -> double& { return c.fluid.viscosity; }));
        v.push_back(scaled("radius_um", Need::Always, 1e-6, [](SimulationConfig& c) -> double& { return c.vessel.radius; }));
        v.push_back(scaled("hematocrit", Need::Always, 1.0, [](SimulationConfig& c) -> double& { return c.vessel.hematocrit; }));
        v.push_back(scaled("cell_speed_mm_s", Need::Always, 1e-3, [](SimulationConfig& c) -> double& { return c.vessel.cell_speed; }));
        v.push_back(scaled("diffusion_m2_s", Need::Always, 1.0, [](SimulationConfig& c) -> double& { return c.chemical.diffusion; }));
        v.push_back(scaled("cell_volume_um3", Need::Always, 1e-18, [](SimulationConfig& c) -> double& { return c.cell.volume; }));
        v.push_back(scaled("cell_surface_um2", Need::Always, 1e-12, [](SimulationConfig& c) -> double& { return c.cell.surface; }));
        v.push_back({"cell_gap_um", Need::Optional,
                     [](ConfigFile& f, const std::string& s) {
                         double d;
                         if (!parse_double(s, d)) return false;
                         f.config.cell.gap = d * 1e-6;
                         return true;
                     },
                     [](const SimulationConfig& c) { return c.cell.gap ? num(*c.cell.gap / 1e-6) : std::string(); }});
        v.push_back(scaled("sensor_length_um", Need::Always, 1e-6, [](SimulationConfig& c) -> double& { return c.scenario.sensor.length; }));
        v.push_back(scaled("absorption_velocity_m_s", Need::Always, 1.0, [](SimulationConfig& c) -> double& { return c.scenario.sensor.absorption_velocity; }));
        v.push_back(scaled("smoothing_um", Need::Always, 1e-6, [](SimulationConfig& c) -> double& { return c.scenario.sensor.smoothing_width; }));
        v.push_back(scaled("inlet_concentration_per_m3", Need::Scenario1, 1.0, [](SimulationConfig& c) -> double& { return c.scenario.inlet_concentration; }));
        v.push_back(source_key("source_length_um", 1e-6, [](SourceSpec& s) -> double& { return s.length; }));
        v.push_back(source_key("source_flux_per_s_m2", 1.0, [](SourceSpec& s) -> double& { return s.flux; }));
        v.push_back(source_key("source_smoothing_um", 1e-6, [](SourceSpec& s) -> double& { return s.smoothing_width; }));
        v.push_back(scaled("grid_spacing_um", Need::Optional, 1e-6, [](SimulationConfig& c) -> double& { return c.numerics.grid_spacing; }));
        v.push_back(scaled("cfl", Need::Optional, 1.0, [](SimulationConfig& c) -> double& { return c.numerics.cfl; }));
        v.push_back(integer("subsamples", Need::Optional, [](SimulationConfig& c) -> int& { return c.numerics.subsamples; }));
        v.push_back(scaled("source_offset_periods", Need::Optional, 1.0, [](SimulationConfig& c) -> double& { return c.numerics.source_offset_periods; }));
        v.push_back(scaled("end_distance_um", Need::Optional, 1e-6, [](SimulationConfig& c) -> double& { return c.numerics.end_distance; }));
        v.push_back(scaled("near_window_um", Need::Optional, 1e-6, [](SimulationConfig& c) -> double& { return c.numerics.near_window; }));
        v.push_back(integer("max_periods", Need::Optional, [](SimulationConfig& c) -> int& { return c.numerics.max_periods; }));
        v.push_back(scaled("convergence_tol", Need::Optional, 1.0, [](SimulationConfig& c) -> double& { return c.numerics.convergence_tol; }));
        v.push_back(boolean("van_leer", Need::Optional, [](SimulationConfig& c) -> bool& { return c.numerics.van_leer; }));
        v.push_back(list_key("sweep_speeds_mm_s", 1e-3, &SweepAxes::speeds));
        v.push_back(list_key("sweep_diffusion_m2_s", 1.0, &SweepAxes::diffusions));
        v.push_back({"sweep_cells", Need::Optional,
                     [](ConfigFile& f, const std::string& s) {
                         std::vector<bool> out;
                         for (const auto& item : split_list(s)) {
                             bool b;
                             if (!parse_bool(item, b)) return false;
                             out.push_back(b);
                         }
                         f.sweep.cells = out;
                         return !out.empty();
                     },
                     [](const SimulationConfig&) { return std::string(); }});
        return v;
    }();
    return k;
}

std::string join(const std::vector<std::string>& p) {
    std::ostringstream os;
    os << p.size() << " configuration problem(s)";
    for (const auto& s : p) os << "\n  " << s;
    return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join(problems)), problems_(std::move(problems)) {}

ConfigFile parse_config_file(const std::string& text) {
    ConfigFile f;
    f.config.scenario.source.reset();
    std::vector<std::string> problems;
    std::map<std::string, std::string> values;
    std::map<std::string, int> line_of;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (values.count(key)) {
            problems.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            continue;
        }
        values[key] = value;
        line_of[key] = lineno;
    }

    std::set<std::string> known;
    for (const auto& k : keys()) known.insert(k.name);
    for (const auto& [key, value] : values)
        if (!known.count(key))
            problems.push_back("line " + std::to_string(line_of[key]) + ": unknown key '" + key + "'");

    // Scenario first: it decides which keys are required.
    int scenario = 0;
    if (values.count("scenario")) {
        if (!parse_int(values["scenario"], scenario) || (scenario != 1 && scenario != 2)) scenario = 0;
    }
    for (const auto& k : keys()) {
        const auto it = values.find(k.name);
        if (it == values.end()) {
            const bool required = k.need == Need::Always ||
                                  (k.need == Need::Scenario1 && scenario == 1) ||
                                  (k.need == Need::Scenario2 && scenario == 2);
            if (required) problems.push_back(std::string("missing required key '") + k.name + "'");
            continue;
        }
        if ((k.need == Need::Scenario1 && scenario == 2) || (k.need == Need::Scenario2 && scenario == 1)) {
            problems.push_back("line " + std::to_string(line_of[k.name]) + ": key '" + k.name +
                               "' does not apply to scenario " + std::to_string(scenario));
            continue;
        }
        if (!k.set(f, it->second))
            problems.push_back("line " + std::to_string(line_of[k.name]) + ": cannot parse value '" +
                               it->second + "' for key '" + k.name + "'");
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));

    if (scenario == 1) {
        f.config.scenario.sensor.kind = SensorKind::WallBand;
    } else {
        f.config.scenario.sensor.kind = SensorKind::MovingSphere;
        f.config.scenario.inlet_concentration = 0.0;
    }
    f.config = validate(f.config);
    return f;
}

SimulationConfig parse_config(const std::string& text) { return parse_config_file(text).config; }

ConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_file(ss.str());
}

std::string format_config(const SimulationConfig& c) {
    std::ostringstream os;
    for (const auto& k : keys()) {
        if (k.need == Need::Scenario1 && c.scenario.scenario != Scenario::BandOnWall) continue;
        if (k.need == Need::Scenario2 && c.scenario.scenario != Scenario::SphereInFlow) continue;
        const std::string v = k.get(c);
        if (!v.empty()) os << k.name << " = " << v << '\n';
    }
    return os.str();
}

std::uint64_t config_hash(const SimulationConfig& c) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : format_config(c)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hash_hex(std::uint64_t hash) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

}  // namespace capsim
