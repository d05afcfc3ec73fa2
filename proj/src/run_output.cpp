#include "capsim/run_output.hpp"

#include "capsim/analytic_baselines.hpp"
#include "capsim/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace capsim {

namespace {

std::string g10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)); }

const char* model_name(bool cells) { return cells ? "cells" : "empty"; }

}  // namespace

void write_header(std::ostream& os, const std::string& hash) {
    os << "# " << kVersion << "\n# config_hash = " << hash << '\n';
}

void write_summary(std::ostream& os, const RunRecord& r) {
    const auto& c = r.config;
    std::istringstream cfg(format_config(c));
    std::string line;
    while (std::getline(cfg, line)) os << "config." << line << '\n';

    os << "derived.cell_spacing_m = " << g10(r.derived.cell_spacing) << '\n';
    os << "derived.reynolds = " << g10(r.derived.reynolds) << '\n';
    os << "derived.peclet = " << g10(r.derived.peclet) << '\n';
    if (r.derived.downstream_concentration)
        os << "derived.downstream_concentration_per_m3 = " << g10(*r.derived.downstream_concentration) << '\n';

    const auto& m = r.metrics;
    if (c.scenario.scenario == Scenario::BandOnWall) {
        os << "metrics.average_rate_per_s = " << g10(m.average_rate) << '\n';
        os << "metrics.max_rate_final_period_per_s = " << g10(m.max_rate) << '\n';
        os << "metrics.band_force_max_N = " << g10(m.band_force_max) << '\n';
        os << "metrics.band_force_min_N = " << g10(m.band_force_min) << '\n';
        os << "metrics.band_force_mean_N = " << g10(m.band_force_mean) << '\n';
        os << "metrics.band_force_variation = " << g10(m.band_force_variation) << '\n';
        os << "metrics.period_averages_per_s =";
        for (std::size_t k = 0; k < m.period_averages.size(); ++k)
            os << (k ? ", " : " ") << g10(m.period_averages[k]);
        os << '\n';
    } else {
        os << "metrics.max_rate_per_s = " << g10(m.max_rate) << '\n';
        os << "metrics.max_rate_distance_m = " << g10(m.max_rate_distance) << '\n';
        os << "metrics.near_source_counts = " << g10(m.near_source_counts) << '\n';
        os << "metrics.final_flux_per_s = " << g10(m.final_flux) << '\n';
    }

    const auto& d = r.diagnostics;
    os << "diagnostics.grid_spacing_m = " << g10(d.grid_spacing) << '\n';
    os << "diagnostics.nz = " << d.nz << '\n';
    os << "diagnostics.nr = " << d.nr << '\n';
    os << "diagnostics.dt_s = " << g10(d.dt) << '\n';
    os << "diagnostics.steps = " << d.steps << '\n';
    if (c.scenario.scenario == Scenario::BandOnWall) {
        os << "diagnostics.periods = " << d.periods << '\n';
        os << "diagnostics.period_change = " << g10(d.period_change) << '\n';
        os << "diagnostics.sensor_surface_concentration_over_C = " << g10(d.sensor_surface_concentration) << '\n';
    }
    os << "diagnostics.converged = " << (d.converged ? "true" : "false") << '\n';
    os << "diagnostics.ledger_closure = " << g10(d.ledger_closure) << '\n';
    os << "diagnostics.pressure_gradient_Pa_per_m = " << g10(d.pressure_gradient) << '\n';
    os << "diagnostics.force_residual = " << g10(d.force_residual) << '\n';
    os << "diagnostics.flow_divergence = " << g10(d.flow_divergence) << '\n';
    os << "diagnostics.min_concentration = " << g10(d.min_concentration) << '\n';
    if (c.scenario.with_cells) {
        os << "diagnostics.cell_gap_m = " << g10(d.cell_gap) << '\n';
        os << "diagnostics.gap_clamped = " << (d.gap_clamped ? "true" : "false") << '\n';
    }
    write_baselines(os, baselines_for(c));
}

void write_band_force_csv(std::ostream& os, const RunRecord& r) {
    os << "band_center_m,force_N\n";
    for (std::size_t k = 0; k < r.metrics.band_forces.size(); ++k)
        os << g10(r.metrics.band_positions[k]) << ',' << g10(r.metrics.band_forces[k]) << '\n';
}

void write_flux_distance_csv(std::ostream& os, const RunRecord& r) {
    os << "t_s,distance_m,flux_per_s\n";
    for (std::size_t k = 0; k < r.metrics.distance.size(); ++k)
        os << g10(r.metrics.time[k]) << ',' << g10(r.metrics.distance[k]) << ','
           << g10(r.metrics.flux[k]) << '\n';
}

void write_counts_csv(std::ostream& os, const RunRecord& r, std::uint64_t seed) {
    const auto counts = sample_counts(r.metrics.flux, {r.diagnostics.dt}, seed);
    os << "t_s,flux_per_s,counts\n";
    for (std::size_t k = 0; k < counts.size(); ++k)
        os << g10(r.metrics.time[k]) << ',' << g10(r.metrics.flux[k]) << ',' << counts[k] << '\n';
}

std::vector<ReferenceValue> parse_reference_csv(const std::string& text) {
    std::vector<ReferenceValue> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ',')) f.push_back(item);
        if (f.size() != 6) throw std::runtime_error("reference csv line " + std::to_string(lineno) + ": expected 6 fields");
        ReferenceValue v;
        v.table = f[0];
        v.quantity = f[1];
        v.model = f[2];
        try {
            v.speed = std::stod(f[3]);
            v.diffusion = std::stod(f[4]);
            v.value = std::stod(f[5]);
        } catch (const std::exception&) {
            throw std::runtime_error("reference csv line " + std::to_string(lineno) + ": bad number");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<ReferenceValue> load_reference_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open reference file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_reference_csv(ss.str());
}

std::vector<TableEntry> table_entries(const RunRecord& r) {
    const auto& c = r.config;
    const double v = c.vessel.cell_speed * 1e3;
    const double D = c.chemical.diffusion;
    const std::string model = model_name(c.scenario.with_cells);
    std::vector<TableEntry> out;
    if (c.scenario.scenario == Scenario::BandOnWall) {
        if (c.scenario.with_cells)
            out.push_back({"band", "pressure_gradient_Pa_per_m", model, v, 0.0, r.diagnostics.pressure_gradient});
        out.push_back({"band", "max_band_force_pN", model, v, 0.0, r.metrics.band_force_max * 1e12});
        out.push_back({"band", "average_rate_per_s", model, v, D, r.metrics.average_rate});
    } else {
        out.push_back({"sphere", "max_rate_per_s", model, v, D, r.metrics.max_rate});
        out.push_back({"sphere", "near_source_counts", model, v, D, r.metrics.near_source_counts});
    }
    return out;
}

std::vector<double> table_speeds(const std::vector<TableEntry>& entries, const std::string& table) {
    std::vector<double> s;
    for (const auto& e : entries)
        if (e.table == table && std::none_of(s.begin(), s.end(), [&](double x) { return close(x, e.speed); }))
            s.push_back(e.speed);
    std::sort(s.begin(), s.end());
    return s;
}

void emit_tables(std::ostream& os, const std::string& table, const std::vector<TableEntry>& entries,
                 const std::vector<ReferenceValue>& reference) {
    static const std::map<std::string, int> order = {
        {"pressure_gradient_Pa_per_m", 0}, {"max_band_force_pN", 1}, {"average_rate_per_s", 2},
        {"max_rate_per_s", 3}, {"near_source_counts", 4}};
    using RowKey = std::tuple<double, int, std::string, std::string>;  // D section, order, model, quantity
    std::map<RowKey, bool> rows;
    std::vector<double> speeds = table_speeds(entries, table);
    auto rank = [](const std::string& q) {
        auto it = order.find(q);
        return it == order.end() ? 99 : it->second;
    };
    for (const auto& e : entries)
        if (e.table == table) rows[{e.diffusion, rank(e.quantity), e.model, e.quantity}] = true;
    const bool with_ref = !reference.empty();
    for (const auto& r : reference) {
        if (r.table != table) continue;
        rows[{r.diffusion, rank(r.quantity), r.model, r.quantity}] = true;
        if (std::none_of(speeds.begin(), speeds.end(), [&](double x) { return close(x, r.speed); }))
            speeds.push_back(r.speed);
    }
    std::sort(speeds.begin(), speeds.end());

    os << "quantity,model,diffusion_m2_s";
    for (double s : speeds) os << ",v=" << g10(s) << "mm/s";
    if (with_ref) {
        for (double s : speeds) os << ",reference v=" << g10(s);
        for (double s : speeds) os << ",rel_diff v=" << g10(s);
    }
    os << '\n';
    for (const auto& [key, unused] : rows) {
        (void)unused;
        const auto& [D, rk, model, quantity] = key;
        (void)rk;
        auto find_value = [&](double s) -> std::optional<double> {
            for (const auto& e : entries)
                if (e.table == table && e.quantity == quantity && e.model == model && close(e.diffusion, D) &&
                    close(e.speed, s))
                    return e.value;
            return std::nullopt;
        };
        auto find_ref = [&](double s) -> std::optional<double> {
            for (const auto& r : reference)
                if (r.table == table && r.quantity == quantity && r.model == model && close(r.diffusion, D) &&
                    close(r.speed, s))
                    return r.value;
            return std::nullopt;
        };
        os << quantity << ',' << model << ',' << (D > 0 ? g10(D) : std::string("-"));
        for (double s : speeds) {
            const auto v = find_value(s);
            os << ',' << (v ? g10(*v) : std::string("NA"));
        }
        if (with_ref) {
            for (double s : speeds) {
                const auto r = find_ref(s);
                os << ',' << (r ? g10(*r) : std::string("NA"));
            }
            for (double s : speeds) {
                const auto v = find_value(s);
                const auto r = find_ref(s);
                os << ',' << (v && r && *r != 0 ? g10((*v - *r) / *r) : std::string("NA"));
            }
        }
        os << '\n';
    }
}

}  // namespace capsim
