#include "capsim/domain_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace capsim {

std::string Violation::message() const {
    std::ostringstream os;
    os << field << ": " << constraint << " (got " << value << ")";
    return os.str();
}

namespace {

std::string join_messages(const std::vector<Violation>& v) {
    std::ostringstream os;
    os << v.size() << " configuration error(s)";
    for (const auto& e : v) os << "\n  " << e.message();
    return os.str();
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : std::runtime_error(join_messages(violations)), violations_(std::move(violations)) {}

std::vector<Violation> check(const SimulationConfig& c) {
    std::vector<Violation> out;
    auto need = [&out](bool ok, const char* field, const char* constraint, double value) {
        if (!ok || std::isnan(value)) out.push_back({field, constraint, value});
    };

    need(c.fluid.density > 0, "fluid.density", "density must be > 0", c.fluid.density);
    need(c.fluid.viscosity > 0, "fluid.viscosity", "viscosity must be > 0", c.fluid.viscosity);

    need(c.vessel.radius > 0, "vessel.radius", "radius must be > 0", c.vessel.radius);
    // The empty-vessel model keeps the physical hematocrit: it fixes the
    // shift period L shared with the cell model.
    need(c.vessel.hematocrit > 0 && c.vessel.hematocrit < 1, "vessel.hematocrit",
         c.scenario.with_cells ? "hematocrit must be in (0,1) when cells present"
                               : "hematocrit must be in (0,1)",
         c.vessel.hematocrit);
    need(c.vessel.cell_speed >= 0, "vessel.cell_speed", "cell speed must be >= 0",
         c.vessel.cell_speed);

    need(c.chemical.diffusion > 0, "chemical.diffusion", "diffusion coefficient must be > 0",
         c.chemical.diffusion);

    need(c.cell.volume > 0, "cell.volume", "cell volume must be > 0", c.cell.volume);
    need(c.cell.surface > 0, "cell.surface", "cell surface must be > 0", c.cell.surface);
    if (c.cell.gap) {
        need(*c.cell.gap > 0 && *c.cell.gap < c.vessel.radius, "cell.gap",
             "gap must be in (0, R)", *c.cell.gap);
    }

    const auto& s = c.scenario;
    const auto& sen = s.sensor;
    need(sen.length > 0, "sensor.length", "sensor length must be > 0", sen.length);
    need(sen.absorption_velocity > 0, "sensor.absorption_velocity",
         "absorption velocity k must be > 0", sen.absorption_velocity);
    need(sen.smoothing_width > 0, "sensor.smoothing_width", "smoothing width must be > 0",
         sen.smoothing_width);
    need(sen.smoothing_width < sen.length, "sensor.smoothing_width",
         "w < l violated (smoothing width must be below sensor length)", sen.smoothing_width);
    if (s.with_cells) {
        need(s.n_cells >= 1, "scenario.n_cells", "at least one cell required",
             static_cast<double>(s.n_cells));
    }

    if (s.scenario == Scenario::BandOnWall) {
        need(sen.kind == SensorKind::WallBand, "sensor.kind",
             "scenario 1 requires a wall band sensor", static_cast<double>(sen.kind));
        need(s.inlet_concentration > 0, "scenario.inlet_concentration",
             "scenario 1 requires inlet concentration > 0", s.inlet_concentration);
        need(!s.source.has_value(), "scenario.source", "scenario 1 takes no source", 1.0);
    } else {
        need(sen.kind == SensorKind::MovingSphere, "sensor.kind",
             "scenario 2 requires a moving sphere sensor", static_cast<double>(sen.kind));
        need(s.source.has_value(), "scenario.source", "scenario 2 requires a source", 0.0);
        need(s.inlet_concentration == 0, "scenario.inlet_concentration",
             "scenario 2 requires zero inlet concentration", s.inlet_concentration);
        if (s.source) {
            need(s.source->length > 0, "source.length", "source length must be > 0",
                 s.source->length);
            need(s.source->flux >= 0, "source.flux", "source flux must be >= 0",
                 s.source->flux);
            need(s.source->smoothing_width > 0 && s.source->smoothing_width < s.source->length,
                 "source.smoothing_width", "w < lambda violated", s.source->smoothing_width);
        }
        // The sphere must fit inside the vessel.
        need(sen.length < 2 * c.vessel.radius, "sensor.length",
             "sphere diameter must be below the vessel diameter", sen.length);
    }

    const auto& n = c.numerics;
    need(n.grid_spacing > 0, "numerics.grid_spacing", "grid spacing must be > 0", n.grid_spacing);
    need(n.cfl > 0 && n.cfl <= 1, "numerics.cfl", "cfl must be in (0,1]", n.cfl);
    need(n.subsamples >= 1, "numerics.subsamples", "subsamples must be >= 1",
         static_cast<double>(n.subsamples));
    need(n.source_offset_periods > 0, "numerics.source_offset_periods",
         "source offset must be > 0", n.source_offset_periods);
    need(n.near_window > 0, "numerics.near_window", "near window must be > 0", n.near_window);
    need(n.max_periods >= 1, "numerics.max_periods", "max periods must be >= 1",
         static_cast<double>(n.max_periods));
    need(n.convergence_tol > 0, "numerics.convergence_tol", "tolerance must be > 0",
         n.convergence_tol);
    return out;
}

SimulationConfig validate(const SimulationConfig& config) {
    auto v = check(config);
    if (!v.empty()) throw ValidationError(std::move(v));
    return config;
}

double cell_spacing(double cell_volume, double vessel_radius, double hematocrit) {
    return cell_volume / (std::numbers::pi * vessel_radius * vessel_radius * hematocrit);
}

double downstream_concentration(double source_length, double source_flux, double vessel_radius,
                                double speed, double hematocrit) {
    if (speed <= 0)
        throw std::invalid_argument("downstream concentration undefined at zero speed");
    return 2.0 * source_length * source_flux / (vessel_radius * speed * (1.0 - hematocrit));
}

DerivedQuantities derive(const SimulationConfig& c) {
    DerivedQuantities d;
    const double h = c.vessel.hematocrit;
    d.cell_spacing = cell_spacing(c.cell.volume, c.vessel.radius, h);
    d.reynolds = c.fluid.density * c.vessel.cell_speed * c.vessel.radius / c.fluid.viscosity;
    d.peclet = c.vessel.cell_speed * c.scenario.sensor.length / c.chemical.diffusion;
    if (c.scenario.scenario == Scenario::SphereInFlow && c.scenario.source) {
        const double plasma_h = c.scenario.with_cells ? h : 0.0;
        d.downstream_concentration =
            downstream_concentration(c.scenario.source->length, c.scenario.source->flux,
                                     c.vessel.radius, c.vessel.cell_speed, plasma_h);
    }
    return d;
}

const char* to_string(Scenario s) {
    return s == Scenario::BandOnWall ? "band_on_wall" : "sphere_in_flow";
}

}  // namespace capsim
