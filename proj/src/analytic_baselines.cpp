#include "capsim/analytic_baselines.hpp"

#include "capsim/domain_model.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace capsim {

namespace {
constexpr double pi = std::numbers::pi;
}

double absorbing_sphere_rate(double diffusion, double radius, double concentration) {
    return 4 * pi * diffusion * radius * concentration;
}

double wall_band_shear_force(double speed, double viscosity, double vessel_radius,
                             double band_length) {
    const double shear_stress = 4 * speed * viscosity / vessel_radius;
    return shear_stress * 2 * pi * vessel_radius * band_length;
}

BandAreaCount band_area_and_count(double vessel_radius, double band_length) {
    if (!(vessel_radius > 0) || !(band_length > 0))
        throw std::invalid_argument("band_area_and_count: lengths must be positive");
    return {2 * pi * vessel_radius * band_length,
            static_cast<int>(std::lround(2 * pi * vessel_radius / band_length))};
}

double area_equivalent_radius(double vessel_radius, double band_length) {
    return std::sqrt(vessel_radius * band_length / 2);
}

double poiseuille_gradient(double speed, double viscosity, double vessel_radius) {
    return 8 * viscosity * speed / (vessel_radius * vessel_radius);
}

const BaselineEntry* BaselineReport::find(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return &e;
    return nullptr;
}

BaselineReport baselines_for(const SimulationConfig& c) {
    BaselineReport rep;
    const double R = c.vessel.radius;
    const double v = c.vessel.cell_speed;
    const double eta = c.fluid.viscosity;
    const double D = c.chemical.diffusion;
    const double l = c.scenario.sensor.length;
    auto add = [&rep](std::string name, double value, std::string unit, std::string formula) {
        rep.entries.push_back({std::move(name), value, std::move(unit), std::move(formula)});
    };

    const auto band = band_area_and_count(R, l);
    add("band_area", band.area, "m^2", "2*pi*R*l");
    add("band_sensor_count", band.sensors, "1", "round(2*pi*R/l)");
    add("empty_band_shear_force", wall_band_shear_force(v, eta, R, l), "N", "8*pi*eta*v*l");
    add("empty_pressure_gradient", poiseuille_gradient(v, eta, R), "Pa/m", "8*eta*v/R^2");

    if (c.scenario.scenario == Scenario::BandOnWall) {
        const double a_eq = area_equivalent_radius(R, l);
        add("area_equivalent_sphere_rate",
            absorbing_sphere_rate(D, a_eq, c.scenario.inlet_concentration), "1/s",
            "4*pi*D*sqrt(R*l/2)*C");
    } else if (c.scenario.source) {
        const auto& src = *c.scenario.source;
        add("source_output", 2 * pi * R * src.length * src.flux, "1/s", "2*pi*R*lambda*K");
        if (v > 0) {
            const double c_cells =
                downstream_concentration(src.length, src.flux, R, v, c.vessel.hematocrit);
            const double c_empty = downstream_concentration(src.length, src.flux, R, v, 0.0);
            add("downstream_concentration_cells", c_cells, "1/m^3", "2*lambda*K/(R*v*(1-h))");
            add("downstream_concentration_empty", c_empty, "1/m^3", "2*lambda*K/(R*v)");
            add("sphere_rate_downstream_cells", absorbing_sphere_rate(D, l / 2, c_cells), "1/s",
                "4*pi*D*(l/2)*C_ds(h)");
            add("sphere_rate_downstream_empty", absorbing_sphere_rate(D, l / 2, c_empty), "1/s",
                "4*pi*D*(l/2)*C_ds(0)");
        }
    }
    return rep;
}

void write_baselines(std::ostream& os, const BaselineReport& report) {
    for (const auto& e : report.entries)
        os << "baseline." << e.name << " = " << e.value << "  # " << e.unit << ", " << e.formula
           << '\n';
}

}  // namespace capsim
