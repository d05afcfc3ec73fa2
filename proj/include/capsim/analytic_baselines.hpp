#pragma once

// Closed-form reference quantities for validation and cell-free comparisons.

#include <iosfwd>
#include <string>
#include <vector>

namespace capsim {

struct SimulationConfig;

// Diffusion-limited capture rate of a perfectly absorbing sphere,
// 4 pi D a C (molecules/s).
double absorbing_sphere_rate(double diffusion, double radius, double concentration);

// Shear force on a wall band in Poiseuille flow of mean speed v:
// (4 v eta / R) * (2 pi R l) = 8 pi eta v l.
double wall_band_shear_force(double speed, double viscosity, double vessel_radius,
                             double band_length);

struct BandAreaCount {
    double area = 0;  // 2 pi R l
    int sensors = 0;  // round(2 pi R / l)
};
BandAreaCount band_area_and_count(double vessel_radius, double band_length);

// Radius of the sphere whose surface equals the band area, sqrt(R l / 2).
double area_equivalent_radius(double vessel_radius, double band_length);

// Pressure gradient driving Poiseuille flow of mean speed v: 8 eta v / R^2.
double poiseuille_gradient(double speed, double viscosity, double vessel_radius);

struct BaselineEntry {
    std::string name;
    double value = 0;
    std::string unit;
    std::string formula;
};

struct BaselineReport {
    std::vector<BaselineEntry> entries;
    const BaselineEntry* find(const std::string& name) const;
};

// Every baseline computable from the configuration alone.
BaselineReport baselines_for(const SimulationConfig& config);

void write_baselines(std::ostream& os, const BaselineReport& report);

}  // namespace capsim
