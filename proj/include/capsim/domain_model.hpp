#pragma once

// Physical, scenario and numerical parameters for one simulation run, plus
// the scalar quantities derived from them. Everything is stored in SI units.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsim {

struct FluidProps {
    double density = 1.0e3;     // kg/m^3
    double viscosity = 1.0e-3;  // Pa s
};

struct VesselConfig {
    double radius = 3.0e-6;     // m
    double hematocrit = 0.25;   // volume fraction occupied by cells
    double cell_speed = 1.0e-3; // m/s
};

struct ChemicalProps {
    double diffusion = 1.0e-10; // m^2/s
};

enum class SensorKind { WallBand, MovingSphere };

struct SensorSpec {
    SensorKind kind = SensorKind::WallBand;
    double length = 2.0e-6;              // band length, or sphere diameter
    double absorption_velocity = 1.0;    // Robin coefficient k, m/s
    double smoothing_width = 0.2e-6;     // edge ramp width, m
};

struct SourceSpec {
    double length = 10.0e-6;          // m
    double flux = 1.0e13;             // molecules / (s m^2)
    double smoothing_width = 0.2e-6;  // m
};

enum class Scenario { BandOnWall = 1, SphereInFlow = 2 };

struct ScenarioConfig {
    Scenario scenario = Scenario::BandOnWall;
    double inlet_concentration = 1.0e17;  // molecules/m^3, scenario 1 only
    bool with_cells = true;
    int n_cells = 10;
    SensorSpec sensor;
    std::optional<SourceSpec> source;
};

// Target volume and surface of the deformed cell. `gap` overrides the
// tabulated speed-to-gap relation when set.
struct CellTargets {
    double volume = 90.0e-18;   // m^3
    double surface = 135.0e-12; // m^2
    std::optional<double> gap;  // m
};

struct NumericsConfig {
    double grid_spacing = 0.1e-6;        // target dr = dz, m
    double cfl = 0.4;                    // advective Courant limit
    int subsamples = 4;                  // per-direction subsamples for cut fractions
    double source_offset_periods = 3.0;  // initial source distance downstream of the sensor, in L
    double end_distance = 75.0e-6;       // scenario 2 stops once the sensor is this far past the source
    double near_window = 25.0e-6;        // half-width of the near-source counting window
    int max_periods = 60;                // scenario 1 step budget, in shift periods
    double convergence_tol = 0.01;       // period-to-period relative change
    bool van_leer = false;               // limited second-order advection
};

struct SimulationConfig {
    FluidProps fluid;
    VesselConfig vessel;
    ChemicalProps chemical;
    CellTargets cell;
    ScenarioConfig scenario;
    NumericsConfig numerics;
};

struct DerivedQuantities {
    double cell_spacing = 0.0;  // L, m
    double reynolds = 0.0;
    double peclet = 0.0;
    std::optional<double> downstream_concentration;  // scenario 2 only
};

struct Violation {
    std::string field;
    std::string constraint;
    double value = 0.0;

    std::string message() const;
};

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Every invariant violation found in `config`, in a stable order.
std::vector<Violation> check(const SimulationConfig& config);

// Returns `config` unchanged when it is valid; throws ValidationError listing
// every violation otherwise.
SimulationConfig validate(const SimulationConfig& config);

DerivedQuantities derive(const SimulationConfig& config);

// L = V / (pi R^2 h)
double cell_spacing(double cell_volume, double vessel_radius, double hematocrit);

// Concentration far downstream of a wall source whose whole output is carried
// by the plasma: C = 2 lambda K / (R v (1 - h)).
double downstream_concentration(double source_length, double source_flux, double vessel_radius,
                                double speed, double hematocrit);

const char* to_string(Scenario s);

}  // namespace capsim
