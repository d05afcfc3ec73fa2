#pragma once

// Advection-diffusion of a dilute chemical on a frozen flow field.
//
// Lie splitting per step: explicit upwind advection with the discrete face
// fluxes of the flow, then implicit diffusion with the wall-band and sphere
// Robin terms. Both halves are conservative on the active (staircase) volume
// set, so the flux ledger closes to round-off.
//
// The transport domain is the flow grid with its two ends opened: z_begin is
// the inlet (fixed concentration), z_begin + length the convective outlet.

#include "capsim/axi_grid.hpp"
#include "capsim/stokes_solver.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace capsim {

struct ConcentrationField {
    std::vector<double> c;  // molecules/m^3 per volume; inactive volumes hold 0
    double t = 0;           // s
};

// Rates in molecules/s over one step (or time-averaged over a window).
struct FluxLedger {
    double inflow = 0;      // net inflow across the inlet (advective + diffusive)
    double outflow = 0;     // net advective outflow across the outlet
    double absorption = 0;  // taken up by sensors
    double emission = 0;    // released by sources
    double mass_rate = 0;   // d(mass)/dt
    double dt = 0;

    double residual() const { return inflow + emission - outflow - absorption - mass_rate; }
    double largest_term() const;
};

// Relative closure of the summed ledger over a window of steps.
double ledger_closure(const std::vector<FluxLedger>& steps, std::size_t begin, std::size_t end);

struct TransportSettings {
    double diffusion = 1e-10;        // m^2/s
    double dt = 0;                   // fixed step, s
    double inlet_concentration = 0;  // molecules/m^3
    double sphere_absorption = 0;    // Robin k on the sphere surface (0: insulating)
    bool van_leer = false;
};

// Largest admissible step: advective Courant limit `cfl` on the per-volume
// outflow, and the band translation limit smoothing / (2 band_speed).
double stable_time_step(const FlowField& flow, double cfl, double smoothing, double band_speed);

class TransportSolver {
public:
    TransportSolver(const FlowField& flow, const TransportSettings& settings);

    ConcentrationField zero_field() const;

    // Advances `field` by one step with bands evaluated at t + dt. Absorbing
    // bands enter as a low-rank update of the constant implicit matrix.
    FluxLedger step(ConcentrationField& field, const std::vector<BandTrack>& tracks);

    // Translates the field by `columns` volumes towards +z and fills the
    // vacated inlet columns with `fill`. Requires field.t to be a multiple of
    // `period_time`. Returns the mass change (molecules).
    double shift(ConcentrationField& field, int columns, double fill, double period_time) const;

    // Absorption rate (molecules/s) of a wall band at time t.
    double sensor_flux(const ConcentrationField& field, const BandTrack& track, double t) const;
    // Absorption rate on the sphere surface.
    double sphere_flux(const ConcentrationField& field) const;
    // Band-weighted mean concentration on the wall surface under a sensor.
    double sensor_surface_concentration(const ConcentrationField& field, const BandTrack& track,
                                        double t) const;

    double mass(const ConcentrationField& field) const;
    const AxiGrid& grid() const { return *grid_; }
    double dt() const { return settings_.dt; }

private:
    struct Impl;
    std::shared_ptr<const AxiGrid> grid_;
    TransportSettings settings_;
    std::shared_ptr<Impl> impl_;
};

// CSV snapshot (z, r, c) at volume centres.
void write_concentration_csv(std::ostream& os, const AxiGrid& grid, const ConcentrationField& field);

// One time-series row per step.
struct SeriesRow {
    double t = 0;
    double band_position = 0;
    double sensor_flux = 0;
    FluxLedger ledger;
};
void write_series_csv(std::ostream& os, const std::vector<SeriesRow>& rows);

}  // namespace capsim
