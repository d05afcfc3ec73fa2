#pragma once

// Steady axisymmetric Stokes flow on a periodic AxiGrid.
//
// Unknowns are MAC-staggered: axial velocity on open z-faces, radial
// velocity on open r-faces, pressure on active volumes. The pressure is split
// as p_total = p - G z with p periodic; G is the imposed mean axial pressure
// gradient (flow is driven towards +z when G > 0). Bodies are at rest; the
// wall moves axially at `wall_speed`. Viscous stencils that cross a body
// surface use the true boundary distance (Shortley-Weller), so the curved
// profile enters the momentum equations beyond the stair-step of the mass
// cells.

#include "capsim/axi_grid.hpp"

#include <iosfwd>
#include <memory>
#include <vector>

namespace capsim {

enum class Frame { Comoving, Lab };

struct FlowBoundary {
    double wall_speed = 0;          // axial wall velocity, m/s
    double pressure_gradient = 0;   // G, Pa/m
    Frame frame = Frame::Comoving;
};

struct FlowDiscretization;  // index maps and boundary links, shared by solutions

struct FlowField {
    std::shared_ptr<const AxiGrid> grid;
    std::shared_ptr<const FlowDiscretization> discretization;  // null for tiled copies
    double viscosity = 0;
    std::vector<double> uz;  // per z-face (i, j), i < nz; closed faces hold 0
    std::vector<double> ur;  // per r-face (i, jf)
    std::vector<double> p;   // periodic pressure part per volume, Pa
    double pressure_gradient = 0;
    double wall_speed = 0;
    Frame frame = Frame::Comoving;

    double uz_at(int i, int j) const;  // i wraps periodically
    // Volume flux through z-face i (m^3/s).
    double axial_flux(int i) const;
    double mean_axial_velocity() const;  // axial_flux(0) / (pi R^2)
    // Largest |net outflow| of an active volume, m^3/s.
    double max_divergence() const;
};

class StokesSystem {
public:
    StokesSystem(std::shared_ptr<const AxiGrid> grid, double viscosity);

    FlowField solve(const FlowBoundary& bc) const;
    const AxiGrid& grid() const { return *grid_; }
    std::shared_ptr<const AxiGrid> grid_ptr() const { return grid_; }
    double viscosity() const { return viscosity_; }
    int unknowns() const;

private:
    struct Impl;
    std::shared_ptr<const AxiGrid> grid_;
    double viscosity_;
    std::shared_ptr<const FlowDiscretization> disc_;
    std::shared_ptr<Impl> impl_;
};

// Convenience: assemble, factor and solve once.
FlowField solve_flow(std::shared_ptr<const AxiGrid> grid, double viscosity, const FlowBoundary& bc);

struct TractionReport {
    double axial_force = 0;    // N, +z
    double viscous_part = 0;
    double pressure_part = 0;  // includes the mean-gradient (G V) term for bodies
    double area = 0;           // m^2
    std::vector<double> positions;  // band series: band centre offsets (m)
    std::vector<double> samples;    // band series: axial force (N)
};

// Axial force exerted by the fluid on body `body` (cells first, then the
// sphere). Throws for an invalid index or a flow without discretization.
TractionReport force_on_cell(const FlowField& flow, int body);

// Shear traction on the wall (Pa, force per area on the wall towards +z) at
// z-face i, from a second-order one-sided wall gradient.
double wall_shear(const FlowField& flow, int i);

// Shear force on a wall band (smoothed edges) centred at `center`. Only the
// viscous shear enters the headline force; the axial pressure force on a
// wall band vanishes identically.
TractionReport force_on_band(const FlowField& flow, double center, double length,
                             double smoothing);

// Band force sampled at `samples` band positions covering one period
// [start, start + period).
TractionReport band_force_series(const FlowField& flow, double start, double period,
                                 double length, double smoothing, int samples);

// Total axial force balance: wall + bodies + G * (unassigned volume) - G pi R^2 Lz,
// relative to the largest term. Zero up to round-off for a converged solve.
struct ForceBalance {
    double wall = 0;
    double bodies = 0;
    double pressure_jump = 0;  // -G pi R^2 Lz
    double residual = 0;
    double relative() const;
};
ForceBalance global_force_balance(const FlowField& flow);

struct PressureGradientResult {
    double gradient = 0;       // G*
    FlowField flow;            // solved at G*
    double force_at_zero = 0;  // reference-body force at G = 0
    double force_slope = 0;    // dF/dG
    double residual_force = 0; // reference-body force at G*
    double force_scale = 0;    // 6 pi eta v r
};

// Zero-net-force gradient for body `reference_body` with the wall moving at
// -v_cell (comoving frame). Uses Stokes linearity: two solves fix the affine
// force law; a third solve at G* verifies it.
PressureGradientResult find_pressure_gradient(const StokesSystem& system, double cell_speed,
                                              int reference_body);

// Lab-frame copy (adds `shift` to every open axial velocity and the wall).
FlowField shifted_frame(const FlowField& flow, double shift, Frame frame);

// `copies` periods of a flow laid end to end on `tiled` (from tile_grid).
FlowField tile_flow(const FlowField& period, std::shared_ptr<const AxiGrid> tiled, int copies);

// CSV (z,r,u_z,u_r,p) at volume centres, face velocities averaged to centres.
void write_flow_csv(std::ostream& os, const FlowField& flow);

}  // namespace capsim
