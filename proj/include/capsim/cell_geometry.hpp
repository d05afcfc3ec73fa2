#pragma once

// Rigid axisymmetric red-cell profile.
//
// The generating curve runs from the nose on the axis to the rear on the axis
// and is built from four C1-joined pieces (zeta = axial offset behind the
// nose, y = distance from the axis):
//
//   1. quarter circle of radius r centred on the axis at zeta = r (the nose),
//   2. straight segment at y = r of length a,
//   3. half circle of radius q = (r - s)/2 centred at (r + a, r - q), sweeping
//      round the rear rim from y = r back to y = s,
//   4. quarter circle of radius s centred on the axis at zeta = r + a, curving
//      forward to the axis and leaving a concave dimple behind the cell.
//
// The body is the region enclosed by this curve and the axis.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

namespace capsim {

struct CellShape {
    double r = 0;             // outer radius
    double a = 0;             // straight segment length
    double s = 0;             // rear dimple radius
    double q = 0;             // rim half-circle radius, (r - s)/2
    double total_length = 0;  // r + a + q
    double volume = 0;
    double surface = 0;

    // Outer envelope of the body at offset zeta behind the nose. Throws
    // std::out_of_range outside [0, total_length].
    double profile_radius(double zeta) const;
    // Lower edge of the body: 0 ahead of the dimple, the dimple/rim surface
    // behind it.
    double inner_radius(double zeta) const;
    // Solid test in body coordinates; false outside the axial span.
    bool contains(double zeta, double y) const;
};

// Build a shape from its three free parameters; fills q, total_length,
// volume and surface.
CellShape make_shape(double r, double a, double s);

struct GapLookup {
    double gap = 0;        // m
    bool clamped = false;  // speed was outside the tabulated range
};

// Gap between cell and wall in a 3 um vessel as a function of cell speed
// (m/s); piecewise-linear in the tabulated rows, clamped outside them.
GapLookup gap_for_speed(double speed);

struct VolumeSurface {
    double volume = 0;
    double surface = 0;
};

// Closed-form volume and surface of the solid of revolution. Requires
// 0 < s <= r.
VolumeSurface volume_and_surface(double r, double a, double s);

// Partial derivatives of (V, S) with respect to (a, s).
struct ShapeJacobian {
    double dV_da, dV_ds, dS_da, dS_ds;
};
ShapeJacobian volume_surface_jacobian(double r, double a, double s);

// r = R - gap; (a, s) from damped Newton on the volume/surface constraints.
CellShape solve_shape(double vessel_radius, double gap, double volume_target,
                      double surface_target);

struct CurvePiece {
    bool is_arc = true;
    std::array<double, 2> center{};  // (zeta, y), arcs only
    double radius = 0;
    double angle_begin = 0;          // arcs: polar angle at the start
    double angle_end = 0;
    std::array<double, 2> begin{};   // end points (zeta, y)
    std::array<double, 2> end{};

    double length() const;
    std::array<double, 2> point(double t) const;    // t in [0, 1]
    std::array<double, 2> tangent(double t) const;  // unit tangent along travel
};

std::array<CurvePiece, 4> generating_curve_pieces(const CellShape& shape);

// n >= 2 points sampled uniformly in arc length from the nose to the rear
// axis point, as (zeta, y).
std::vector<std::array<double, 2>> sample_generating_curve(const CellShape& shape, std::size_t n);

// Two-column CSV (z_m,y_m) of the sampled generating curve.
void write_profile_csv(std::ostream& os, const CellShape& shape, std::size_t n);

struct CellTrain {
    CellShape shape;
    double spacing = 0;               // L
    std::vector<double> fronts;       // nose positions, ascending
    double domain_start = 0;
    double domain_length = 0;         // n L

    // Index of the cell whose body contains (z, y), or -1.
    int body_at(double z, double y) const;
};

// n cells at spacing L in [domain_start, domain_start + n L], each centred in
// its own period slot. Throws when the cells would overlap.
CellTrain build_train(const CellShape& shape, double spacing, int n_cells,
                      double domain_start = 0.0);

}  // namespace capsim
