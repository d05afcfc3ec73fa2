#pragma once

// Staggered axisymmetric (z, r) grid over a vessel segment.
//
// Pressure and concentration live at volume centres; axial velocities on
// z-faces and radial velocities on r-faces. Volume (i, j) spans
// [z_begin + i dz, z_begin + (i+1) dz] x [j dr, (j+1) dr]. z-face i sits at
// z_begin + i dz (i = 0..nz); r-face jf at jf dr (jf = 0..nr, 0 = axis,
// nr = wall).
//
// Each volume carries a cut classification from subsampling (fluid
// fraction, face apertures). The solvers run on the centre-classified
// "active" set: a volume is active when its centre is fluid and it shares at
// least one open face with another active volume; the active set is the
// largest face-connected component.

#include "capsim/cell_geometry.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace capsim {

struct Sphere {
    double center = 0;  // axial position of the centre (on the axis)
    double radius = 0;
};

// Solid bodies inside a cylindrical vessel segment.
struct VesselGeometry {
    double radius = 0;
    double z_begin = 0;
    double length = 0;
    bool periodic = true;
    std::optional<CellTrain> cells;
    std::optional<Sphere> sphere;

    int cell_count() const { return cells ? static_cast<int>(cells->fronts.size()) : 0; }
    // Body index of the sphere (after all cells), or -1.
    int sphere_index() const { return sphere ? cell_count() : -1; }
    int body_count() const { return cell_count() + (sphere ? 1 : 0); }
    // Body containing (z, r): cell index, sphere_index(), or -1 for fluid.
    int body_at(double z, double r) const;
    bool solid(double z, double r) const { return body_at(z, r) >= 0; }
};

enum class VolumeClass : std::uint8_t { Fluid = 0, Solid = 1, Cut = 2 };

class AxiGrid {
public:
    int nz = 0;
    int nr = 0;
    double dz = 0;
    double dr = 0;
    double z_begin = 0;
    double length = 0;
    double radius = 0;
    VesselGeometry geometry;

    std::vector<VolumeClass> cls;          // nz * nr
    std::vector<double> fluid_fraction;    // nz * nr
    std::vector<double> aperture_z;        // (nz + 1) * nr
    std::vector<double> aperture_r;        // nz * (nr + 1)
    std::vector<int> owner;                // body at the volume centre, -1 fluid
    std::vector<std::uint8_t> active;      // nz * nr
    std::vector<std::uint8_t> open_z;      // (nz + 1) * nr, face nz mirrors face 0
    std::vector<std::uint8_t> open_r;      // nz * (nr + 1)

    int vol(int i, int j) const { return i * nr + j; }
    int zface(int i, int j) const { return i * nr + j; }
    int rface(int i, int jf) const { return i * (nr + 1) + jf; }

    double zc(int i) const { return z_begin + (i + 0.5) * dz; }
    double zf(int i) const { return z_begin + i * dz; }
    double rc(int j) const { return (j + 0.5) * dr; }
    double rf(int jf) const { return jf * dr; }

    // Exact annulus measures (the 2 pi factor is included).
    double volume(int j) const;
    double area_z(int j) const;   // area of a z-face in row j
    double area_r(int jf) const;  // area of an r-face at radius jf dr

    int active_count() const;
    // Classified fluid volume, sum of fluid_fraction * volume.
    double fluid_volume() const;
};

struct GridOptions {
    double spacing = 0.1e-6;   // target dz = dr
    int subsamples = 4;        // per direction, for fractions and apertures
    int min_gap_cells = 6;     // required volumes across the narrowest gap
};

// Grid with nr = round(R / spacing) and nz = round(length / spacing); dz is
// adjusted so nz dz equals the segment length exactly. Throws if the
// narrowest cell-wall gap spans fewer than `min_gap_cells` volumes.
AxiGrid build_grid(const VesselGeometry& geometry, const GridOptions& options);

// `copies` periods of a periodic grid laid end to end (cells replicated).
AxiGrid tile_grid(const AxiGrid& period, int copies);

// Text dump: header line with nz, nr, dz, dr, then one line per radial row
// (wall first) of classification codes 0 = fluid, 1 = solid, 2 = cut.
void write_grid_dump(std::ostream& os, const AxiGrid& grid);

enum class BandKind { AbsorbingSensor, Source };

// A band on the vessel wall moving backwards at `speed` in the comoving
// frame: center(t) = center0 - speed t.
struct BandTrack {
    BandKind kind = BandKind::AbsorbingSensor;
    double center0 = 0;
    double length = 0;
    double smoothing = 0;     // cosine ramp width at each edge
    double speed = 0;
    double coefficient = 0;   // k (m/s) for sensors, K (1/(s m^2)) for sources

    double center(double t) const { return center0 - speed * t; }
};

// 1 inside the band, 0 outside, cosine ramp of width `smoothing` centred on
// each edge.
double band_weight(const BandTrack& track, double z, double t);
// Mean of band_weight over [z_lo, z_hi] (exact).
double band_weight_average(const BandTrack& track, double z_lo, double z_hi, double t);

}  // namespace capsim
