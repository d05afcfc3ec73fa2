#include "capsim/axi_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace capsim {

namespace {
constexpr double pi = std::numbers::pi;
}

int VesselGeometry::body_at(double z, double r) const {
    if (r > radius) return -1;
    auto probe = [&](double zz) -> int {
        if (cells) {
            const int k = cells->body_at(zz, r);
            if (k >= 0) return k;
        }
        if (sphere) {
            const double dzs = zz - sphere->center;
            if (dzs * dzs + r * r <= sphere->radius * sphere->radius) return cell_count();
        }
        return -1;
    };
    int b = probe(z);
    if (b >= 0 || !periodic) return b;
    b = probe(z - length);
    if (b >= 0) return b;
    return probe(z + length);
}

double AxiGrid::volume(int j) const { return pi * (2 * j + 1) * dr * dr * dz; }
double AxiGrid::area_z(int j) const { return pi * (2 * j + 1) * dr * dr; }
double AxiGrid::area_r(int jf) const { return 2 * pi * jf * dr * dz; }

int AxiGrid::active_count() const {
    return static_cast<int>(std::count(active.begin(), active.end(), std::uint8_t{1}));
}

double AxiGrid::fluid_volume() const {
    double v = 0;
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nr; ++j) v += fluid_fraction[vol(i, j)] * volume(j);
    return v;
}

namespace {

// Recompute open faces from the active set and the face midpoints.
void derive_faces(AxiGrid& g, const std::vector<std::uint8_t>& mid_fluid_z,
                  const std::vector<std::uint8_t>& mid_fluid_r) {
    for (int i = 0; i <= g.nz; ++i) {
        const int left = (i == 0) ? g.nz - 1 : i - 1;
        const int right = (i == g.nz) ? 0 : i;
        for (int j = 0; j < g.nr; ++j) {
            const bool ok = g.active[g.vol(left, j)] && g.active[g.vol(right, j)] &&
                            mid_fluid_z[g.zface(i, j)];
            g.open_z[g.zface(i, j)] = ok ? 1 : 0;
        }
    }
    for (int i = 0; i < g.nz; ++i) {
        for (int jf = 0; jf <= g.nr; ++jf) {
            bool ok = false;
            if (jf > 0 && jf < g.nr)
                ok = g.active[g.vol(i, jf - 1)] && g.active[g.vol(i, jf)] &&
                     mid_fluid_r[g.rface(i, jf)];
            g.open_r[g.rface(i, jf)] = ok ? 1 : 0;
        }
    }
}

}  // namespace

AxiGrid build_grid(const VesselGeometry& geom, const GridOptions& opt) {
    if (!(geom.radius > 0) || !(geom.length > 0))
        throw std::invalid_argument("build_grid: vessel radius and length must be positive");
    if (!(opt.spacing > 0)) throw std::invalid_argument("build_grid: spacing must be positive");
    AxiGrid g;
    g.geometry = geom;
    g.radius = geom.radius;
    g.z_begin = geom.z_begin;
    g.length = geom.length;
    g.nr = std::max(1, static_cast<int>(std::lround(geom.radius / opt.spacing)));
    g.nz = std::max(1, static_cast<int>(std::lround(geom.length / opt.spacing)));
    g.dr = geom.radius / g.nr;
    g.dz = geom.length / g.nz;

    if (geom.cells) {
        const double gap = geom.radius - geom.cells->shape.r;
        if (gap / g.dr < opt.min_gap_cells - 1e-9) {
            std::ostringstream os;
            os << "build_grid: resolution too coarse for the gap of " << gap
               << " m; requires dr <= " << gap / opt.min_gap_cells << " m (have " << g.dr << ")";
            throw std::invalid_argument(os.str());
        }
    }

    const int nz = g.nz, nr = g.nr;
    const int ns = std::max(1, opt.subsamples);
    g.cls.assign(static_cast<std::size_t>(nz) * nr, VolumeClass::Fluid);
    g.fluid_fraction.assign(static_cast<std::size_t>(nz) * nr, 1.0);
    g.owner.assign(static_cast<std::size_t>(nz) * nr, -1);
    g.aperture_z.assign(static_cast<std::size_t>(nz + 1) * nr, 1.0);
    g.aperture_r.assign(static_cast<std::size_t>(nz) * (nr + 1), 1.0);
    g.active.assign(static_cast<std::size_t>(nz) * nr, 0);
    g.open_z.assign(static_cast<std::size_t>(nz + 1) * nr, 0);
    g.open_r.assign(static_cast<std::size_t>(nz) * (nr + 1), 0);

    std::vector<std::uint8_t> mid_z(static_cast<std::size_t>(nz + 1) * nr, 1);
    std::vector<std::uint8_t> mid_r(static_cast<std::size_t>(nz) * (nr + 1), 1);

    // Volumes: centre owner and subsampled fluid fraction (area-weighted by r).
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nr; ++j) {
            const int v = g.vol(i, j);
            g.owner[v] = geom.body_at(g.zc(i), g.rc(j));
            double wsum = 0, wfluid = 0;
            for (int a = 0; a < ns; ++a) {
                const double z = g.zf(i) + (a + 0.5) * g.dz / ns;
                for (int b = 0; b < ns; ++b) {
                    const double r = g.rf(j) + (b + 0.5) * g.dr / ns;
                    wsum += r;
                    if (!geom.solid(z, r)) wfluid += r;
                }
            }
            const double f = wfluid / wsum;
            g.fluid_fraction[v] = f;
            g.cls[v] = f >= 1.0 ? VolumeClass::Fluid
                               : (f <= 0.0 ? VolumeClass::Solid : VolumeClass::Cut);
        }
    }
    // Apertures.
    for (int i = 0; i <= nz; ++i) {
        for (int j = 0; j < nr; ++j) {
            double wsum = 0, wfluid = 0;
            for (int b = 0; b < ns; ++b) {
                const double r = g.rf(j) + (b + 0.5) * g.dr / ns;
                wsum += r;
                if (!geom.solid(g.zf(i), r)) wfluid += r;
            }
            g.aperture_z[g.zface(i, j)] = wfluid / wsum;
            mid_z[g.zface(i, j)] = geom.solid(g.zf(i), g.rc(j)) ? 0 : 1;
        }
    }
    for (int i = 0; i < nz; ++i) {
        for (int jf = 0; jf <= nr; ++jf) {
            if (jf == 0 || jf == nr) {
                g.aperture_r[g.rface(i, jf)] = 0.0;  // axis and wall carry no flux
                mid_r[g.rface(i, jf)] = 0;
                continue;
            }
            int fluid = 0;
            for (int a = 0; a < ns; ++a) {
                const double z = g.zf(i) + (a + 0.5) * g.dz / ns;
                if (!geom.solid(z, g.rf(jf))) ++fluid;
            }
            g.aperture_r[g.rface(i, jf)] = static_cast<double>(fluid) / ns;
            mid_r[g.rface(i, jf)] = geom.solid(g.zc(i), g.rf(jf)) ? 0 : 1;
        }
    }
    // Aperture consistency with the volume classification.
    auto fix_aperture = [&](double& ap, VolumeClass c0, VolumeClass c1) {
        if (c0 == VolumeClass::Solid && c1 == VolumeClass::Solid) ap = 0.0;
        if (c0 == VolumeClass::Fluid || c1 == VolumeClass::Fluid) {
            if (c0 != VolumeClass::Solid && c1 != VolumeClass::Solid) ap = 1.0;
        }
    };
    for (int i = 0; i <= nz; ++i) {
        const int left = (i == 0) ? (geom.periodic ? nz - 1 : 0) : i - 1;
        const int right = (i == nz) ? (geom.periodic ? 0 : nz - 1) : i;
        for (int j = 0; j < nr; ++j)
            fix_aperture(g.aperture_z[g.zface(i, j)], g.cls[g.vol(left, j)],
                         g.cls[g.vol(right, j)]);
    }
    for (int i = 0; i < nz; ++i)
        for (int jf = 1; jf < nr; ++jf)
            fix_aperture(g.aperture_r[g.rface(i, jf)], g.cls[g.vol(i, jf - 1)],
                         g.cls[g.vol(i, jf)]);

    // Active set: fluid centres, then prune volumes without open faces and
    // keep the largest connected component.
    for (int v = 0; v < nz * nr; ++v) g.active[v] = g.owner[v] < 0 ? 1 : 0;
    for (int pass = 0; pass < 8; ++pass) {
        derive_faces(g, mid_z, mid_r);
        std::vector<int> comp(static_cast<std::size_t>(nz) * nr, -1);
        std::vector<int> sizes;
        std::vector<int> stack;
        for (int start = 0; start < nz * nr; ++start) {
            if (!g.active[start] || comp[start] >= 0) continue;
            const int id = static_cast<int>(sizes.size());
            sizes.push_back(0);
            stack.push_back(start);
            comp[start] = id;
            while (!stack.empty()) {
                const int v = stack.back();
                stack.pop_back();
                ++sizes[id];
                const int i = v / nr, j = v % nr;
                auto visit = [&](bool open, int ni, int nj) {
                    if (!open) return;
                    const int w = g.vol(ni, nj);
                    if (comp[w] < 0) {
                        comp[w] = id;
                        stack.push_back(w);
                    }
                };
                visit(g.open_z[g.zface(i + 1, j)], (i + 1) % nz, j);
                visit(g.open_z[g.zface(i, j)], (i + nz - 1) % nz, j);
                if (j + 1 < nr) visit(g.open_r[g.rface(i, j + 1)], i, j + 1);
                if (j > 0) visit(g.open_r[g.rface(i, j)], i, j - 1);
            }
        }
        if (sizes.empty()) throw std::runtime_error("build_grid: no fluid volumes");
        const int keep =
            static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        bool changed = false;
        for (int v = 0; v < nz * nr; ++v) {
            if (g.active[v] && (comp[v] != keep || sizes[keep] < 2)) {
                g.active[v] = 0;
                changed = true;
            }
        }
        if (!changed) break;
    }
    derive_faces(g, mid_z, mid_r);
    if (!geom.periodic) {
        // Segment ends are inlet/outlet faces: open wherever the end volume is active.
        for (int j = 0; j < nr; ++j) {
            g.open_z[g.zface(0, j)] = g.active[g.vol(0, j)];
            g.open_z[g.zface(nz, j)] = g.active[g.vol(nz - 1, j)];
        }
    }
    return g;
}

AxiGrid tile_grid(const AxiGrid& p, int copies) {
    if (copies < 1) throw std::invalid_argument("tile_grid: copies must be >= 1");
    if (p.geometry.sphere) throw std::invalid_argument("tile_grid: cannot tile a grid with a sphere");
    AxiGrid g = p;
    g.nz = p.nz * copies;
    g.length = p.length * copies;
    g.geometry.length = g.length;
    if (p.geometry.cells) {
        CellTrain t = *p.geometry.cells;
        const auto base = t.fronts;
        t.fronts.clear();
        for (int c = 0; c < copies; ++c)
            for (double f : base) t.fronts.push_back(f + c * p.length);
        t.domain_length = g.length;
        g.geometry.cells = t;
    }
    const int nr = p.nr;
    const int per_cells = static_cast<int>(p.geometry.cell_count());
    auto tile_vec = [&](const auto& src, auto& dst, int block, int extra) {
        using T = typename std::decay_t<decltype(src)>::value_type;
        dst.assign(static_cast<std::size_t>(g.nz * block + extra), T{});
        for (int c = 0; c < copies; ++c)
            std::copy(src.begin(), src.begin() + p.nz * block, dst.begin() + c * p.nz * block);
        std::copy(src.begin() + p.nz * block, src.end(), dst.begin() + g.nz * block);
    };
    tile_vec(p.cls, g.cls, nr, 0);
    tile_vec(p.fluid_fraction, g.fluid_fraction, nr, 0);
    tile_vec(p.active, g.active, nr, 0);
    tile_vec(p.aperture_r, g.aperture_r, nr + 1, 0);
    tile_vec(p.open_r, g.open_r, nr + 1, 0);
    tile_vec(p.aperture_z, g.aperture_z, nr, nr);
    tile_vec(p.open_z, g.open_z, nr, nr);
    tile_vec(p.owner, g.owner, nr, 0);
    for (int c = 1; c < copies; ++c)
        for (int v = c * p.nz * nr; v < (c + 1) * p.nz * nr; ++v)
            if (g.owner[v] >= 0) g.owner[v] += c * per_cells;
    return g;
}

void write_grid_dump(std::ostream& os, const AxiGrid& g) {
    os << "nz=" << g.nz << " nr=" << g.nr;
    os.precision(12);
    os << " dz=" << g.dz << " dr=" << g.dr << '\n';
    for (int j = g.nr - 1; j >= 0; --j) {
        for (int i = 0; i < g.nz; ++i) os << static_cast<int>(g.cls[g.vol(i, j)]);
        os << '\n';
    }
}

namespace {

// Integral of the unit cosine step of width w centred at 0, from -inf to x.
double step_integral(double x, double w) {
    if (x <= -0.5 * w) return 0.0;
    if (x >= 0.5 * w) return x;
    return 0.5 * (x + 0.5 * w) - w / (2 * pi) * std::sin(pi * (x + 0.5 * w) / w);
}

double step(double x, double w) {
    if (x <= -0.5 * w) return 0.0;
    if (x >= 0.5 * w) return 1.0;
    return 0.5 * (1.0 - std::cos(pi * (x + 0.5 * w) / w));
}

}  // namespace

double band_weight(const BandTrack& b, double z, double t) {
    const double c = b.center(t);
    const double h = 0.5 * b.length;
    return step(z - (c - h), b.smoothing) - step(z - (c + h), b.smoothing);
}

double band_weight_average(const BandTrack& b, double z_lo, double z_hi, double t) {
    if (!(z_hi > z_lo)) return band_weight(b, z_lo, t);
    const double c = b.center(t);
    const double h = 0.5 * b.length;
    const double w = b.smoothing;
    const double left = step_integral(z_hi - (c - h), w) - step_integral(z_lo - (c - h), w);
    const double right = step_integral(z_hi - (c + h), w) - step_integral(z_lo - (c + h), w);
    return (left - right) / (z_hi - z_lo);
}

}  // namespace capsim
