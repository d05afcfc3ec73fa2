#include "capsim/stokes_solver.hpp"

#include "capsim/analytic_baselines.hpp"

#include <Eigen/Sparse>
#ifdef CAPSIM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace capsim {

namespace {
constexpr double pi = std::numbers::pi;
constexpr int kWall = -2;
constexpr int kNone = -1;
constexpr double kMinFraction = 1e-3;  // smallest boundary distance, in grid spacings
}  // namespace

// A viscous link from an axial-velocity node to a boundary (body or wall).
struct ZBoundaryLink {
    int face = 0;       // zface index of the node
    double coef = 0;    // A / distance, m
    int target = kNone; // body index, kWall, or kNone
};

struct ClosedZFace {
    int face = 0;
    int left = -1;   // active volume index on the left, or -1
    int right = -1;  // active volume index on the right, or -1
    int body = kNone;
};

struct FlowDiscretization {
    int nz = 0, nr = 0;
    std::vector<int> uz_index;  // per zface (i < nz), -1 when closed
    std::vector<int> ur_index;  // per rface
    std::vector<int> p_index;   // per volume
    int unknowns = 0;
    int pinned_volume = -1;
    std::vector<ZBoundaryLink> z_links;
    std::vector<ClosedZFace> closed_z;
    std::vector<double> body_volume;  // discrete, from closed z-faces
    double unassigned_volume = 0;
    std::vector<double> body_area;
};

namespace {

// Fraction of the segment P->Q that stays in fluid. 1 when Q is fluid.
double boundary_fraction(const VesselGeometry& g, double z0, double r0, double z1, double r1,
                         int* body) {
    const int bq = g.body_at(z1, r1);
    if (bq < 0) {
        *body = kNone;
        return 1.0;
    }
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 48; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g.solid(z0 + mid * (z1 - z0), r0 + mid * (r1 - r0)))
            hi = mid;
        else
            lo = mid;
    }
    *body = g.body_at(z0 + hi * (z1 - z0), r0 + hi * (r1 - r0));
    if (*body < 0) *body = bq;
    return std::max(hi, kMinFraction);
}

int wrap(int i, int n) { return ((i % n) + n) % n; }

using Triplet = Eigen::Triplet<double>;

}  // namespace

struct StokesSystem::Impl {
    double scale = 1;  // length unit used to condition the matrix
#ifdef CAPSIM_HAVE_UMFPACK
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
#else
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
    Eigen::VectorXd rhs_wall;      // per unit wall speed
    Eigen::VectorXd rhs_gradient;  // per unit G
};

int StokesSystem::unknowns() const { return disc_->unknowns; }

StokesSystem::StokesSystem(std::shared_ptr<const AxiGrid> grid, double viscosity)
    : grid_(std::move(grid)), viscosity_(viscosity) {
    if (!grid_) throw std::invalid_argument("StokesSystem: null grid");
    if (!(viscosity > 0)) throw std::invalid_argument("StokesSystem: viscosity must be positive");
    const AxiGrid& g = *grid_;
    if (!g.geometry.periodic) throw std::invalid_argument("StokesSystem: grid must be periodic");
    const int nz = g.nz, nr = g.nr;

    auto disc = std::make_shared<FlowDiscretization>();
    FlowDiscretization& d = *disc;
    d.nz = nz;
    d.nr = nr;
    d.uz_index.assign(static_cast<std::size_t>(nz) * nr, -1);
    d.ur_index.assign(static_cast<std::size_t>(nz) * (nr + 1), -1);
    d.p_index.assign(static_cast<std::size_t>(nz) * nr, -1);
    int n = 0;
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nr; ++j)
            if (g.open_z[g.zface(i, j)]) d.uz_index[g.zface(i, j)] = n++;
        for (int jf = 1; jf < nr; ++jf)
            if (g.open_r[g.rface(i, jf)]) d.ur_index[g.rface(i, jf)] = n++;
        for (int j = 0; j < nr; ++j)
            if (g.active[g.vol(i, j)]) {
                d.p_index[g.vol(i, j)] = n++;
                if (d.pinned_volume < 0) d.pinned_volume = g.vol(i, j);
            }
    }
    d.unknowns = n;
    if (d.pinned_volume < 0) throw std::runtime_error("StokesSystem: no active volumes");

    auto impl = std::make_shared<Impl>();
    const double L0 = g.dr;
    impl->scale = L0;
    impl->rhs_wall = Eigen::VectorXd::Zero(n);
    impl->rhs_gradient = Eigen::VectorXd::Zero(n);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(n) * 8);

    const VesselGeometry& geom = g.geometry;
    const double eta = viscosity_;

    // Axial momentum.
    for (int i = 0; i < nz; ++i) {
        const double z = g.zf(i);
        for (int j = 0; j < nr; ++j) {
            const int row = d.uz_index[g.zface(i, j)];
            if (row < 0) continue;
            const double r = g.rc(j);
            double diag = 0;
            // Axial neighbours.
            for (int s : {-1, 1}) {
                const double c = g.area_z(j) / g.dz;
                const int ni = wrap(i + s, nz);
                const int col = d.uz_index[g.zface(ni, j)];
                if (col >= 0) {
                    diag += c / L0;
                    trip.emplace_back(row, col, -c / L0);
                } else {
                    int body;
                    const double th = boundary_fraction(geom, z, r, z + s * g.dz, r, &body);
                    if (body < 0)  // closed but fluid: the volume beyond is inactive
                        body = g.owner[g.vol(s > 0 ? wrap(i + 1, nz) : wrap(i - 2, nz), j)];
                    const double cb = c / th;
                    diag += cb / L0;
                    d.z_links.push_back({g.zface(i, j), cb, body < 0 ? kNone : body});
                }
            }
            // Radial neighbours.
            if (j + 1 < nr) {
                const double c = g.area_r(j + 1) / g.dr;
                const int col = d.uz_index[g.zface(i, j + 1)];
                if (col >= 0) {
                    diag += c / L0;
                    trip.emplace_back(row, col, -c / L0);
                } else {
                    int body;
                    const double th = boundary_fraction(geom, z, r, z, g.rc(j + 1), &body);
                    if (body < 0) {
                        const int a = g.owner[g.vol(wrap(i - 1, nz), j + 1)];
                        body = a >= 0 ? a : g.owner[g.vol(i, j + 1)];
                    }
                    const double cb = c / th;
                    diag += cb / L0;
                    d.z_links.push_back({g.zface(i, j), cb, body < 0 ? kNone : body});
                }
            } else {
                const double cb = g.area_r(nr) / (0.5 * g.dr);
                diag += cb / L0;
                impl->rhs_wall[row] += cb / L0;
                d.z_links.push_back({g.zface(i, j), cb, kWall});
            }
            if (j > 0) {
                const double c = g.area_r(j) / g.dr;
                const int col = d.uz_index[g.zface(i, j - 1)];
                if (col >= 0) {
                    diag += c / L0;
                    trip.emplace_back(row, col, -c / L0);
                } else {
                    int body;
                    const double th = boundary_fraction(geom, z, r, z, g.rc(j - 1), &body);
                    if (body < 0) {
                        const int a = g.owner[g.vol(wrap(i - 1, nz), j - 1)];
                        body = a >= 0 ? a : g.owner[g.vol(i, j - 1)];
                    }
                    const double cb = c / th;
                    diag += cb / L0;
                    d.z_links.push_back({g.zface(i, j), cb, body < 0 ? kNone : body});
                }
            }
            trip.emplace_back(row, row, diag);
            const double A = g.area_z(j) / (L0 * L0);
            trip.emplace_back(row, d.p_index[g.vol(i, j)], A);
            trip.emplace_back(row, d.p_index[g.vol(wrap(i - 1, nz), j)], -A);
            impl->rhs_gradient[row] = g.area_z(j) * g.dz / (eta * L0);
        }
    }

    // Radial momentum.
    for (int i = 0; i < nz; ++i) {
        const double z = g.zc(i);
        for (int jf = 1; jf < nr; ++jf) {
            const int row = d.ur_index[g.rface(i, jf)];
            if (row < 0) continue;
            const double r = g.rf(jf);
            double diag = 0;
            const double az = 2 * pi * jf * g.dr * g.dr;  // axial face of the radial control volume
            for (int s : {-1, 1}) {
                const double c = az / g.dz;
                const int col = d.ur_index[g.rface(wrap(i + s, nz), jf)];
                if (col >= 0) {
                    diag += c / L0;
                    trip.emplace_back(row, col, -c / L0);
                } else {
                    int body;
                    const double th = boundary_fraction(geom, z, r, z + s * g.dz, r, &body);
                    diag += c / th / L0;
                }
            }
            for (int s : {-1, 1}) {
                const double c = 2 * pi * (jf + 0.5 * s) * g.dr * g.dz / g.dr;
                const int nj = jf + s;
                if (nj == 0 || nj == nr) {
                    diag += c / L0;  // axis or wall node, u_r = 0
                    continue;
                }
                const int col = d.ur_index[g.rface(i, nj)];
                if (col >= 0) {
                    diag += c / L0;
                    trip.emplace_back(row, col, -c / L0);
                } else {
                    int body;
                    const double th = boundary_fraction(geom, z, r, z, g.rf(nj), &body);
                    diag += c / th / L0;
                }
            }
            diag += 2 * pi * g.dz / jf / L0;  // hoop term eta u_r / r^2 over the volume
            trip.emplace_back(row, row, diag);
            const double A = g.area_r(jf) / (L0 * L0);
            trip.emplace_back(row, d.p_index[g.vol(i, jf)], A);
            trip.emplace_back(row, d.p_index[g.vol(i, jf - 1)], -A);
        }
    }

    // Continuity (net outflow), one row replaced by a pressure pin.
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nr; ++j) {
            const int v = g.vol(i, j);
            const int row = d.p_index[v];
            if (row < 0) continue;
            if (v == d.pinned_volume) {
                trip.emplace_back(row, row, 1.0);
                continue;
            }
            const double A = g.area_z(j) / (L0 * L0);
            const int east = d.uz_index[g.zface(wrap(i + 1, nz), j)];
            const int west = d.uz_index[g.zface(i, j)];
            if (east >= 0) trip.emplace_back(row, east, A);
            if (west >= 0) trip.emplace_back(row, west, -A);
            if (j + 1 < nr) {
                const int north = d.ur_index[g.rface(i, j + 1)];
                if (north >= 0) trip.emplace_back(row, north, g.area_r(j + 1) / (L0 * L0));
            }
            if (j > 0) {
                const int south = d.ur_index[g.rface(i, j)];
                if (south >= 0) trip.emplace_back(row, south, -g.area_r(j) / (L0 * L0));
            }
        }
    }

    // Closed z-faces: pressure reactions and discrete body volumes.
    const int nb = geom.body_count();
    d.body_volume.assign(static_cast<std::size_t>(nb), 0.0);
    for (int i = 0; i < nz; ++i) {
        for (int j = 0; j < nr; ++j) {
            if (d.uz_index[g.zface(i, j)] >= 0) continue;
            ClosedZFace cf;
            cf.face = g.zface(i, j);
            const int lv = g.vol(wrap(i - 1, nz), j), rv = g.vol(i, j);
            cf.left = g.active[lv] ? lv : -1;
            cf.right = g.active[rv] ? rv : -1;
            int body = geom.body_at(g.zf(i), g.rc(j));
            if (body < 0) body = !g.active[rv] ? g.owner[rv] : g.owner[lv];
            cf.body = body < 0 ? kNone : body;
            const double vol = g.area_z(j) * g.dz;
            if (cf.body >= 0)
                d.body_volume[cf.body] += vol;
            else
                d.unassigned_volume += vol;
            d.closed_z.push_back(cf);
        }
    }
    d.body_area.assign(static_cast<std::size_t>(nb), 0.0);
    for (int b = 0; b < geom.cell_count(); ++b) d.body_area[b] = geom.cells->shape.surface;
    if (geom.sphere) d.body_area[geom.sphere_index()] = 4 * pi * geom.sphere->radius * geom.sphere->radius;

    Eigen::SparseMatrix<double> M(n, n);
    M.setFromTriplets(trip.begin(), trip.end());
    trip.clear();
    trip.shrink_to_fit();
    M.makeCompressed();
    impl->lu.compute(M);
    if (impl->lu.info() != Eigen::Success)
        throw std::runtime_error("StokesSystem: sparse factorization failed");

    disc_ = std::move(disc);
    impl_ = std::move(impl);
}

FlowField StokesSystem::solve(const FlowBoundary& bc) const {
    const AxiGrid& g = *grid_;
    const FlowDiscretization& d = *disc_;
    const double G_scaled = bc.pressure_gradient;
    Eigen::VectorXd rhs = bc.wall_speed * impl_->rhs_wall + G_scaled * impl_->rhs_gradient;
    rhs[d.p_index[d.pinned_volume]] = 0.0;
    Eigen::VectorXd x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success) throw std::runtime_error("StokesSystem: solve failed");

    FlowField f;
    f.grid = grid_;
    f.discretization = disc_;
    f.viscosity = viscosity_;
    f.pressure_gradient = bc.pressure_gradient;
    f.wall_speed = bc.wall_speed;
    f.frame = bc.frame;
    f.uz.assign(static_cast<std::size_t>(g.nz) * g.nr, 0.0);
    f.ur.assign(static_cast<std::size_t>(g.nz) * (g.nr + 1), 0.0);
    f.p.assign(static_cast<std::size_t>(g.nz) * g.nr, 0.0);
    for (std::size_t k = 0; k < f.uz.size(); ++k)
        if (d.uz_index[k] >= 0) f.uz[k] = x[d.uz_index[k]];
    for (std::size_t k = 0; k < f.ur.size(); ++k)
        if (d.ur_index[k] >= 0) f.ur[k] = x[d.ur_index[k]];
    const double pscale = viscosity_ / impl_->scale;
    for (std::size_t k = 0; k < f.p.size(); ++k)
        if (d.p_index[k] >= 0) f.p[k] = x[d.p_index[k]] * pscale;
    return f;
}

FlowField solve_flow(std::shared_ptr<const AxiGrid> grid, double viscosity, const FlowBoundary& bc) {
    StokesSystem sys(std::move(grid), viscosity);
    return sys.solve(bc);
}

double FlowField::uz_at(int i, int j) const { return uz[grid->zface(wrap(i, grid->nz), j)]; }

double FlowField::axial_flux(int i) const {
    const AxiGrid& g = *grid;
    const int ii = g.geometry.periodic ? wrap(i, g.nz) : std::clamp(i, 0, g.nz - 1);
    double q = 0;
    for (int j = 0; j < g.nr; ++j) q += g.area_z(j) * uz[g.zface(ii, j)];
    return q;
}

double FlowField::mean_axial_velocity() const {
    return axial_flux(0) / (pi * grid->radius * grid->radius);
}

double FlowField::max_divergence() const {
    const AxiGrid& g = *grid;
    double worst = 0;
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            if (!g.active[g.vol(i, j)]) continue;
            const int ie = wrap(i + 1, g.nz);
            double q = g.area_z(j) * (uz[g.zface(ie, j)] - uz[g.zface(i, j)]);
            q += g.area_r(j + 1) * ur[g.rface(i, j + 1)] - g.area_r(j) * ur[g.rface(i, j)];
            worst = std::max(worst, std::abs(q));
        }
    }
    return worst;
}

namespace {

const FlowDiscretization& require_disc(const FlowField& flow) {
    if (!flow.discretization)
        throw std::invalid_argument("flow has no discretization (tiled or shifted copy)");
    return *flow.discretization;
}

}  // namespace

TractionReport force_on_cell(const FlowField& flow, int body) {
    const FlowDiscretization& d = require_disc(flow);
    const AxiGrid& g = *flow.grid;
    const int nb = g.geometry.body_count();
    if (nb == 0) throw std::invalid_argument("force_on_cell: the vessel contains no bodies");
    if (body < 0 || body >= nb) throw std::out_of_range("force_on_cell: body index out of range");
    const double eta = flow.viscosity;
    TractionReport rep;
    for (const auto& l : d.z_links)
        if (l.target == body) rep.viscous_part += eta * l.coef * flow.uz[l.face];
    for (const auto& cf : d.closed_z) {
        if (cf.body != body) continue;
        const int j = cf.face % g.nr;
        double f = 0;
        if (cf.left >= 0) f += flow.p[cf.left];
        if (cf.right >= 0) f -= flow.p[cf.right];
        rep.pressure_part += g.area_z(j) * f;
    }
    rep.pressure_part += flow.pressure_gradient * d.body_volume[body];
    rep.axial_force = rep.viscous_part + rep.pressure_part;
    rep.area = d.body_area[body];
    return rep;
}

double wall_shear(const FlowField& flow, int i) {
    const AxiGrid& g = *flow.grid;
    const int ii = wrap(i, g.nz);
    const int j1 = g.nr - 1, j2 = g.nr - 2;
    const bool o1 = g.open_z[g.zface(ii, j1)];
    const bool o2 = j2 >= 0 && g.open_z[g.zface(ii, j2)];
    const double uw = flow.wall_speed;
    if (o1 && o2) {
        const double u1 = flow.uz[g.zface(ii, j1)], u2 = flow.uz[g.zface(ii, j2)];
        return flow.viscosity * (9 * u1 - u2 - 8 * uw) / (3 * g.dr);
    }
    if (o1) return flow.viscosity * (flow.uz[g.zface(ii, j1)] - uw) / (0.5 * g.dr);
    return 0.0;
}

TractionReport force_on_band(const FlowField& flow, double center, double length,
                             double smoothing) {
    if (!(length > 0)) throw std::invalid_argument("force_on_band: length must be positive");
    const AxiGrid& g = *flow.grid;
    BandTrack band;
    band.length = length;
    band.smoothing = smoothing;
    TractionReport rep;
    const double ring = 2 * pi * g.radius * g.dz;
    for (int i = 0; i < g.nz; ++i) {
        const double z = g.zf(i);
        double w = 0;
        for (int k = -1; k <= 1; ++k) {
            if (k != 0 && !g.geometry.periodic) continue;
            band.center0 = center + k * g.length;
            w += band_weight_average(band, z - 0.5 * g.dz, z + 0.5 * g.dz, 0.0);
        }
        if (w != 0) rep.viscous_part += wall_shear(flow, i) * w * ring;
    }
    rep.axial_force = rep.viscous_part;
    rep.area = 2 * pi * g.radius * length;
    return rep;
}

TractionReport band_force_series(const FlowField& flow, double start, double period,
                                 double length, double smoothing, int samples) {
    if (samples < 1) throw std::invalid_argument("band_force_series: samples must be >= 1");
    TractionReport rep;
    double sum = 0;
    for (int k = 0; k < samples; ++k) {
        const double x = start + period * k / samples;
        const TractionReport one = force_on_band(flow, x, length, smoothing);
        rep.positions.push_back(x);
        rep.samples.push_back(one.axial_force);
        sum += one.axial_force;
        rep.area = one.area;
    }
    rep.axial_force = sum / samples;
    rep.viscous_part = rep.axial_force;
    return rep;
}

double ForceBalance::relative() const {
    const double scale = std::max({std::abs(wall), std::abs(bodies), std::abs(pressure_jump)});
    return scale > 0 ? std::abs(residual) / scale : 0.0;
}

ForceBalance global_force_balance(const FlowField& flow) {
    const FlowDiscretization& d = require_disc(flow);
    const AxiGrid& g = *flow.grid;
    const double eta = flow.viscosity;
    ForceBalance fb;
    for (const auto& l : d.z_links)
        if (l.target == kWall) fb.wall += eta * l.coef * (flow.uz[l.face] - flow.wall_speed);
    for (int b = 0; b < g.geometry.body_count(); ++b) fb.bodies += force_on_cell(flow, b).axial_force;
    double other = 0;
    for (const auto& l : d.z_links)
        if (l.target == kNone) other += eta * l.coef * flow.uz[l.face];
    for (const auto& cf : d.closed_z) {
        if (cf.body != kNone) continue;
        double f = 0;
        if (cf.left >= 0) f += flow.p[cf.left];
        if (cf.right >= 0) f -= flow.p[cf.right];
        other += g.area_z(cf.face % g.nr) * f;
    }
    other += flow.pressure_gradient * d.unassigned_volume;
    fb.pressure_jump = -flow.pressure_gradient * pi * g.radius * g.radius * g.length;
    fb.residual = fb.wall + fb.bodies + other + fb.pressure_jump;
    return fb;
}

PressureGradientResult find_pressure_gradient(const StokesSystem& system, double cell_speed,
                                              int reference_body) {
    const AxiGrid& g = system.grid();
    if (g.geometry.body_count() == 0)
        throw std::invalid_argument("find_pressure_gradient: the vessel contains no bodies");
    if (!(cell_speed > 0)) throw std::invalid_argument("find_pressure_gradient: speed must be positive");
    const double eta = system.viscosity();
    const double probe = poiseuille_gradient(cell_speed, eta, g.radius);
    const FlowField drag = system.solve({-cell_speed, 0.0, Frame::Comoving});
    const FlowField push = system.solve({0.0, probe, Frame::Comoving});
    PressureGradientResult res;
    res.force_at_zero = force_on_cell(drag, reference_body).axial_force;
    res.force_slope = force_on_cell(push, reference_body).axial_force / probe;
    if (!(std::abs(res.force_slope) > 0))
        throw std::runtime_error("find_pressure_gradient: force does not depend on the gradient");
    res.gradient = -res.force_at_zero / res.force_slope;
    res.flow = system.solve({-cell_speed, res.gradient, Frame::Comoving});
    res.residual_force = force_on_cell(res.flow, reference_body).axial_force;
    const int nc = g.geometry.cell_count();
    const double size = reference_body < nc ? g.geometry.cells->shape.r : g.geometry.sphere->radius;
    res.force_scale = 6 * pi * eta * cell_speed * size;
    return res;
}

FlowField shifted_frame(const FlowField& flow, double shift, Frame frame) {
    FlowField f = flow;
    const AxiGrid& g = *flow.grid;
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.nr; ++j)
            if (g.open_z[g.zface(i, j)]) f.uz[g.zface(i, j)] += shift;
    f.wall_speed += shift;
    f.frame = frame;
    f.discretization.reset();
    return f;
}

FlowField tile_flow(const FlowField& period, std::shared_ptr<const AxiGrid> tiled, int copies) {
    const AxiGrid& p = *period.grid;
    if (!tiled || tiled->nz != p.nz * copies || tiled->nr != p.nr)
        throw std::invalid_argument("tile_flow: tiled grid does not match the period");
    FlowField f;
    f.grid = std::move(tiled);
    f.viscosity = period.viscosity;
    f.pressure_gradient = period.pressure_gradient;
    f.wall_speed = period.wall_speed;
    f.frame = period.frame;
    auto rep = [copies](const std::vector<double>& src) {
        std::vector<double> out;
        out.reserve(src.size() * copies);
        for (int c = 0; c < copies; ++c) out.insert(out.end(), src.begin(), src.end());
        return out;
    };
    f.uz = rep(period.uz);
    f.ur = rep(period.ur);
    f.p = rep(period.p);
    return f;
}

void write_flow_csv(std::ostream& os, const FlowField& flow) {
    const AxiGrid& g = *flow.grid;
    os << "z_m,r_m,u_z_m_per_s,u_r_m_per_s,p_Pa\n";
    os.precision(10);
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            const int v = g.vol(i, j);
            const bool act = g.active[v];
            const double uz = act ? 0.5 * (flow.uz_at(i, j) + flow.uz_at(i + 1, j)) : 0.0;
            const double ur = act ? 0.5 * (flow.ur[g.rface(i, j)] + flow.ur[g.rface(i, j + 1)]) : 0.0;
            const double p = act ? flow.p[v] - flow.pressure_gradient * (g.zc(i) - g.z_begin) : 0.0;
            os << g.zc(i) << ',' << g.rc(j) << ',' << uz << ',' << ur << ',' << p << '\n';
        }
    }
}

}  // namespace capsim
