#include "capsim/analytic_baselines.hpp"
#include "capsim/stokes_solver.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>
#include <sstream>

using namespace capsim;
using doctest::Approx;

namespace {

constexpr double R = 3e-6, eta = 1e-3, L = 12.732395447351628e-6;

std::shared_ptr<const AxiGrid> cell_grid(double gap = 0.9e-6, double spacing = 0.1e-6) {
    VesselGeometry geo;
    geo.radius = R;
    geo.length = L;
    geo.cells = build_train(solve_shape(R, gap, 90e-18, 135e-12), L, 1, 0.0);
    GridOptions o;
    o.spacing = spacing;
    return std::make_shared<const AxiGrid>(build_grid(geo, o));
}

std::shared_ptr<const AxiGrid> empty_grid(double length = 2e-6) {
    VesselGeometry geo;
    geo.radius = R;
    geo.length = length;
    return std::make_shared<const AxiGrid>(build_grid(geo, GridOptions{}));
}

}  // namespace

TEST_CASE("poiseuille profile and convergence") {
    const double e1 = oracle::poiseuille_error(0.2e-6);
    const double e2 = oracle::poiseuille_error(0.1e-6);
    const double e3 = oracle::poiseuille_error(0.05e-6);
    CHECK(e2 < 0.01);
    CHECK(std::log2(e1 / e2) > 1.8);
    CHECK(std::log2(e2 / e3) > 1.8);
}

TEST_CASE("poiseuille mean speed") {
    FlowBoundary bc;
    bc.pressure_gradient = poiseuille_gradient(1e-3, eta, R);
    bc.frame = Frame::Lab;
    const auto flow = solve_flow(empty_grid(), eta, bc);
    CHECK(flow.mean_axial_velocity() == Approx(1e-3).epsilon(1e-3));
    CHECK(bc.pressure_gradient == Approx(8.89e5).epsilon(1e-3));
}

TEST_CASE("moving wall without gradient gives plug flow") {
    FlowBoundary bc;
    bc.wall_speed = -1e-3;
    const auto flow = solve_flow(empty_grid(), eta, bc);
    for (int i = 0; i < flow.grid->nz; ++i)
        for (int j = 0; j < flow.grid->nr; ++j) CHECK(flow.uz_at(i, j) == Approx(-1e-3).epsilon(1e-10));
}

TEST_CASE("empty band shear") {
    for (double v : {0.2e-3, 1e-3, 2e-3}) {
        FlowBoundary bc;
        bc.pressure_gradient = poiseuille_gradient(v, eta, R);
        bc.frame = Frame::Lab;
        const auto flow = solve_flow(empty_grid(10e-6), eta, bc);
        const auto f = force_on_band(flow, 5e-6, 2e-6, 0.2e-6);
        CHECK(f.axial_force == Approx(wall_band_shear_force(v, eta, R, 2e-6)).epsilon(0.02));
    }
    FlowBoundary still;
    still.frame = Frame::Lab;
    CHECK(force_on_band(solve_flow(empty_grid(10e-6), eta, still), 5e-6, 2e-6, 0.2e-6).axial_force == 0);
}

TEST_CASE("force on the cell and the zero-force gradient") {
    const StokesSystem sys(cell_grid(), eta);
    FlowBoundary bc;
    bc.wall_speed = -1e-3;
    const auto f0 = force_on_cell(sys.solve(bc), 0);
    // with the wall sliding backwards the fluid drags the cell backwards
    CHECK(f0.axial_force < 0);

    const auto g = find_pressure_gradient(sys, 1e-3, 0);
    CHECK(std::abs(g.residual_force) < 1e-8 * g.force_scale);
    CHECK(g.force_at_zero == Approx(f0.axial_force).epsilon(1e-10));
    CHECK(g.gradient > 0);
    CHECK(g.gradient == Approx(9.1e5).epsilon(0.25));

    const auto g2 = find_pressure_gradient(sys, 2e-3, 0);
    CHECK(std::abs(g2.gradient / g.gradient - 2) < 1e-8);
}

TEST_CASE("global force balance and continuity") {
    const StokesSystem sys(cell_grid(), eta);
    const auto g = find_pressure_gradient(sys, 1e-3, 0);
    const auto fb = global_force_balance(g.flow);
    CHECK(std::abs(fb.relative()) < 1e-10);
    // round-off against the v dr^2 flux scale
    CHECK(g.flow.max_divergence() < 1e-9 * 1e-3 * 1e-14);
    // all z-faces carry the same flux
    const double q0 = g.flow.axial_flux(0);
    for (int i = 1; i < g.flow.grid->nz; i += 17) CHECK(g.flow.axial_flux(i) == Approx(q0).epsilon(1e-9));
}

TEST_CASE("empty vessel has no cell force") {
    FlowBoundary bc;
    const auto flow = solve_flow(empty_grid(), eta, bc);
    CHECK_THROWS(force_on_cell(flow, 0));
}

TEST_CASE("frames and tiling") {
    const auto grid = cell_grid();
    const StokesSystem sys(grid, eta);
    const auto g = find_pressure_gradient(sys, 1e-3, 0);
    const auto lab = shifted_frame(g.flow, 1e-3, Frame::Lab);
    CHECK(lab.wall_speed == Approx(0).scale(1e-3));
    CHECK(lab.mean_axial_velocity() == Approx(g.flow.mean_axial_velocity() + 1e-3));

    auto tiled = std::make_shared<const AxiGrid>(tile_grid(*grid, 2));
    const auto t = tile_flow(g.flow, tiled, 2);
    CHECK(t.uz_at(grid->nz + 5, 3) == g.flow.uz_at(5, 3));
    CHECK(t.axial_flux(grid->nz + 1) == Approx(g.flow.axial_flux(1)));

    std::ostringstream os;
    write_flow_csv(os, g.flow);
    CHECK(os.str().rfind("z_m,r_m,u_z_m_per_s,u_r_m_per_s,p_Pa\n", 0) == 0);
}

TEST_CASE("band force varies as the cell passes") {
    const StokesSystem sys(cell_grid(), eta);
    const auto g = find_pressure_gradient(sys, 1e-3, 0);
    const auto s = band_force_series(g.flow, 0, L, 2e-6, 0.2e-6, 32);
    REQUIRE(s.samples.size() == 32);
    double lo = s.samples[0], hi = s.samples[0];
    for (double f : s.samples) {
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    CHECK(hi > 1.1 * lo);
    // the cell-free value sits between the extremes
    const double empty = wall_band_shear_force(1e-3, eta, R, 2e-6);
    CHECK(hi > empty * 0.8);
}
