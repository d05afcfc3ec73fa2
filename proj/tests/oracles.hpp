#pragma once

// Independent checks shared by the unit tests and the acceptance binary.

#include "capsim/cell_geometry.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// Volume as the integral of pi (outer^2 - inner^2) along the axis, split at
// the joins so every piece is smooth inside.
inline double profile_volume(const capsim::CellShape& s) {
    std::vector<double> cuts{0.0, s.r, s.r + s.a - s.s, s.r + s.a, s.total_length};
    std::sort(cuts.begin(), cuts.end());
    boost::math::quadrature::tanh_sinh<double> ts;
    double v = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double lo = std::max(0.0, cuts[k]);
        const double hi = std::min(s.total_length, cuts[k + 1]);
        if (hi - lo < 1e-15 * s.total_length) continue;
        v += ts.integrate([&](double z) {
            const double y0 = s.profile_radius(z), y1 = s.inner_radius(z);
            return pi * (y0 * y0 - y1 * y1);
        }, lo, hi);
    }
    return v;
}

// Surface as 2 pi y ds along the generating curve.
inline double profile_surface(const capsim::CellShape& s) {
    double area = 0;
    for (const auto& piece : capsim::generating_curve_pieces(s)) {
        const double len = piece.length();
        if (len <= 0) continue;
        area += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double t) { return 2 * pi * piece.point(t)[1] * len; }, 0.0, 1.0, 15, 1e-14);
    }
    return area;
}

struct GridMinimum {
    double a = 0, s = 0, residual = std::numeric_limits<double>::infinity();
};

// Coarse search over (a, s) for the smallest relative constraint residual.
inline GridMinimum search_shape(double r, double volume, double surface, int n = 400) {
    GridMinimum best;
    const double a_max = 4 * volume / (pi * r * r);
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            const double a = a_max * i / n;
            const double s = r * j / n;
            const auto vs = capsim::volume_and_surface(r, a, s);
            const double res = std::hypot(vs.volume / volume - 1, vs.surface / surface - 1);
            if (res < best.residual) best = {a, s, res};
        }
    }
    return best;
}

}  // namespace oracle

#include "capsim/stokes_solver.hpp"

#include <memory>

namespace oracle {

// Relative L2 error (area weighted) of the empty-vessel axial velocity
// against u = 2 v (1 - r^2 / R^2).
inline double poiseuille_error(double spacing, double speed = 1e-3) {
    const double R = 3e-6, eta = 1e-3;
    capsim::VesselGeometry geo;
    geo.radius = R;
    geo.length = 20 * spacing;
    capsim::GridOptions opt;
    opt.spacing = spacing;
    auto grid = std::make_shared<const capsim::AxiGrid>(capsim::build_grid(geo, opt));
    capsim::FlowBoundary bc;
    bc.pressure_gradient = 8 * eta * speed / (R * R);
    bc.frame = capsim::Frame::Lab;
    const auto flow = capsim::solve_flow(grid, eta, bc);
    double num = 0, den = 0;
    for (int i = 0; i < grid->nz; ++i)
        for (int j = 0; j < grid->nr; ++j) {
            const double r = grid->rc(j);
            const double exact = 2 * speed * (1 - r * r / (R * R));
            const double w = grid->area_z(j);
            num += w * std::pow(flow.uz[grid->zface(i, j)] - exact, 2);
            den += w * exact * exact;
        }
    return std::sqrt(num / den);
}

}  // namespace oracle
