#include "capsim/cell_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace capsim {

namespace {

constexpr double pi = std::numbers::pi;

// Speed (m/s) -> gap (m), 3 um vessel.
constexpr std::array<std::array<double, 2>, 3> kGapTable{{
    {0.2e-3, 0.7e-6},
    {1.0e-3, 0.9e-6},
    {2.0e-3, 1.0e-6},
}};

double circle_offset(double radius, double d) {
    return std::sqrt(std::max(0.0, radius * radius - d * d));
}

}  // namespace

GapLookup gap_for_speed(double speed) {
    if (speed < 0 || std::isnan(speed)) throw std::invalid_argument("cell speed must be >= 0");
    if (speed <= kGapTable.front()[0]) return {kGapTable.front()[1], speed < kGapTable.front()[0]};
    if (speed >= kGapTable.back()[0]) return {kGapTable.back()[1], speed > kGapTable.back()[0]};
    for (std::size_t i = 1; i < kGapTable.size(); ++i) {
        if (speed <= kGapTable[i][0]) {
            const auto& lo = kGapTable[i - 1];
            const auto& hi = kGapTable[i];
            const double t = (speed - lo[0]) / (hi[0] - lo[0]);
            return {lo[1] + t * (hi[1] - lo[1]), false};
        }
    }
    return {kGapTable.back()[1], false};
}

VolumeSurface volume_and_surface(double r, double a, double s) {
    if (!(s > 0) || !(r > 0)) throw std::invalid_argument("shape radii must be positive");
    if (s > r) throw std::invalid_argument("rear radius s must not exceed r");
    const double q = 0.5 * (r - s);
    const double yc = r - q;
    VolumeSurface out;
    // Nose hemisphere + cylinder + rim (Pappus) - dimple hemisphere.
    out.volume = 2.0 / 3.0 * pi * r * r * r + pi * r * r * a + pi * pi * q * q * yc -
                 2.0 / 3.0 * pi * s * s * s;
    out.surface = 2 * pi * r * r + 2 * pi * r * a + 2 * pi * pi * q * yc + 2 * pi * s * s;
    return out;
}

ShapeJacobian volume_surface_jacobian(double r, double /*a*/, double s) {
    const double q = 0.5 * (r - s);
    ShapeJacobian j{};
    j.dV_da = pi * r * r;
    j.dS_da = 2 * pi * r;
    // dq/ds = -1/2
    j.dV_ds = -0.5 * pi * pi * (2 * q * (r - q) - q * q) - 2 * pi * s * s;
    j.dS_ds = -pi * pi * s + 4 * pi * s;
    return j;
}

CellShape make_shape(double r, double a, double s) {
    if (!(a >= 0)) throw std::invalid_argument("straight segment length must be >= 0");
    const auto vs = volume_and_surface(r, a, s);
    CellShape c;
    c.r = r;
    c.a = a;
    c.s = s;
    c.q = 0.5 * (r - s);
    c.total_length = r + a + c.q;
    c.volume = vs.volume;
    c.surface = vs.surface;
    return c;
}

double CellShape::profile_radius(double zeta) const {
    if (zeta < 0 || zeta > total_length) {
        std::ostringstream os;
        os << "profile_radius: offset " << zeta << " outside the cell [0, " << total_length << "]";
        throw std::out_of_range(os.str());
    }
    if (zeta <= r) return circle_offset(r, r - zeta);
    if (zeta <= r + a) return r;
    return (r - q) + circle_offset(q, zeta - (r + a));
}

double CellShape::inner_radius(double zeta) const {
    const double rear = r + a;
    if (zeta <= rear - s) return 0.0;
    if (zeta <= rear) return circle_offset(s, zeta - rear);
    return (r - q) - circle_offset(q, zeta - rear);
}

bool CellShape::contains(double zeta, double y) const {
    if (zeta < 0 || zeta > total_length) return false;
    y = std::abs(y);
    return y <= profile_radius(zeta) && y >= inner_radius(zeta);
}

namespace {

void solve2(const ShapeJacobian& j, double f0, double f1, double& da, double& ds) {
    const double det = j.dV_da * j.dS_ds - j.dV_ds * j.dS_da;
    if (std::abs(det) < 1e-300) throw std::runtime_error("solve_shape: singular Jacobian");
    da = (f0 * j.dS_ds - j.dV_ds * f1) / det;
    ds = (j.dV_da * f1 - f0 * j.dS_da) / det;
}

}  // namespace

CellShape solve_shape(double vessel_radius, double gap, double volume_target,
                      double surface_target) {
    const double r = vessel_radius - gap;
    if (!(r > 0)) throw std::invalid_argument("gap leaves no room for the cell");
    if (!(volume_target > 0) || !(surface_target > 0))
        throw std::invalid_argument("volume and surface targets must be positive");

    // Residuals are evaluated on the analytic continuation for s slightly
    // above r so an exact s = r root is reachable.
    auto residual = [&](double a, double s, double& fv, double& fs) {
        const double q = 0.5 * (r - s);
        const double yc = r - q;
        const double v = 2.0 / 3.0 * pi * r * r * r + pi * r * r * a + pi * pi * q * q * yc -
                         2.0 / 3.0 * pi * s * s * s;
        const double sa = 2 * pi * r * r + 2 * pi * r * a + 2 * pi * pi * q * yc + 2 * pi * s * s;
        fv = (v - volume_target) / volume_target;
        fs = (sa - surface_target) / surface_target;
        return std::hypot(fv, fs);
    };

    double a = volume_target / (pi * r * r);
    double s = 0.5 * r;
    double fv = 0, fs = 0;
    double norm = residual(a, s, fv, fs);
    constexpr int kMaxIter = 200;
    int it = 0;
    for (; it < kMaxIter && norm >= 1e-10; ++it) {
        auto j = volume_surface_jacobian(r, a, s);
        j.dV_da /= volume_target;
        j.dV_ds /= volume_target;
        j.dS_da /= surface_target;
        j.dS_ds /= surface_target;
        double da = 0, ds = 0;
        solve2(j, -fv, -fs, da, ds);
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k, lambda *= 0.5) {
            const double an = a + lambda * da;
            const double sn = s + lambda * ds;
            if (!(sn > 0) || sn > 1.5 * r || an < -r) continue;
            double gv = 0, gs = 0;
            const double nn = residual(an, sn, gv, gs);
            if (nn < norm * (1 - 1e-4 * lambda) || nn < 1e-14) {
                a = an;
                s = sn;
                fv = gv;
                fs = gs;
                norm = nn;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    if (norm >= 1e-10) {
        std::ostringstream os;
        os << "solve_shape: Newton did not converge after " << it
           << " iterations, relative residual " << norm;
        if (s <= 0 || s >= r || a <= 0) os << "; targets infeasible for this gap";
        throw std::runtime_error(os.str());
    }
    if (s > r && s <= r * (1 + 1e-9)) s = r;
    if (!(s > 0) || s > r || !(a > 0)) {
        std::ostringstream os;
        os << "solve_shape: targets infeasible for this gap (root a=" << a << ", s=" << s
           << ", r=" << r << ")";
        throw std::runtime_error(os.str());
    }
    return make_shape(r, a, s);
}

double CurvePiece::length() const {
    if (!is_arc) return std::hypot(end[0] - begin[0], end[1] - begin[1]);
    return radius * std::abs(angle_end - angle_begin);
}

std::array<double, 2> CurvePiece::point(double t) const {
    if (!is_arc) return {begin[0] + t * (end[0] - begin[0]), begin[1] + t * (end[1] - begin[1])};
    const double th = angle_begin + t * (angle_end - angle_begin);
    return {center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)};
}

std::array<double, 2> CurvePiece::tangent(double t) const {
    if (!is_arc) {
        const double l = length();
        return {(end[0] - begin[0]) / l, (end[1] - begin[1]) / l};
    }
    const double th = angle_begin + t * (angle_end - angle_begin);
    const double sgn = angle_end > angle_begin ? 1.0 : -1.0;
    return {-sgn * std::sin(th), sgn * std::cos(th)};
}

std::array<CurvePiece, 4> generating_curve_pieces(const CellShape& c) {
    std::array<CurvePiece, 4> p;
    // Nose.
    p[0].center = {c.r, 0.0};
    p[0].radius = c.r;
    p[0].angle_begin = pi;
    p[0].angle_end = 0.5 * pi;
    // Straight segment.
    p[1].is_arc = false;
    p[1].begin = {c.r, c.r};
    p[1].end = {c.r + c.a, c.r};
    // Rim.
    p[2].center = {c.r + c.a, c.r - c.q};
    p[2].radius = c.q;
    p[2].angle_begin = 0.5 * pi;
    p[2].angle_end = -0.5 * pi;
    // Dimple.
    p[3].center = {c.r + c.a, 0.0};
    p[3].radius = c.s;
    p[3].angle_begin = 0.5 * pi;
    p[3].angle_end = pi;
    for (auto& piece : p) {
        if (!piece.is_arc) continue;
        piece.begin = piece.point(0.0);
        piece.end = piece.point(1.0);
    }
    return p;
}

std::vector<std::array<double, 2>> sample_generating_curve(const CellShape& shape, std::size_t n) {
    if (n < 2) throw std::invalid_argument("need at least two curve samples");
    const auto pieces = generating_curve_pieces(shape);
    std::array<double, 5> cum{};
    for (std::size_t k = 0; k < 4; ++k) cum[k + 1] = cum[k] + pieces[k].length();
    std::vector<std::array<double, 2>> out;
    out.reserve(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sarc = cum[4] * static_cast<double>(i) / static_cast<double>(n - 1);
        while (k < 3 && sarc > cum[k + 1]) ++k;
        const double len = pieces[k].length();
        const double t = len > 0 ? std::clamp((sarc - cum[k]) / len, 0.0, 1.0) : 0.0;
        out.push_back(pieces[k].point(t));
    }
    out.back() = pieces[3].end;
    return out;
}

void write_profile_csv(std::ostream& os, const CellShape& shape, std::size_t n) {
    os << "z_m,y_m\n";
    os.precision(12);
    for (const auto& p : sample_generating_curve(shape, n)) os << p[0] << ',' << p[1] << '\n';
}

int CellTrain::body_at(double z, double y) const {
    // fronts are ascending and bodies do not overlap
    auto it = std::lower_bound(fronts.begin(), fronts.end(), z);
    if (it == fronts.end()) return -1;
    const auto idx = static_cast<int>(it - fronts.begin());
    return shape.contains(*it - z, y) ? idx : -1;
}

CellTrain build_train(const CellShape& shape, double spacing, int n_cells, double domain_start) {
    if (n_cells < 1) throw std::invalid_argument("build_train: need at least one cell");
    if (!(shape.total_length < spacing)) {
        std::ostringstream os;
        os << "build_train: cells overlap (length " << shape.total_length << " >= spacing "
           << spacing << ")";
        throw std::invalid_argument(os.str());
    }
    CellTrain t;
    t.shape = shape;
    t.spacing = spacing;
    t.domain_start = domain_start;
    t.domain_length = spacing * n_cells;
    const double margin = 0.5 * (spacing - shape.total_length);
    for (int k = 0; k < n_cells; ++k)
        t.fronts.push_back(domain_start + k * spacing + margin + shape.total_length);
    return t;
}

}  // namespace capsim
