#include "capsim/transport_solver.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace capsim {

namespace {
constexpr double pi = std::numbers::pi;

// Flux of face (i, j) of the transport domain. Faces 0 and nz are the domain
// ends; the flow is periodic so both use the face-0 velocity.
double z_flux(const FlowField& f, int i, int j) {
    const AxiGrid& g = *f.grid;
    return g.area_z(j) * f.uz[g.zface(i % g.nz, j)];
}

}  // namespace

double FluxLedger::largest_term() const {
    return std::max({std::abs(inflow), std::abs(outflow), std::abs(absorption), std::abs(emission),
                     std::abs(mass_rate)});
}

double ledger_closure(const std::vector<FluxLedger>& steps, std::size_t begin, std::size_t end) {
    FluxLedger sum;
    for (std::size_t k = begin; k < end && k < steps.size(); ++k) {
        const double dt = steps[k].dt;
        sum.inflow += steps[k].inflow * dt;
        sum.outflow += steps[k].outflow * dt;
        sum.absorption += steps[k].absorption * dt;
        sum.emission += steps[k].emission * dt;
        sum.mass_rate += steps[k].mass_rate * dt;
    }
    const double scale = sum.largest_term();
    return scale > 0 ? std::abs(sum.residual()) / scale : 0.0;
}

double stable_time_step(const FlowField& flow, double cfl, double smoothing, double band_speed) {
    const AxiGrid& g = *flow.grid;
    double dt = std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            if (!g.active[g.vol(i, j)]) continue;
            double out = 0;
            const bool west = g.open_z[g.zface(i, j)];
            const bool east = g.open_z[g.zface(i + 1, j)];
            if (west) out += std::max(0.0, -z_flux(flow, i, j));
            if (east) out += std::max(0.0, z_flux(flow, i + 1, j));
            if (g.open_r[g.rface(i, j)]) out += std::max(0.0, -g.area_r(j) * flow.ur[g.rface(i, j)]);
            if (g.open_r[g.rface(i, j + 1)])
                out += std::max(0.0, g.area_r(j + 1) * flow.ur[g.rface(i, j + 1)]);
            if (out > 0) dt = std::min(dt, cfl * g.volume(j) / out);
        }
    }
    if (band_speed > 0 && smoothing > 0) dt = std::min(dt, smoothing / (2 * band_speed));
    if (!std::isfinite(dt)) throw std::invalid_argument("stable_time_step: no flow and no moving band");
    return dt;
}

struct TransportSolver::Impl {
    struct Face {
        int a, b;      // active indices, flux positive from a to b
        int aa, bb;    // next volumes beyond a and b on the same line, or -1
        double flux;   // m^3/s
    };
    struct Boundary {
        int k;
        double flux;   // into the domain at the inlet, out of it at the outlet
        double cond;   // diffusive conductance to the inlet value (inlet only)
    };
    struct Robin {
        int k;
        double cond;
    };

    int n = 0;
    std::vector<int> index;   // volume -> active index
    std::vector<int> volume_of;
    std::vector<double> vol;
    std::vector<Face> faces;
    std::vector<Boundary> inlet, outlet;
    std::vector<int> wall;    // per column: active index of the wall volume, or -1
    double wall_area = 0;     // per column
    double wall_g = 0;        // D / (dr / 2)
    std::vector<Robin> sphere;

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
    std::unordered_map<int, Eigen::VectorXd> columns;  // A0^-1 e_k, filled on demand

    const Eigen::VectorXd& column(int k) {
        auto it = columns.find(k);
        if (it != columns.end()) return it->second;
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[k] = 1.0;
        return columns.emplace(k, ldlt.solve(e)).first->second;
    }

    // Wall columns overlapping a band at time t.
    std::pair<int, int> band_columns(const AxiGrid& g, const BandTrack& b, double t) const {
        const double half = 0.5 * b.length + 0.5 * b.smoothing;
        const double c = b.center(t);
        const int lo = std::max(0, static_cast<int>(std::floor((c - half - g.z_begin) / g.dz)));
        const int hi = std::min(g.nz - 1, static_cast<int>(std::floor((c + half - g.z_begin) / g.dz)));
        return {lo, hi};
    }
};

TransportSolver::TransportSolver(const FlowField& flow, const TransportSettings& s)
    : grid_(flow.grid), settings_(s) {
    if (!grid_) throw std::invalid_argument("TransportSolver: flow has no grid");
    if (!(s.diffusion > 0)) throw std::invalid_argument("TransportSolver: diffusion must be positive");
    if (!(s.dt > 0)) throw std::invalid_argument("TransportSolver: dt must be positive");
    const AxiGrid& g = *grid_;
    const int nz = g.nz, nr = g.nr;
    const double D = s.diffusion;
    auto impl = std::make_shared<Impl>();
    Impl& m = *impl;

    m.index.assign(static_cast<std::size_t>(nz) * nr, -1);
    for (int v = 0; v < nz * nr; ++v) {
        if (!g.active[v]) continue;
        m.index[v] = m.n++;
        m.volume_of.push_back(v);
        m.vol.push_back(g.volume(v % nr));
    }
    const int n = m.n;
    auto idx = [&](int i, int j) -> int {
        if (i < 0 || i >= nz || j < 0 || j >= nr) return -1;
        return m.index[g.vol(i, j)];
    };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 3);
    std::vector<double> diag(n, 0.0);
    for (int k = 0; k < n; ++k) diag[k] = m.vol[k] / s.dt;

    // Interior faces.
    for (int i = 1; i < nz; ++i) {
        for (int j = 0; j < nr; ++j) {
            if (!g.open_z[g.zface(i, j)]) continue;
            const int a = idx(i - 1, j), b = idx(i, j);
            if (a < 0 || b < 0) continue;
            m.faces.push_back({a, b, idx(i - 2, j), idx(i + 1, j), z_flux(flow, i, j)});
            const double c = D * g.area_z(j) / g.dz;
            diag[a] += c;
            diag[b] += c;
            trip.emplace_back(std::max(a, b), std::min(a, b), -c);
        }
    }
    for (int i = 0; i < nz; ++i) {
        for (int jf = 1; jf < nr; ++jf) {
            if (!g.open_r[g.rface(i, jf)]) continue;
            const int a = idx(i, jf - 1), b = idx(i, jf);
            m.faces.push_back({a, b, idx(i, jf - 2), idx(i, jf + 1),
                               g.area_r(jf) * flow.ur[g.rface(i, jf)]});
            const double c = D * g.area_r(jf) / g.dr;
            diag[a] += c;
            diag[b] += c;
            trip.emplace_back(std::max(a, b), std::min(a, b), -c);
        }
    }
    // Domain ends.
    for (int j = 0; j < nr; ++j) {
        const int a = idx(0, j);
        if (a >= 0 && g.open_z[g.zface(0, j)]) {
            const double cond = D * g.area_z(j) / (0.5 * g.dz);
            m.inlet.push_back({a, z_flux(flow, 0, j), cond});
            diag[a] += cond;
        }
        const int b = idx(nz - 1, j);
        if (b >= 0 && g.open_z[g.zface(nz, j)]) m.outlet.push_back({b, z_flux(flow, nz, j), 0.0});
    }
    // Wall volumes.
    m.wall.assign(nz, -1);
    for (int i = 0; i < nz; ++i) m.wall[i] = idx(i, nr - 1);
    m.wall_area = g.area_r(nr);
    m.wall_g = D / (0.5 * g.dr);

    // Sphere surface: Robin faces between active volumes and sphere volumes,
    // with the diffusive distance measured to the true surface.
    const int sph = g.geometry.sphere_index();
    if (sph >= 0 && s.sphere_absorption > 0) {
        const double k = s.sphere_absorption;
        for (int i = 0; i < nz; ++i) {
            for (int j = 0; j < nr; ++j) {
                const int a = idx(i, j);
                if (a < 0) continue;
                const double z0 = g.zc(i), r0 = g.rc(j);
                struct Nb { int i, j; double area, h; };
                const Nb nbs[4] = {{i - 1, j, g.area_z(j), g.dz}, {i + 1, j, g.area_z(j), g.dz},
                                   {i, j - 1, g.area_r(j), g.dr}, {i, j + 1, g.area_r(j + 1), g.dr}};
                for (const auto& nb : nbs) {
                    if (nb.i < 0 || nb.i >= nz || nb.j < 0 || nb.j >= nr) continue;
                    const int v = g.vol(nb.i, nb.j);
                    if (g.active[v] || g.owner[v] != sph) continue;
                    const double z1 = g.zc(nb.i), r1 = g.rc(nb.j);
                    double lo = 0, hi = 1;
                    for (int it = 0; it < 48; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (g.geometry.body_at(z0 + mid * (z1 - z0), r0 + mid * (r1 - r0)) == sph)
                            hi = mid;
                        else
                            lo = mid;
                    }
                    const double dist = std::max(hi, 0.05) * nb.h;
                    const double gg = D / dist;
                    const double cond = nb.area * k * gg / (k + gg);
                    m.sphere.push_back({a, cond});
                    diag[a] += cond;
                }
            }
        }
    }

    for (int k = 0; k < n; ++k) trip.emplace_back(k, k, diag[k]);
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trip.begin(), trip.end());
    m.ldlt.compute(A);
    if (m.ldlt.info() != Eigen::Success)
        throw std::runtime_error("TransportSolver: factorization of the implicit operator failed");
    impl_ = std::move(impl);
}

ConcentrationField TransportSolver::zero_field() const {
    ConcentrationField f;
    f.c.assign(static_cast<std::size_t>(grid_->nz) * grid_->nr, 0.0);
    return f;
}

double TransportSolver::mass(const ConcentrationField& field) const {
    const Impl& m = *impl_;
    double s = 0;
    for (int k = 0; k < m.n; ++k) s += m.vol[k] * field.c[m.volume_of[k]];
    return s;
}

FluxLedger TransportSolver::step(ConcentrationField& field, const std::vector<BandTrack>& tracks) {
    Impl& m = *impl_;
    const AxiGrid& g = *grid_;
    const double dt = settings_.dt;
    const double cin = settings_.inlet_concentration;
    const int n = m.n;
    if (field.c.size() != static_cast<std::size_t>(g.nz) * g.nr)
        throw std::invalid_argument("TransportSolver::step: field size does not match the grid");

    Eigen::VectorXd c(n);
    for (int k = 0; k < n; ++k) c[k] = field.c[m.volume_of[k]];
    const double mass_old = (Eigen::Map<const Eigen::VectorXd>(m.vol.data(), n).array() * c.array()).sum();

    // Explicit advection.
    Eigen::VectorXd dm = Eigen::VectorXd::Zero(n);  // molecules moved per step
    for (const auto& f : m.faces) {
        const bool pos = f.flux >= 0;
        const int up = pos ? f.a : f.b, down = pos ? f.b : f.a, uu = pos ? f.aa : f.bb;
        double cf = c[up];
        if (settings_.van_leer && uu >= 0) {
            const double d1 = c[down] - c[up], d0 = c[up] - c[uu];
            if (d1 * d0 > 0) cf += d1 * d0 / (d1 + d0);  // 0.5 * phi(r) * d1 with van Leer phi
        }
        const double q = f.flux * cf * dt;
        dm[f.a] -= q;
        dm[f.b] += q;
    }
    double adv_in = 0, adv_out = 0;
    for (const auto& b : m.inlet) {
        const double q = b.flux >= 0 ? b.flux * cin : b.flux * c[b.k];
        adv_in += q;
        dm[b.k] += q * dt;
    }
    for (const auto& b : m.outlet) {
        const double q = b.flux * c[b.k];
        adv_out += q;
        dm[b.k] -= q * dt;
    }

    // Implicit part: right-hand side and moving band terms.
    const double t_new = field.t + dt;
    Eigen::VectorXd rhs(n);
    for (int k = 0; k < n; ++k) rhs[k] = (m.vol[k] * c[k] + dm[k]) / dt;
    for (const auto& b : m.inlet) rhs[b.k] += b.cond * cin;

    double emission = 0;
    std::vector<std::pair<int, double>> robin;  // (active index, conductance)
    for (const auto& tr : tracks) {
        const auto [lo, hi] = m.band_columns(g, tr, t_new);
        for (int i = lo; i <= hi; ++i) {
            const int k = m.wall[i];
            if (k < 0) continue;
            const double w = band_weight_average(tr, g.zf(i), g.zf(i + 1), t_new);
            if (w <= 0) continue;
            if (tr.kind == BandKind::Source) {
                const double q = tr.coefficient * w * m.wall_area;
                rhs[k] += q;
                emission += q;
            } else {
                const double kw = tr.coefficient * w;
                const double cond = m.wall_area * kw * m.wall_g / (kw + m.wall_g);
                auto it = std::find_if(robin.begin(), robin.end(),
                                       [k](const auto& p) { return p.first == k; });
                if (it == robin.end())
                    robin.emplace_back(k, cond);
                else
                    it->second += cond;
            }
        }
    }

    Eigen::VectorXd x = m.ldlt.solve(rhs);
    if (!robin.empty()) {
        const int r = static_cast<int>(robin.size());
        Eigen::MatrixXd M = Eigen::MatrixXd::Identity(r, r);
        Eigen::VectorXd ys(r);
        std::vector<const Eigen::VectorXd*> cols(r);
        for (int q = 0; q < r; ++q) cols[q] = &m.column(robin[q].first);
        for (int p = 0; p < r; ++p) {
            ys[p] = robin[p].second * x[robin[p].first];
            for (int q = 0; q < r; ++q) M(p, q) += robin[p].second * (*cols[q])[robin[p].first];
        }
        const Eigen::VectorXd w = M.partialPivLu().solve(ys);
        for (int q = 0; q < r; ++q) x -= w[q] * (*cols[q]);
    }

    double absorption = 0;
    for (const auto& [k, cond] : robin) absorption += cond * x[k];
    for (const auto& s : m.sphere) absorption += s.cond * x[s.k];
    double diff_in = 0;
    for (const auto& b : m.inlet) diff_in += b.cond * (cin - x[b.k]);

    double scale = std::max(cin, 0.0);
    double lowest = 0;
    for (int k = 0; k < n; ++k) {
        scale = std::max(scale, x[k]);
        lowest = std::min(lowest, x[k]);
    }
    if (lowest < -1e-12 * std::max(scale, 1e-300)) {
        std::ostringstream os;
        os << "TransportSolver::step: negative concentration " << lowest << " at t = " << t_new
           << " (scale " << scale << ")";
        throw std::runtime_error(os.str());
    }

    const double mass_new = (Eigen::Map<const Eigen::VectorXd>(m.vol.data(), n).array() * x.array()).sum();
    for (int k = 0; k < n; ++k) field.c[m.volume_of[k]] = x[k];
    field.t = t_new;

    FluxLedger led;
    led.inflow = adv_in + diff_in;
    led.outflow = adv_out;
    led.absorption = absorption;
    led.emission = emission;
    led.mass_rate = (mass_new - mass_old) / dt;
    led.dt = dt;
    return led;
}

double TransportSolver::shift(ConcentrationField& field, int columns, double fill,
                              double period_time) const {
    const AxiGrid& g = *grid_;
    if (columns < 0 || columns >= g.nz) throw std::invalid_argument("shift: column count out of range");
    if (!(period_time > 0)) throw std::invalid_argument("shift: period must be positive");
    const double ratio = field.t / period_time;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream os;
        os << "shift: time " << field.t << " s is not a multiple of the period " << period_time << " s";
        throw std::invalid_argument(os.str());
    }
    const double before = mass(field);
    std::vector<double> out(field.c.size(), 0.0);
    for (int i = 0; i < g.nz; ++i) {
        for (int j = 0; j < g.nr; ++j) {
            const int v = g.vol(i, j);
            if (!g.active[v]) continue;
            if (i < columns) {
                out[v] = fill;
            } else {
                const int src = g.vol(i - columns, j);
                out[v] = g.active[src] ? field.c[src] : fill;
            }
        }
    }
    field.c.swap(out);
    return mass(field) - before;
}

double TransportSolver::sensor_flux(const ConcentrationField& field, const BandTrack& track,
                                    double t) const {
    const Impl& m = *impl_;
    const AxiGrid& g = *grid_;
    const auto [lo, hi] = m.band_columns(g, track, t);
    double s = 0;
    for (int i = lo; i <= hi; ++i) {
        const int k = m.wall[i];
        if (k < 0) continue;
        const double w = band_weight_average(track, g.zf(i), g.zf(i + 1), t);
        if (w <= 0) continue;
        const double kw = track.coefficient * w;
        s += m.wall_area * kw * m.wall_g / (kw + m.wall_g) * field.c[m.volume_of[k]];
    }
    return s;
}

double TransportSolver::sphere_flux(const ConcentrationField& field) const {
    const Impl& m = *impl_;
    double s = 0;
    for (const auto& r : m.sphere) s += r.cond * field.c[m.volume_of[r.k]];
    return s;
}

double TransportSolver::sensor_surface_concentration(const ConcentrationField& field,
                                                     const BandTrack& track, double t) const {
    const Impl& m = *impl_;
    const AxiGrid& g = *grid_;
    const auto [lo, hi] = m.band_columns(g, track, t);
    double num = 0, den = 0;
    for (int i = lo; i <= hi; ++i) {
        const int k = m.wall[i];
        if (k < 0) continue;
        const double w = band_weight_average(track, g.zf(i), g.zf(i + 1), t);
        if (w <= 0) continue;
        const double kw = track.coefficient * w;
        num += w * m.wall_g / (kw + m.wall_g) * field.c[m.volume_of[k]];
        den += w;
    }
    return den > 0 ? num / den : 0.0;
}

void write_concentration_csv(std::ostream& os, const AxiGrid& g, const ConcentrationField& field) {
    os << "z_m,r_m,c_per_m3\n";
    os.precision(10);
    for (int i = 0; i < g.nz; ++i)
        for (int j = 0; j < g.nr; ++j)
            os << g.zc(i) << ',' << g.rc(j) << ',' << field.c[g.vol(i, j)] << '\n';
}

void write_series_csv(std::ostream& os, const std::vector<SeriesRow>& rows) {
    os << "t_s,band_position_m,sensor_flux_per_s,inflow,outflow,absorption,emission,mass_rate\n";
    os.precision(10);
    for (const auto& r : rows)
        os << r.t << ',' << r.band_position << ',' << r.sensor_flux << ',' << r.ledger.inflow << ','
           << r.ledger.outflow << ',' << r.ledger.absorption << ',' << r.ledger.emission << ','
           << r.ledger.mass_rate << '\n';
}

}  // namespace capsim
