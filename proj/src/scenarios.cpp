#include "capsim/scenarios.hpp"

#include "capsim/analytic_baselines.hpp"
#include "capsim/axi_grid.hpp"
#include "capsim/cell_geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace capsim {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int kBandSamples = 64;
constexpr std::size_t kLedgerWindow = 100;

GridOptions grid_options(const SimulationConfig& c) {
    GridOptions o;
    o.spacing = c.numerics.grid_spacing;
    o.subsamples = c.numerics.subsamples;
    return o;
}

// Worst relative closure over all windows of `width` consecutive steps.
double worst_window_closure(const std::vector<SeriesRow>& rows, std::size_t width) {
    const std::size_t n = rows.size();
    if (n == 0) return 0.0;
    const std::size_t w = std::min(width, n);
    std::vector<double> in(n + 1, 0), out(n + 1, 0), ab(n + 1, 0), em(n + 1, 0), dm(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const auto& l = rows[k].ledger;
        in[k + 1] = in[k] + l.inflow * l.dt;
        out[k + 1] = out[k] + l.outflow * l.dt;
        ab[k + 1] = ab[k] + l.absorption * l.dt;
        em[k + 1] = em[k] + l.emission * l.dt;
        dm[k + 1] = dm[k] + l.mass_rate * l.dt;
    }
    double worst = 0;
    for (std::size_t b = 0; b + w <= n; ++b) {
        const std::size_t e = b + w;
        const double i = in[e] - in[b], o = out[e] - out[b], a = ab[e] - ab[b], s = em[e] - em[b],
                     m = dm[e] - dm[b];
        const double scale = std::max({std::abs(i), std::abs(o), std::abs(a), std::abs(s), std::abs(m)});
        if (scale > 0) worst = std::max(worst, std::abs(i + s - o - a - m) / scale);
    }
    return worst;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double cosine_ramp(double x, double width) {
    if (x <= -0.5 * width) return 0.0;
    if (x >= 0.5 * width) return 1.0;
    return 0.5 * (1.0 - std::cos(pi * (x + 0.5 * width) / width));
}

}  // namespace

CellShape shape_for(const SimulationConfig& c, GapLookup* gap) {
    GapLookup g;
    if (c.cell.gap)
        g.gap = *c.cell.gap;
    else
        g = gap_for_speed(c.vessel.cell_speed);
    if (gap) *gap = g;
    return solve_shape(c.vessel.radius, g.gap, c.cell.volume, c.cell.surface);
}

RunRecord run_scenario1(const SimulationConfig& input) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationConfig c = validate(input);
    if (c.scenario.scenario != Scenario::BandOnWall)
        throw std::invalid_argument("run_scenario1: configuration is not a wall-band scenario");
    const double v = c.vessel.cell_speed;
    if (!(v > 0)) throw std::invalid_argument("run_scenario1: cell speed must be positive");

    RunRecord rec;
    rec.config = c;
    rec.derived = derive(c);
    auto& m = rec.metrics;
    auto& d = rec.diagnostics;
    const double R = c.vessel.radius, eta = c.fluid.viscosity;
    const double L = rec.derived.cell_spacing;
    const int copies = c.scenario.n_cells;
    const auto& sensor = c.scenario.sensor;

    VesselGeometry period;
    period.radius = R;
    period.length = L;
    period.periodic = true;
    if (c.scenario.with_cells) {
        GapLookup gl;
        const CellShape shape = shape_for(c, &gl);
        d.cell_gap = gl.gap;
        d.gap_clamped = gl.clamped;
        period.cells = build_train(shape, L, 1, 0.0);
    }
    auto pgrid = std::make_shared<const AxiGrid>(build_grid(period, grid_options(c)));
    d.grid_spacing = pgrid->dr;
    const StokesSystem stokes(pgrid, eta);
    FlowField pflow;
    if (c.scenario.with_cells) {
        auto res = find_pressure_gradient(stokes, v, 0);
        d.force_residual = res.residual_force / res.force_scale;
        pflow = std::move(res.flow);
    } else {
        pflow = stokes.solve({-v, poiseuille_gradient(v, eta, R), Frame::Comoving});
    }
    d.pressure_gradient = pflow.pressure_gradient;
    d.flow_divergence = pflow.max_divergence() / (v * pgrid->dr * pgrid->dr);

    const TractionReport series =
        band_force_series(pflow, 0.0, L, sensor.length, sensor.smoothing_width, kBandSamples);
    m.band_positions = series.positions;
    m.band_forces = series.samples;
    m.band_force_max = *std::max_element(m.band_forces.begin(), m.band_forces.end());
    m.band_force_min = *std::min_element(m.band_forces.begin(), m.band_forces.end());
    m.band_force_mean = series.axial_force;
    m.band_force_variation =
        m.band_force_mean > 0 ? (m.band_force_max - m.band_force_min) / m.band_force_mean : 0.0;

    auto tgrid = std::make_shared<const AxiGrid>(tile_grid(*pgrid, copies));
    const FlowField flow = tile_flow(pflow, tgrid, copies);
    d.nz = tgrid->nz;
    d.nr = tgrid->nr;

    const double T = L / v;
    const double bound = stable_time_step(flow, c.numerics.cfl, sensor.smoothing_width, v);
    const int per_period = static_cast<int>(std::ceil(T / bound - 1e-9));
    d.dt = T / per_period;

    TransportSettings ts;
    ts.diffusion = c.chemical.diffusion;
    ts.dt = d.dt;
    ts.inlet_concentration = c.scenario.inlet_concentration;
    ts.van_leer = c.numerics.van_leer;
    TransportSolver solver(flow, ts);

    BandTrack band;
    band.kind = BandKind::AbsorbingSensor;
    band.center0 = tgrid->z_begin + 0.5 * tgrid->length + 0.5 * L;
    band.length = sensor.length;
    band.smoothing = sensor.smoothing_width;
    band.speed = v;
    band.coefficient = sensor.absorption_velocity;

    ConcentrationField field = solver.zero_field();
    const int min_periods = copies / 2 + 1;
    double previous = 0;
    for (int p = 1; p <= c.numerics.max_periods; ++p) {
        double integral = 0;
        for (int s = 0; s < per_period; ++s) {
            const FluxLedger led = solver.step(field, {band});
            integral += led.absorption * d.dt;
            SeriesRow row;
            row.t = field.t;
            row.band_position = band.center(field.t);
            row.sensor_flux = led.absorption;
            row.ledger = led;
            rec.series.push_back(row);
            ++d.steps;
        }
        field.t = p * T;  // remove round-off drift before the shift check
        const double avg = integral / T;
        m.period_averages.push_back(avg);
        d.periods = p;
        if (p >= 2) d.period_change = std::abs(avg - previous) / std::max(std::abs(avg), 1e-300);
        previous = avg;
        if (p >= std::max(2, min_periods) && d.period_change < c.numerics.convergence_tol) {
            d.converged = true;
            break;
        }
        solver.shift(field, pgrid->nz, c.scenario.inlet_concentration, T);
        band.center0 += L;
    }
    if (!d.converged) {
        std::ostringstream os;
        os << "run_scenario1: no periodic steady state after " << d.periods
           << " periods; last period-to-period change " << d.period_change << " (tolerance "
           << c.numerics.convergence_tol << ")";
        throw std::runtime_error(os.str());
    }
    m.average_rate = m.period_averages.back();
    for (const auto& r : rec.series) {
        m.time.push_back(r.t);
        m.flux.push_back(r.sensor_flux);
    }
    m.max_rate = *std::max_element(m.flux.end() - per_period, m.flux.end());
    d.ledger_closure = worst_window_closure(rec.series, kLedgerWindow);
    d.min_concentration = *std::min_element(field.c.begin(), field.c.end());
    d.sensor_surface_concentration =
        solver.sensor_surface_concentration(field, band, field.t) / c.scenario.inlet_concentration;
    d.seconds = seconds_since(t0);
    return rec;
}

RunRecord run_scenario2(const SimulationConfig& input) {
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationConfig c = validate(input);
    if (c.scenario.scenario != Scenario::SphereInFlow || !c.scenario.source)
        throw std::invalid_argument("run_scenario2: configuration is not a moving-sphere scenario");
    const double v = c.vessel.cell_speed;
    if (!(v > 0)) throw std::invalid_argument("run_scenario2: cell speed must be positive");

    RunRecord rec;
    rec.config = c;
    rec.derived = derive(c);
    auto& m = rec.metrics;
    auto& d = rec.diagnostics;
    const double R = c.vessel.radius, eta = c.fluid.viscosity;
    const double L = rec.derived.cell_spacing;
    const int slots = c.scenario.n_cells;
    const auto& sensor = c.scenario.sensor;
    const SourceSpec& src = *c.scenario.source;

    VesselGeometry geom;
    geom.radius = R;
    geom.length = slots * L;
    geom.periodic = true;
    const double sphere_center = 0.5 * slots * L;
    geom.sphere = Sphere{sphere_center, 0.5 * sensor.length};
    if (c.scenario.with_cells) {
        GapLookup gl;
        const CellShape shape = shape_for(c, &gl);
        d.cell_gap = gl.gap;
        d.gap_clamped = gl.clamped;
        geom.cells = build_train(shape, L, slots, 0.0);
    }
    auto grid = std::make_shared<const AxiGrid>(build_grid(geom, grid_options(c)));
    d.grid_spacing = grid->dr;
    d.nz = grid->nz;
    d.nr = grid->nr;
    const StokesSystem stokes(grid, eta);
    FlowField flow;
    if (c.scenario.with_cells) {
        auto res = find_pressure_gradient(stokes, v, 0);
        d.force_residual = res.residual_force / res.force_scale;
        flow = std::move(res.flow);
    } else {
        // Sphere translating with the mean flow: zero net flux in its frame.
        const double probe = poiseuille_gradient(v, eta, R);
        const double q0 = stokes.solve({-v, 0.0, Frame::Comoving}).axial_flux(0);
        const double q1 = stokes.solve({0.0, probe, Frame::Comoving}).axial_flux(0);
        flow = stokes.solve({-v, -q0 / q1 * probe, Frame::Comoving});
    }
    d.pressure_gradient = flow.pressure_gradient;
    d.flow_divergence = flow.max_divergence() / (v * grid->dr * grid->dr);

    const double offset = c.numerics.source_offset_periods * L;
    const double t_end = (c.numerics.end_distance + offset) / v;
    const double bound = stable_time_step(flow, c.numerics.cfl, src.smoothing_width, v);
    const int steps = static_cast<int>(std::ceil(t_end / bound - 1e-9));
    d.dt = t_end / steps;

    TransportSettings ts;
    ts.diffusion = c.chemical.diffusion;
    ts.dt = d.dt;
    ts.inlet_concentration = 0.0;
    ts.sphere_absorption = sensor.absorption_velocity;
    ts.van_leer = c.numerics.van_leer;
    TransportSolver solver(flow, ts);

    BandTrack source;
    source.kind = BandKind::Source;
    source.center0 = sphere_center + offset;
    source.length = src.length;
    source.smoothing = src.smoothing_width;
    source.speed = v;
    source.coefficient = src.flux;

    // Everything downstream of the source already carries its full output.
    ConcentrationField field = solver.zero_field();
    const double c_ds = rec.derived.downstream_concentration.value();
    constexpr double ramp_width = 10e-6;
    for (int i = 0; i < grid->nz; ++i)
        for (int j = 0; j < grid->nr; ++j)
            if (grid->active[grid->vol(i, j)])
                field.c[grid->vol(i, j)] = c_ds * cosine_ramp(grid->zc(i) - source.center0, ramp_width);

    const double window = c.numerics.near_window;
    for (int s = 0; s < steps; ++s) {
        const FluxLedger led = solver.step(field, {source});
        const double dist = sphere_center - source.center(field.t);
        SeriesRow row;
        row.t = field.t;
        row.band_position = source.center(field.t);
        row.sensor_flux = led.absorption;
        row.ledger = led;
        rec.series.push_back(row);
        m.time.push_back(field.t);
        m.flux.push_back(led.absorption);
        m.distance.push_back(dist);
        if (led.absorption > m.max_rate) {
            m.max_rate = led.absorption;
            m.max_rate_distance = dist;
        }
        if (std::abs(dist) <= window) m.near_source_counts += led.absorption * d.dt;
    }
    d.steps = steps;
    d.converged = true;
    m.final_flux = m.flux.empty() ? 0.0 : m.flux.back();
    d.ledger_closure = worst_window_closure(rec.series, kLedgerWindow);
    d.min_concentration = *std::min_element(field.c.begin(), field.c.end());
    d.seconds = seconds_since(t0);
    return rec;
}

RunRecord run(const SimulationConfig& c) {
    return c.scenario.scenario == Scenario::BandOnWall ? run_scenario1(c) : run_scenario2(c);
}

std::vector<std::int64_t> sample_counts(const std::vector<double>& flux, const std::vector<double>& dt,
                                        std::uint64_t seed) {
    if (dt.empty() || (dt.size() != 1 && dt.size() != flux.size()))
        throw std::invalid_argument("sample_counts: dt must have one entry or one per interval");
    std::mt19937_64 rng(seed);
    std::vector<std::int64_t> out;
    out.reserve(flux.size());
    for (std::size_t i = 0; i < flux.size(); ++i) {
        const double mean = flux[i] * (dt.size() == 1 ? dt[0] : dt[i]);
        if (mean < 0 || !std::isfinite(mean))
            throw std::invalid_argument("sample_counts: flux and dt must be non-negative");
        if (mean == 0) {
            out.push_back(0);
            continue;
        }
        std::poisson_distribution<std::int64_t> pd(mean);
        out.push_back(pd(rng));
    }
    return out;
}

ComparisonTable compare_models(const RunRecord& a, const RunRecord& b, double threshold) {
    const auto& ca = a.config;
    const auto& cb = b.config;
    if (!ca.scenario.with_cells || cb.scenario.with_cells)
        throw std::invalid_argument("compare_models: expected a with-cells and a cell-free record");
    const bool same = ca.scenario.scenario == cb.scenario.scenario &&
                      ca.vessel.radius == cb.vessel.radius &&
                      ca.vessel.cell_speed == cb.vessel.cell_speed &&
                      ca.vessel.hematocrit == cb.vessel.hematocrit &&
                      ca.chemical.diffusion == cb.chemical.diffusion &&
                      ca.fluid.viscosity == cb.fluid.viscosity &&
                      ca.scenario.sensor.length == cb.scenario.sensor.length &&
                      ca.scenario.sensor.absorption_velocity == cb.scenario.sensor.absorption_velocity &&
                      ca.scenario.inlet_concentration == cb.scenario.inlet_concentration &&
                      ca.scenario.source.has_value() == cb.scenario.source.has_value() &&
                      (!ca.scenario.source ||
                       (ca.scenario.source->length == cb.scenario.source->length &&
                        ca.scenario.source->flux == cb.scenario.source->flux));
    if (!same) throw std::invalid_argument("compare_models: configurations differ beyond the cell model");

    ComparisonTable t;
    t.scenario = ca.scenario.scenario;
    auto add = [&](std::string name, double x, double y) {
        ComparisonRow r{std::move(name), x, y, 0.0, false};
        r.relative_difference = x != 0 ? (y - x) / x : (y == 0 ? 0.0 : INFINITY);
        r.flagged = std::abs(r.relative_difference) > threshold;
        t.rows.push_back(r);
    };
    if (t.scenario == Scenario::BandOnWall) {
        add("average_rate", a.metrics.average_rate, b.metrics.average_rate);
        add("band_force_max", a.metrics.band_force_max, b.metrics.band_force_max);
    } else {
        add("max_rate", a.metrics.max_rate, b.metrics.max_rate);
        add("near_source_counts", a.metrics.near_source_counts, b.metrics.near_source_counts);
    }
    return t;
}

}  // namespace capsim
