#include "capsim/domain_model.hpp"

#include <doctest.h>

#include <algorithm>

using namespace capsim;

namespace {

bool has(const std::vector<Violation>& v, const std::string& constraint) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.constraint == constraint; });
}

}  // namespace

TEST_CASE("default parameters are valid") {
    SimulationConfig c;
    CHECK(check(c).empty());
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("hematocrit zero with cells") {
    SimulationConfig c;
    c.vessel.hematocrit = 0;
    CHECK(has(check(c), "hematocrit must be in (0,1) when cells present"));
    CHECK_THROWS_AS(validate(c), ValidationError);
}

TEST_CASE("smoothing wider than the band") {
    SimulationConfig c;
    c.scenario.sensor.smoothing_width = 3e-6;
    const auto v = check(c);
    REQUIRE(v.size() == 1);
    CHECK(v[0].field == "sensor.smoothing_width");
}

TEST_CASE("every violation is reported") {
    SimulationConfig c;
    c.vessel.radius = -3e-6;
    c.chemical.diffusion = 0;
    c.numerics.cfl = 2;
    try {
        validate(c);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(e.violations().size() == 3);
    }
}

TEST_CASE("scenario 2 needs a source and a sphere") {
    SimulationConfig c;
    c.scenario.scenario = Scenario::SphereInFlow;
    const auto v = check(c);
    CHECK(has(v, "scenario 2 requires a moving sphere sensor"));
    CHECK(has(v, "scenario 2 requires a source"));
    CHECK(has(v, "scenario 2 requires zero inlet concentration"));
    c.scenario.sensor.kind = SensorKind::MovingSphere;
    c.scenario.source = SourceSpec{};
    c.scenario.inlet_concentration = 0;
    CHECK(check(c).empty());
}

TEST_CASE("cell spacing") {
    CHECK(cell_spacing(90e-18, 3e-6, 0.25) == doctest::Approx(12.732e-6).epsilon(1e-4));
}

TEST_CASE("downstream concentration") {
    // 2 * 10e-6 * 1e13 / (3e-6 * 1e-3 * 0.75)
    CHECK(downstream_concentration(10e-6, 1e13, 3e-6, 1e-3, 0.25) == doctest::Approx(8.8889e16).epsilon(1e-4));
}

TEST_CASE("derived quantities") {
    SimulationConfig c;
    const auto d = derive(c);
    CHECK(d.reynolds == doctest::Approx(3e-3));
    CHECK(d.reynolds < 1);
    CHECK_FALSE(d.downstream_concentration.has_value());
    c.scenario.scenario = Scenario::SphereInFlow;
    c.scenario.sensor.kind = SensorKind::MovingSphere;
    c.scenario.source = SourceSpec{};
    c.scenario.inlet_concentration = 0;
    REQUIRE(derive(c).downstream_concentration.has_value());
}
