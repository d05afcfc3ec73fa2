#include "capsim/config_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <string>

using namespace capsim;
using doctest::Approx;

namespace {

const std::string kShare = CAPSIM_SHARE_DIR;

bool mentions(const ConfigError& e, const std::string& text) {
    return std::any_of(e.problems().begin(), e.problems().end(),
                       [&](const std::string& p) { return p.find(text) != std::string::npos; });
}

std::string band_text() {
    return "scenario = 1\nwith_cells = true\nn_cells = 10\ndensity_kg_m3 = 1000\nviscosity_pa_s = 0.001\n"
           "radius_um = 3\nhematocrit = 0.25\ncell_speed_mm_s = 1\ndiffusion_m2_s = 1e-10\n"
           "cell_volume_um3 = 90\ncell_surface_um2 = 135\nsensor_length_um = 2\n"
           "absorption_velocity_m_s = 1\nsmoothing_um = 0.2\ninlet_concentration_per_m3 = 1e17\n";
}

}  // namespace

TEST_CASE("shipped scenario 1 config") {
    const ConfigFile f = load_config_file(kShare + "/configs/scenario1.cfg");
    const auto& c = f.config;
    CHECK(c.scenario.scenario == Scenario::BandOnWall);
    CHECK(c.vessel.radius == Approx(3e-6));
    CHECK(c.vessel.hematocrit == Approx(0.25));
    CHECK(c.fluid.viscosity == Approx(1e-3));
    CHECK(c.fluid.density == Approx(1e3));
    CHECK(c.cell.volume == Approx(90e-18));
    CHECK(c.cell.surface == Approx(135e-12));
    CHECK(c.scenario.sensor.length == Approx(2e-6));
    CHECK(c.scenario.sensor.absorption_velocity == Approx(1.0));
    CHECK(c.scenario.inlet_concentration == Approx(1e17));
    CHECK(c.scenario.n_cells == 10);
    CHECK(f.sweep.speeds.size() == 3);
    CHECK(f.sweep.diffusions.size() == 2);
    CHECK(f.sweep.cells.size() == 2);
}

TEST_CASE("shipped scenario 2 config") {
    const ConfigFile f = load_config_file(kShare + "/configs/scenario2.cfg");
    const auto& c = f.config;
    CHECK(c.scenario.scenario == Scenario::SphereInFlow);
    CHECK(c.scenario.sensor.kind == SensorKind::MovingSphere);
    REQUIRE(c.scenario.source.has_value());
    CHECK(c.scenario.source->length == Approx(10e-6));
    CHECK(c.scenario.source->flux == Approx(1e13));
    CHECK(c.scenario.inlet_concentration == 0);
    CHECK(c.scenario.n_cells == 20);
}

TEST_CASE("empty file lists every missing key") {
    try {
        parse_config("");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.problems().size() >= 14);
        CHECK(mentions(e, "missing required key 'radius_um'"));
        CHECK(mentions(e, "missing required key 'scenario'"));
    }
}

TEST_CASE("negative radius is a validation error") {
    std::string t = band_text();
    t.replace(t.find("radius_um = 3"), 13, "radius_um = -3");
    CHECK_THROWS_AS(parse_config(t), ValidationError);
}

TEST_CASE("typos, duplicates and bad values") {
    try {
        parse_config(band_text() + "radius_mm = 3\nhematocrit = 0.3\ncfl = fast\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(mentions(e, "unknown key 'radius_mm'"));
        CHECK(mentions(e, "duplicate key 'hematocrit'"));
        CHECK(mentions(e, "cannot parse value 'fast'"));
    }
    CHECK_THROWS_AS(parse_config(band_text() + "source_length_um = 10\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(band_text() + "no equals sign\n"), ConfigError);
}

TEST_CASE("comments and units") {
    const auto c = parse_config("# header\n" + band_text() + "grid_spacing_um = 0.05   # finer\n");
    CHECK(c.numerics.grid_spacing == Approx(0.05e-6));
    CHECK(c.vessel.cell_speed == Approx(1e-3));
}

TEST_CASE("canonical text round trips") {
    for (const char* name : {"/configs/scenario1.cfg", "/configs/scenario2.cfg"}) {
        const auto c = load_config_file(kShare + name).config;
        const std::string text = format_config(c);
        const auto back = parse_config(text);
        CHECK(format_config(back) == text);
        CHECK(config_hash(back) == config_hash(c));
    }
    auto c = parse_config(band_text());
    const auto h = config_hash(c);
    c.vessel.cell_speed = 2e-3;
    CHECK(config_hash(c) != h);
    CHECK(hash_hex(0xabcULL) == "0000000000000abc");
}
