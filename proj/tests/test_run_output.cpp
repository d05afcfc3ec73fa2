#include "capsim/run_output.hpp"
#include "capsim/sweep.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace capsim;
namespace fs = std::filesystem;

namespace {

const std::string kShare = CAPSIM_SHARE_DIR;

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l))
        if (!l.empty() && l[0] != '#') out.push_back(l);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("reference table parses") {
    const auto ref = load_reference_csv(kShare + "/data/reference_tables.csv");
    CHECK(ref.size() == 45);
    CHECK_THROWS(parse_reference_csv("h\nband,x,cells,1,0\n"));
    CHECK_THROWS(parse_reference_csv("h\nband,x,cells,one,0,2\n"));
}

TEST_CASE("one record gives a single-cell table") {
    const std::vector<TableEntry> e{{"band", "average_rate_per_s", "cells", 1.0, 1e-10, 500.0}};
    std::ostringstream os;
    emit_tables(os, "band", e, {});
    const auto l = lines(os.str());
    REQUIRE(l.size() == 2);
    CHECK(l[0] == "quantity,model,diffusion_m2_s,v=1mm/s");
    CHECK(l[1] == "average_rate_per_s,cells,1e-10,500");
}

TEST_CASE("reference columns and gaps") {
    const std::vector<TableEntry> e{{"band", "average_rate_per_s", "cells", 1.0, 1e-10, 627.0}};
    const auto ref = load_reference_csv(kShare + "/data/reference_tables.csv");
    std::ostringstream os;
    emit_tables(os, "band", e, ref);
    const auto l = lines(os.str());
    CHECK(l[0].find("v=0.2mm/s,v=1mm/s,v=2mm/s") != std::string::npos);
    bool found = false;
    for (const auto& row : l)
        if (row.rfind("average_rate_per_s,cells,1e-10,", 0) == 0) {
            found = true;
            CHECK(row == "average_rate_per_s,cells,1e-10,NA,627,NA,260,570,800,NA,0.1,NA");
        }
    CHECK(found);
    // sections: D-independent rows first, then large, then small molecules
    CHECK(l[1].rfind("pressure_gradient_Pa_per_m", 0) == 0);
    CHECK(l.back().find(",2e-09,") != std::string::npos);
    CHECK(l.size() == 1 + 3 + 2 + 2);
}

TEST_CASE("sweep expansion") {
    SimulationConfig c;
    SweepAxes axes;
    axes.speeds = {0.2e-3, 1e-3, 2e-3};
    axes.diffusions = {1e-10, 2e-9};
    axes.cells = {true, false};
    const auto p = expand_sweep(c, axes);
    CHECK(p.size() == 12);
    CHECK(p[0].name == "s1_cells_v0.2_D1e-10");
    CHECK(p[11].name == "s1_empty_v2_D2e-09");
    CHECK(expand_sweep(c, SweepAxes{}).size() == 1);
    CHECK(point_seed(1, p[0].config) != point_seed(1, p[1].config));
}

TEST_CASE("output directory rules") {
    const fs::path dir = fs::temp_directory_path() / "capsim_test_outdir";
    fs::remove_all(dir);
    RunOptions o;
    o.out = dir;
    prepare_output(o);
    std::ofstream(dir / "stale.txt") << "x";
    CHECK_THROWS(prepare_output(o));
    o.resume = true;
    CHECK_NOTHROW(prepare_output(o));
    CHECK(fs::exists(dir / "stale.txt"));
    o.resume = false;
    o.overwrite = true;
    prepare_output(o);
    CHECK(fs::is_empty(dir));
    fs::remove_all(dir);
}

TEST_CASE("run files, resume and determinism") {
    SimulationConfig c;
    c.scenario.with_cells = false;
    c.numerics.grid_spacing = 0.25e-6;
    c.numerics.max_periods = 30;
    const std::vector<SweepPoint> points{{point_name(c), c}};
    const fs::path a = fs::temp_directory_path() / "capsim_test_run_a";
    const fs::path b = fs::temp_directory_path() / "capsim_test_run_b";
    for (const auto& dir : {a, b}) {
        fs::remove_all(dir);
        RunOptions o;
        o.out = dir;
        o.seed = 5;
        prepare_output(o);
        const auto out = run_sweep(points, o);
        REQUIRE(out.size() == 1);
        CHECK(out[0].ok);
    }
    const fs::path pa = a / "points" / points[0].name, pb = b / "points" / points[0].name;
    for (const char* f : {"summary.txt", "series.csv", "band_force.csv", "entries.csv"}) {
        const std::string text = slurp(pa / f);
        CHECK(text.rfind("# capsim 0.1.0\n# config_hash = ", 0) == 0);
        CHECK(text == slurp(pb / f));
    }
    CHECK(slurp(a / "table_band.csv") == slurp(b / "table_band.csv"));
    CHECK(point_complete(pa, c));

    // resume skips the finished point and leaves its files untouched
    const auto stamp = fs::last_write_time(pa / "summary.txt");
    RunOptions o;
    o.out = a;
    o.resume = true;
    const auto again = run_sweep(points, o);
    CHECK(again[0].skipped);
    CHECK(fs::last_write_time(pa / "summary.txt") == stamp);

    SimulationConfig other = c;
    other.chemical.diffusion = 2e-9;
    CHECK_FALSE(point_complete(pa, other));
    fs::remove_all(a);
    fs::remove_all(b);
}
