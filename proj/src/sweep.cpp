#include "capsim/sweep.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fs = std::filesystem;

namespace capsim {

namespace {

std::string g(double v, int digits = 6) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv(std::uint64_t h, const std::string& s) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

std::string point_name(const SimulationConfig& c) {
    std::string name = c.scenario.scenario == Scenario::BandOnWall ? "s1" : "s2";
    name += c.scenario.with_cells ? "_cells" : "_empty";
    name += "_v" + g(c.vessel.cell_speed * 1e3);
    name += "_D" + g(c.chemical.diffusion);
    return name;
}

std::vector<SweepPoint> expand_sweep(const SimulationConfig& base, const SweepAxes& axes) {
    const std::vector<double> speeds = axes.speeds.empty() ? std::vector<double>{base.vessel.cell_speed} : axes.speeds;
    const std::vector<double> diffs = axes.diffusions.empty() ? std::vector<double>{base.chemical.diffusion} : axes.diffusions;
    const std::vector<bool> cells = axes.cells.empty() ? std::vector<bool>{base.scenario.with_cells} : axes.cells;
    std::vector<SweepPoint> points;
    for (double v : speeds)
        for (double D : diffs)
            for (bool wc : cells) {
                SimulationConfig c = base;
                c.vessel.cell_speed = v;
                c.chemical.diffusion = D;
                c.scenario.with_cells = wc;
                points.push_back({point_name(c), validate(c)});
            }
    return points;
}

std::uint64_t point_seed(std::uint64_t seed, const SimulationConfig& config) {
    return seed ^ config_hash(config);
}

void write_run_files(const fs::path& dir, const RunRecord& r, std::uint64_t seed) {
    fs::create_directories(dir);
    const std::string hash = hash_hex(config_hash(r.config));
    auto with_header = [&](auto&& body) {
        std::ostringstream os;
        write_header(os, hash);
        body(os);
        return os.str();
    };
    write_file(dir / "summary.txt", with_header([&](std::ostream& os) {
                   os << "seed = " << seed << '\n';
                   write_summary(os, r);
               }));
    write_file(dir / "series.csv", with_header([&](std::ostream& os) { write_series_csv(os, r.series); }));
    if (r.config.scenario.scenario == Scenario::BandOnWall) {
        write_file(dir / "band_force.csv", with_header([&](std::ostream& os) { write_band_force_csv(os, r); }));
    } else {
        write_file(dir / "flux_distance.csv", with_header([&](std::ostream& os) { write_flux_distance_csv(os, r); }));
        write_file(dir / "counts.csv", with_header([&](std::ostream& os) { write_counts_csv(os, r, seed); }));
    }
    write_file(dir / "entries.csv", with_header([&](std::ostream& os) {
                   os << "table,quantity,model,speed_mm_s,diffusion_m2_s,value\n";
                   for (const auto& e : table_entries(r))
                       os << e.table << ',' << e.quantity << ',' << e.model << ',' << g(e.speed, 17) << ','
                          << g(e.diffusion, 17) << ',' << g(e.value, 17) << '\n';
               }));
    // written last: marks the point as finished for --resume
    write_file(dir / "complete", hash + '\n');
}

bool point_complete(const fs::path& dir, const SimulationConfig& config) {
    const fs::path marker = dir / "complete";
    if (!fs::exists(marker) || !fs::exists(dir / "entries.csv")) return false;
    return read_file(marker) == hash_hex(config_hash(config)) + '\n';
}

void prepare_output(const RunOptions& o) {
    if (o.out.empty()) throw std::runtime_error("no output directory given");
    if (fs::exists(o.out) && !fs::is_directory(o.out))
        throw std::runtime_error("'" + o.out.string() + "' exists and is not a directory");
    const bool used = fs::exists(o.out) && !fs::is_empty(o.out);
    if (used && o.overwrite) {
        fs::remove_all(o.out);
    } else if (used && !o.resume) {
        throw std::runtime_error("output directory '" + o.out.string() +
                                 "' is not empty; pass --overwrite or --resume");
    }
    fs::create_directories(o.out);
}

int worker_count(int fallback) {
    if (const char* env = std::getenv("CAPSIM_WORKERS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n >= 1 && n <= 256) return int(n);
        std::cerr << "ignoring CAPSIM_WORKERS='" << env << "'\n";
    }
    return std::max(1, fallback);
}

std::vector<PointOutcome> run_sweep(const std::vector<SweepPoint>& points, const RunOptions& o) {
    std::vector<PointOutcome> outcomes(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex log;

    auto work = [&] {
        for (std::size_t k = next++; k < points.size(); k = next++) {
            const auto& p = points[k];
            auto& out = outcomes[k];
            out.name = p.name;
            const fs::path dir = o.out / "points" / p.name;
            try {
                if (o.resume && point_complete(dir, p.config)) {
                    out.skipped = true;
                } else {
                    if (fs::exists(dir)) fs::remove_all(dir);
                    const RunRecord r = run(p.config);
                    write_run_files(dir, r, point_seed(o.seed, p.config));
                    std::lock_guard<std::mutex> lk(log);
                    std::cerr << p.name << ": done in " << g(r.diagnostics.seconds, 3) << " s\n";
                }
                for (const auto& v : load_reference_csv((dir / "entries.csv").string()))
                    out.entries.push_back({v.table, v.quantity, v.model, v.speed, v.diffusion, v.value});
                out.ok = true;
            } catch (const std::exception& e) {
                out.error = e.what();
                std::lock_guard<std::mutex> lk(log);
                std::cerr << p.name << ": FAILED: " << e.what() << '\n';
            }
        }
    };

    const int n = std::min<int>(std::max(1, o.workers), int(points.size()));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    // merge, single-threaded and in point order
    std::vector<TableEntry> entries;
    std::uint64_t h = 14695981039346656037ull;
    for (std::size_t k = 0; k < points.size(); ++k) {
        h = fnv(h, hash_hex(config_hash(points[k].config)));
        if (outcomes[k].ok) entries.insert(entries.end(), outcomes[k].entries.begin(), outcomes[k].entries.end());
    }
    const auto reference = o.reference.empty() ? std::vector<ReferenceValue>{} : load_reference_csv(o.reference);
    bool band = false, sphere = false;
    for (const auto& p : points) (p.config.scenario.scenario == Scenario::BandOnWall ? band : sphere) = true;
    auto table = [&](const std::string& name) {
        std::ostringstream os;
        write_header(os, hash_hex(h));
        emit_tables(os, name, entries, reference);
        write_file(o.out / ("table_" + name + ".csv"), os.str());
    };
    if (band) table("band");
    if (sphere) table("sphere");
    return outcomes;
}

}  // namespace capsim
