#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "glacial/config.hpp"
#include "glacial/errors.hpp"
#include "glacial/experiments.hpp"
#include "glacial/io.hpp"

using namespace glacial;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

/// Fresh directory under the system temp path, removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name) : path_(fs::temp_directory_path() / ("glacial_test_" + name)) {
        fs::remove_all(path_);
    }
    ~ScratchDir() { fs::remove_all(path_); }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& f) const { return (path_ / f).string(); }

private:
    fs::path path_;
};

RunConfig config_in(const ScratchDir& dir) {
    RunConfig c;
    c.output.dir = dir.str();
    return c;
}

int config_error_line(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}

template <class T>
void check_document_round_trip(const T& value) {
    const std::string doc = to_document(value);
    const T back = from_document<T>(doc);
    CHECK(back == value);
    CHECK(to_document(back) == doc);
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(
        "# defaults with a few changes\n"
        "params.epsilon = 0.3\n"
        "\n"
        "params.b0=1.7   # trailing comment\n"
        "integrator.step_mode = fixed_rk4\n"
        "orbit.seed_w = 2.5\n"
        "sweep.step = 0.05\n"
        "output.format = json\n");
    CHECK(c.params.epsilon == 0.3);
    CHECK(c.params.b0 == 1.7);
    CHECK(c.integrator.step_mode == StepMode::FixedClassicalRK4);
    CHECK(c.orbit.seed_w == 2.5);
    CHECK_FALSE(c.orbit.seed_eta.has_value());
    CHECK(c.sweep.step == 0.05);
    CHECK(c.output.format == TableFormat::Json);
    CHECK(c.params.B == ModelParameters{}.B);

    CHECK(config_error_line("params.epsilon = 0.3\nparams.nonsense = 1\n") == 2);
    CHECK(config_error_line("params.epsilon = 0.3\n\nparams.epsilon = 0.2\n") == 3);
    CHECK(config_error_line("params.epsilon 0.3\n") == 1);
    CHECK(config_error_line("params.epsilon =\n") == 1);
    CHECK(config_error_line("params.epsilon = abc\n") == 1);
    CHECK(config_error_line("params.epsilon = 0.3x\n") == 1);
    CHECK(config_error_line("output.format = xml\n") == 1);

    // Parsed values are checked together once overrides are in place.
    for (const char* text : {"sweep.step = 0\n", "sweep.start = 3\nsweep.stop = 2\n",
                             "params.alpha1 = 0.5\nparams.alpha2 = 0.5\n", "params.tau = -1\n",
                             "orbit.max_iterations = 0\n", "orbit.seed_w = 1\n", "nullclines.samples = 1\n"}) {
        CAPTURE(text);
        const RunConfig bad = parse_config(text);
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
    CHECK_NOTHROW(RunConfig{}.validate());
    RunConfig degenerate;
    degenerate.params.alpha1 = degenerate.params.alpha2;
    CHECK_THROWS_AS(run_equilibria(degenerate), ConfigError);

    RunConfig o;
    apply_override(o, "params.b0=2.0");
    apply_override(o, "orbit.seed_w=1");
    apply_override(o, "orbit.seed_w=auto");
    CHECK(o.params.b0 == 2.0);
    CHECK_FALSE(o.orbit.seed_w.has_value());
    CHECK_THROWS_AS(apply_override(o, "params.b0"), ConfigError);
    CHECK_THROWS_AS(apply_override(o, "bogus=1"), ConfigError);
}

TEST_CASE("config round trip") {
    RunConfig c;
    c.params.epsilon = 0.1 + 0.2;  // not exactly representable as printed
    c.params.b0 = 1.75;
    c.integrator.rel_tol = 1e-11;
    c.simulate.regime = Regime::Advance;
    c.orbit.seed_eta = 0.91;
    c.sweep.workers = 3;
    c.output.dir = "some/where";
    const std::string text = format_config(c);
    CHECK(parse_config(text) == c);
    CHECK(format_config(parse_config(text)) == text);

    std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == config_keys().size());

    ScratchDir dir("config");
    fs::create_directories(dir.str());
    write_file_atomic(dir.file("run.cfg"), text);
    CHECK(load_config(dir.file("run.cfg")) == c);
    CHECK_THROWS_AS(load_config(dir.file("missing.cfg")), ConfigError);
}

TEST_CASE("tables") {
    Table t;
    t.columns = {"t", "w", "label"};
    t.rows = {{0.1, -17.264812345678901, std::string("retreat")}, {2.0, 1e-300, std::string("advance")}};
    std::ostringstream csv;
    write_csv(csv, t);
    CHECK(csv.str().rfind("t,w,label\n", 0) == 0);
    std::istringstream in(csv.str());
    const Table back = read_csv(in, t.columns);
    REQUIRE(back.rows.size() == 2);
    CHECK(std::stod(std::get<std::string>(back.rows[0][1])) == -17.264812345678901);
    CHECK(std::get<std::string>(back.rows[1][2]) == "advance");
    CHECK(std::stod(std::get<std::string>(back.rows[1][1])) == 1e-300);

    std::istringstream wrong(csv.str());
    CHECK_THROWS(read_csv(wrong, {"t", "w", "kind"}));

    std::ostringstream json;
    write_table(json, t, TableFormat::Json);
    std::istringstream jin(json.str());
    CHECK(read_table(jin, t.columns, TableFormat::Json).rows == t.rows);

    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(table_file("trajectory", TableFormat::Csv) == "trajectory.csv");
    CHECK(table_file("trajectory", TableFormat::Json) == "trajectory.json");

    std::ostringstream hdr;
    write_csv(hdr, nullcline_table({}));
    CHECK(hdr.str() == "eta,F,G_plus,G_minus,g_plus,g_minus,gamma,h_plus,h_minus\n");
    std::ostringstream ev;
    write_csv(ev, event_table({}));
    CHECK(ev.str() == "t,w,eta,xi,kind,regime_before,regime_after\n");
    std::ostringstream tr;
    write_csv(tr, trajectory_table({}));
    CHECK(tr.str() == "t,w,eta,xi,regime\n");
    std::ostringstream pr;
    write_csv(pr, projection_table({}));
    CHECK(pr.str() == "t,eta,xi\n");
}

TEST_CASE("equilibria report") {
    const EquilibriaReport r = run_equilibria(RunConfig{});
    REQUIRE(r.equilibria.size() == 4);
    const auto* ret = find_sink(r.equilibria, Regime::Retreat);
    REQUIRE(ret != nullptr);
    CHECK(ret->state.w == Approx(5.08).epsilon(0.01));
    CHECK(ret->state.eta == Approx(0.95).epsilon(0.01));
    for (const auto& e : r.equilibria) CHECK(e.classification == Classification::Virtual);
    CHECK(r.warnings.empty());
    check_document_round_trip(r);

    RunConfig odd;
    odd.params.b0 = 1.9;  // above b: allowed, with a warning
    CHECK_FALSE(run_equilibria(odd).warnings.empty());
}

TEST_CASE("simulation") {
    RunConfig c;
    c.params.epsilon = 0.3;
    c.integrator.max_time = 100.0;
    c.simulate = {3.0, 0.9, gamma(0.9, c.params) - 0.01, std::nullopt};
    const SimulationRun run = run_simulate(c);
    CHECK(run.summary.start_regime == Regime::Retreat);
    CHECK(run.summary.termination == Termination::MaxTime);
    CHECK(run.summary.events == run.trajectory.events.size());
    CHECK(run.summary.crossings >= 10);
    CHECK(run.summary.final_time == 100.0);
    check_document_round_trip(run.summary);

    const auto rows = flatten(run.trajectory);
    CHECK(rows.size() == run.summary.samples);
    CHECK(trajectory_rows(trajectory_table(rows)) == rows);
    CHECK(event_rows(event_table(run.trajectory.events)) == run.trajectory.events);

    c.simulate.regime = Regime::Advance;
    CHECK_THROWS_AS(run_simulate(c), std::invalid_argument);
    c.simulate = {0.0, 1.5, 0.5, std::nullopt};
    CHECK_THROWS_AS(run_simulate(c), std::invalid_argument);
}

TEST_CASE("orbit report") {
    RunConfig c;
    c.params.epsilon = 0.3;
    const OrbitRun run = run_orbit(c);
    const OrbitReport& r = run.report;
    CHECK(r.orbit.period == Approx(10.0034).epsilon(1e-4));
    CHECK(r.orbit.closure_error < 1e-8);
    CHECK(r.period_crossings == 2);
    CHECK(r.period_closure < 1e-8);
    CHECK(r.seeds_agree);
    CHECK(std::count_if(r.seed_trials.begin(), r.seed_trials.end(), [](const SeedTrial& s) { return s.converged; }) >= 5);
    CHECK(r.eta_min < r.eta_max);
    CHECK(r.xi_min < r.xi_max);
    CHECK(r.epsilon_bound == Approx(12.0 / 35.0));
    check_document_round_trip(r);

    c.params.epsilon = 0.35;
    CHECK_THROWS_AS(run_orbit(c), std::invalid_argument);
}

TEST_CASE("epsilon check") {
    RunConfig c;
    c.params.epsilon = 0.3;
    const EpsilonReport ok = run_check_epsilon(c);
    CHECK(ok.admissible);
    CHECK(std::abs(ok.epsilon_bound - 0.342857142857142857) < 1e-12);
    CHECK_FALSE(ok.intersection_in_unit_interval);

    c.params.epsilon = 0.35;
    const EpsilonReport bad = run_check_epsilon(c);
    CHECK_FALSE(bad.admissible);
    CHECK(bad.intersection_in_unit_interval);
    CHECK(bad.eta_intersection == Approx(1.0 - bad.epsilon_bound / 0.35));
    CHECK(bad.eta_intersection > 0.0);
    CHECK(bad.eta_intersection < 1.0);
    check_document_round_trip(bad);

    c.params.epsilon = ok.epsilon_bound;
    CHECK_FALSE(run_check_epsilon(c).admissible);
}

TEST_CASE("nullclines") {
    RunConfig c;
    c.nullclines.samples = 201;
    const NullclineData d = run_nullclines(c);
    REQUIRE(d.rows.size() == 201);
    CHECK(d.rows.front().eta == 0.0);
    CHECK(d.rows.back().eta == 1.0);
    for (const auto& row : d.rows) {
        CHECK(row.h_plus == Approx(row.F - row.G_plus));
        CHECK(row.h_minus == Approx(row.F - row.G_minus));
    }
    REQUIRE(d.annotations.h_plus_roots.size() == 2);
    REQUIRE(d.annotations.h_minus_roots.size() == 2);
    const auto eqs = all_equilibria(c.params);
    for (const auto& e : eqs) {
        const auto& roots = e.regime == Regime::Retreat ? d.annotations.h_plus_roots : d.annotations.h_minus_roots;
        const bool found = std::any_of(roots.begin(), roots.end(),
                                       [&](double r) { return std::abs(r - e.state.eta) < 1e-9; });
        CHECK(found);
    }
    CHECK(d.annotations.g_plus_pole == Approx(d.annotations.G_plus_pole));
    CHECK(d.annotations.g_minus_pole == Approx(d.annotations.G_minus_pole));
    CHECK(nullcline_rows(nullcline_table(d.rows)) == d.rows);
    check_document_round_trip(d.annotations);
}

TEST_CASE("sweep points") {
    RunConfig c;
    const ModelParameters base = c.params;
    const SweepRecord low = sweep_point(base, 1.5, c, std::nullopt);
    CHECK(low.outcome == SweepOutcome::LimitCycle);
    REQUIRE(low.orbit.has_value());
    CHECK(low.orbit->period > 0.0);

    const SweepRecord high = sweep_point(base, 2.5, c, low.orbit->fixed_point);
    CHECK(high.outcome == SweepOutcome::RegularSinkAdvance);
    CHECK_FALSE(high.orbit.has_value());
    REQUIRE(high.convergence_distance.has_value());
    CHECK(*high.convergence_distance < 1e-6);
    check_document_round_trip(high);

    for (auto o : {SweepOutcome::LimitCycle, SweepOutcome::RegularSinkAdvance, SweepOutcome::RegularSinkRetreat,
                   SweepOutcome::BoundaryEquilibrium, SweepOutcome::Undetermined}) {
        CHECK(parse_sweep_outcome(to_string(o)) == o);
    }
}

TEST_CASE("coarse sweep") {
    RunConfig c;
    c.sweep.step = 0.1;
    c.sweep.workers = 3;
    const auto grid = sweep_grid(c.sweep);
    REQUIRE(grid.size() == 11);
    CHECK(grid.back() == Approx(2.5));

    std::atomic<int> calls{0};
    const SweepReport r = run_sweep_b0(c, [&](const SweepRecord&) { ++calls; });
    CHECK(static_cast<std::size_t>(calls.load()) == r.records.size());
    CHECK(r.contiguous);
    CHECK(r.review_flags.empty());
    REQUIRE(r.records.size() == 12);
    for (std::size_t i = 1; i < r.records.size(); ++i) {
        CHECK(r.records[i].swept_value > r.records[i - 1].swept_value);
    }
    CHECK(r.records.front().outcome == SweepOutcome::LimitCycle);
    CHECK(r.records.back().outcome == SweepOutcome::RegularSinkAdvance);
    const auto boundary = std::find_if(r.records.begin(), r.records.end(), [](const SweepRecord& s) {
        return s.outcome == SweepOutcome::BoundaryEquilibrium;
    });
    REQUIRE(boundary != r.records.end());
    CHECK(boundary->refined);
    CHECK(boundary->swept_value == Approx(1.75).epsilon(1e-6));
    check_document_round_trip(r);

    // Worker count does not change the result.
    c.sweep.workers = 1;
    CHECK(run_sweep_b0(c).records == r.records);
}

TEST_CASE("commands write their files") {
    ScratchDir dir("commands");
    std::ostringstream log;
    RunConfig c = config_in(dir);
    c.params.epsilon = 0.3;

    auto files = cmd_equilibria(c, log);
    CHECK(files.front() == "run_config.txt");
    CHECK(parse_config(read_file(dir.file("run_config.txt"))) == c);
    const auto eq = from_document<EquilibriaReport>(read_file(dir.file("equilibria.json")));
    CHECK(eq == run_equilibria(c));

    c.integrator.max_time = 50.0;
    files = cmd_simulate(c, log);
    for (const auto& f : {"trajectory.csv", "events.csv", "projection.csv", "summary.json"}) {
        CHECK(std::find(files.begin(), files.end(), f) != files.end());
        CHECK(fs::exists(dir.file(f)));
    }

    files = cmd_orbit(c, log);
    for (const auto& f : {"orbit_trajectory.csv", "orbit_events.csv", "orbit_projection.csv", "orbit_summary.json"}) {
        CHECK(fs::exists(dir.file(f)));
    }
    std::istringstream ev(read_file(dir.file("orbit_events.csv")));
    CHECK(read_csv(ev, event_header()).rows.size() == 2);

    c.output.format = TableFormat::Json;
    cmd_nullclines(c, log);
    CHECK(fs::exists(dir.file("nullclines.json")));
    CHECK(fs::exists(dir.file("nullcline_roots.json")));
    cmd_check_epsilon(c, log);
    CHECK(from_document<EpsilonReport>(read_file(dir.file("epsilon.json"))).admissible);
    CHECK(log.str().find("epsilon_bound 0.342857142857") != std::string::npos);
}

TEST_CASE("runs are byte-for-byte reproducible") {
    ScratchDir a("repro_a"), b("repro_b");
    std::ostringstream log;
    RunConfig ca = config_in(a), cb = config_in(b);
    for (RunConfig* c : {&ca, &cb}) {
        c->params.epsilon = 0.03;
        c->sweep.step = 0.25;
    }
    cmd_orbit(ca, log);
    cmd_orbit(cb, log);
    cmd_sweep_b0(ca, log);
    cmd_sweep_b0(cb, log);
    for (const auto& f : {"orbit_trajectory.csv", "orbit_events.csv", "orbit_summary.json", "sweep.json"}) {
        CHECK(read_file(a.file(f)) == read_file(b.file(f)));
    }
    std::size_t points = 0;
    for (const auto& entry : fs::directory_iterator(a.file("sweep_points"))) {
        const std::string name = entry.path().filename().string();
        CHECK(read_file(a.file("sweep_points/" + name)) == read_file(b.file("sweep_points/" + name)));
        ++points;
    }
    CHECK(points == 6);  // five grid points plus the refined boundary equilibrium
}
