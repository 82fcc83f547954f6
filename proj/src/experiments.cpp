#include "glacial/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "glacial/errors.hpp"
#include "glacial/io.hpp"

namespace glacial {

std::string_view to_string(SweepOutcome o) noexcept {
    switch (o) {
        case SweepOutcome::LimitCycle: return "limit_cycle";
        case SweepOutcome::RegularSinkAdvance: return "regular_sink_advance";
        case SweepOutcome::RegularSinkRetreat: return "regular_sink_retreat";
        case SweepOutcome::BoundaryEquilibrium: return "boundary_equilibrium";
        case SweepOutcome::Undetermined: return "undetermined";
    }
    return "undetermined";
}

SweepOutcome parse_sweep_outcome(std::string_view text) {
    for (auto o : {SweepOutcome::LimitCycle, SweepOutcome::RegularSinkAdvance, SweepOutcome::RegularSinkRetreat,
                   SweepOutcome::BoundaryEquilibrium, SweepOutcome::Undetermined}) {
        if (to_string(o) == text) return o;
    }
    throw std::invalid_argument("unknown sweep outcome '" + std::string(text) + "'");
}

std::vector<TrajectoryRow> flatten(const HybridTrajectory& traj) {
    std::vector<TrajectoryRow> rows;
    for (const auto& seg : traj.segments) {
        for (const auto& s : seg.samples) rows.push_back({s.t, s.x, seg.regime});
    }
    return rows;
}

namespace {

std::string fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

std::string brief(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

/// Regime implied by the side of the plane; on the plane, the one both
/// fields cross into.
Regime infer_regime(const State& x, const ModelParameters& p, const IntegratorConfig& c) {
    const double h = switching_function(x, p);
    if (std::abs(h) > c.event_tol) return h > 0.0 ? Regime::Retreat : Regime::Advance;
    const BoundaryKind kind = classify_boundary_point(x, p, {c.event_tol, c.tangency_tol});
    return kind == BoundaryKind::SigmaPlus ? Regime::Advance : Regime::Retreat;
}

}  // namespace

// ---------------------------------------------------------------------------
// Computations

EquilibriaReport run_equilibria(const RunConfig& config) {
    config.validate();
    return {config.params, all_equilibria(config.params), config.params.warnings()};
}

SimulationRun run_simulate(const RunConfig& config) {
    config.validate();
    const ModelParameters& p = config.params;
    const State start{config.simulate.w, config.simulate.eta, config.simulate.xi};
    if (!in_state_space(start)) throw std::invalid_argument("simulate: initial state outside the state space");
    const Regime regime = config.simulate.regime.value_or(infer_regime(start, p, config.integrator));

    SimulationRun run;
    run.trajectory = evolve_hybrid(start, regime, p, config.integrator);
    const auto& t = run.trajectory;
    SimulationSummary& s = run.summary;
    s.params = p;
    s.start = start;
    s.start_regime = regime;
    s.termination = t.termination;
    s.diagnostic = t.diagnostic;
    s.final_time = t.final_time;
    s.final_state = t.final_state;
    s.final_regime = t.final_regime;
    s.segments = t.segments.size();
    for (const auto& seg : t.segments) s.samples += seg.samples.size();
    s.events = t.events.size();
    s.crossings = t.crossing_count();
    return run;
}

OrbitRun run_orbit(const RunConfig& config) {
    config.validate();
    const ModelParameters& p = config.params;
    const OrbitSettings& o = config.orbit;
    const double bound = epsilon_bound(p);
    if (!(p.epsilon < bound) && !o.allow_inadmissible_epsilon) {
        throw std::invalid_argument("epsilon = " + brief(p.epsilon) +
                                    " is not below the tangency bound " + fixed(bound, 12) +
                                    "; set orbit.allow_inadmissible_epsilon = true to search anyway");
    }

    const SectionMaps maps(p, config.integrator);
    OrbitOptions options;
    options.tolerance = o.tolerance;
    options.max_iterations = o.max_iterations;
    options.enforce_epsilon_bound = !o.allow_inadmissible_epsilon;

    OrbitRun run;
    OrbitReport& r = run.report;
    r.params = p;
    r.epsilon_bound = bound;
    r.seed = o.seed_w ? SectionPoint{*o.seed_w, *o.seed_eta} : maps.retreat_sink_projection();
    r.orbit = maps.find_periodic_orbit(r.seed, options);

    // Random seeds from SigmaPlus inside the guard set and the state space:
    // eta where the ice line is non-negative, w between the separatrix and g_plus.
    std::mt19937_64 rng(o.rng_seed);
    const double eta_lo = p.a / (p.a + p.b);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    r.seeds_agree = true;
    for (int i = 0; i < o.random_seeds; ++i) {
        SectionPoint x;
        bool admissible = false;
        for (int draw = 0; draw < o.max_draws && !admissible; ++draw) {
            const double eta = eta_lo + (1.0 - eta_lo) * u01(rng);
            const double w_lo = maps.guard().separatrix(eta);
            const double w_hi = tangency_curve(eta, Regime::Retreat, p);
            x = {w_lo + (w_hi - w_lo) * u01(rng), eta};
            admissible = in_state_space(x.on_plane(p)) && maps.in_guard_set(x) &&
                         maps.classify(x) == BoundaryKind::SigmaPlus;
            if (!admissible) ++r.rejected_draws;
        }
        SeedTrial trial;
        trial.seed = x;
        if (!admissible) {
            trial.failure = "no admissible seed in " + std::to_string(o.max_draws) + " draws";
        } else {
            try {
                const OrbitResult other = maps.find_periodic_orbit(x, options);
                trial.converged = true;
                trial.fixed_point = other.fixed_point;
                trial.distance = section_distance(other.fixed_point, r.orbit.fixed_point, p);
            } catch (const NumericalError& e) {
                trial.failure = e.what();
            }
        }
        if (!trial.converged || !(trial.distance <= o.agreement_tol)) r.seeds_agree = false;
        r.seed_trials.push_back(std::move(trial));
    }

    // One closed period from the fixed point: advance flow to SigmaMinus,
    // retreat flow back to SigmaPlus.
    IntegratorConfig c = config.integrator;
    c.max_events = 2;
    c.record_samples = true;
    c.max_time = std::max(c.max_time, 2.0 * r.orbit.period + 1.0);
    run.period = evolve_hybrid(r.orbit.fixed_point.on_plane(p), Regime::Advance, p, c);
    r.period_crossings = run.period.crossing_count();
    r.period_time = run.period.final_time;
    r.period_closure = norm(run.period.final_state - r.orbit.fixed_point.on_plane(p));
    r.eta_min = r.eta_max = r.orbit.fixed_point.eta;
    r.xi_min = r.xi_max = gamma(r.orbit.fixed_point.eta, p);
    for (const auto& row : flatten(run.period)) {
        r.eta_min = std::min(r.eta_min, row.x.eta);
        r.eta_max = std::max(r.eta_max, row.x.eta);
        r.xi_min = std::min(r.xi_min, row.x.xi);
        r.xi_max = std::max(r.xi_max, row.x.xi);
    }
    return run;
}

std::vector<double> sweep_grid(const SweepSettings& s) {
    const auto n = static_cast<std::size_t>(std::floor((s.stop - s.start) / s.step + 1e-9)) + 1;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = s.start + static_cast<double>(i) * s.step;
    return grid;
}

SweepRecord sweep_point(const ModelParameters& base, double b0, const RunConfig& config,
                        const std::optional<SectionPoint>& reference_orbit_point) {
    SweepRecord rec;
    rec.swept_value = b0;
    ModelParameters p = base;
    p.b0 = b0;
    try {
        p.validate();
        rec.equilibria = all_equilibria(p);
        const EquilibriumReport* adv = find_sink(rec.equilibria, Regime::Advance);
        const EquilibriumReport* ret = find_sink(rec.equilibria, Regime::Retreat);

        std::string orbit_failure;
        try {
            const SectionMaps maps(p, config.integrator);
            OrbitOptions options;
            options.tolerance = config.orbit.tolerance;
            options.max_iterations = config.orbit.max_iterations;
            rec.orbit = maps.find_periodic_orbit(maps.retreat_sink_projection(), options);
        } catch (const NumericalError& e) {
            orbit_failure = e.what();
        } catch (const std::invalid_argument& e) {
            orbit_failure = e.what();
        }

        auto is = [](const EquilibriumReport* e, Classification c) { return e && e->classification == c; };
        if (is(adv, Classification::Boundary) || is(ret, Classification::Boundary)) {
            rec.outcome = SweepOutcome::BoundaryEquilibrium;
            rec.note = is(adv, Classification::Boundary) ? "advance sink on the switching plane"
                                                         : "retreat sink on the switching plane";
        } else if (is(adv, Classification::Regular)) {
            rec.outcome = SweepOutcome::RegularSinkAdvance;
            if (rec.orbit) rec.note = "periodic orbit coexists with the regular advance sink";
            if (reference_orbit_point) {
                IntegratorConfig c = config.integrator;
                c.record_samples = false;
                c.max_time = config.sweep.convergence_time;
                const auto traj = evolve_hybrid(reference_orbit_point->on_plane(p), Regime::Advance, p, c);
                rec.convergence_distance = norm(traj.final_state - adv->state);
            }
        } else if (is(ret, Classification::Regular)) {
            rec.outcome = SweepOutcome::RegularSinkRetreat;
        } else if (rec.orbit && rec.orbit->closure_error < config.orbit.tolerance) {
            rec.outcome = SweepOutcome::LimitCycle;
        } else {
            rec.outcome = SweepOutcome::Undetermined;
            rec.note = orbit_failure.empty() ? "no regular sink and no periodic orbit" : orbit_failure;
        }
    } catch (const std::exception& e) {
        rec.outcome = SweepOutcome::Undetermined;
        rec.orbit.reset();
        rec.note = e.what();
    }
    return rec;
}

namespace {

/// Switching function at the advance sink, or NaN when there is none.
double advance_sink_side(const std::vector<EquilibriumReport>& eqs, const ModelParameters& p) {
    const auto* adv = find_sink(eqs, Regime::Advance);
    return adv ? switching_function(adv->state, p) : std::nan("");
}

/// b0 in (lo, hi) at which the advance sink lies on the plane to within the
/// boundary-equilibrium tolerance. h_lo and h_hi have opposite signs.
double bisect_boundary(ModelParameters p, double lo, double hi, double h_lo) {
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        p.b0 = mid;
        const double h = advance_sink_side(all_equilibria(p), p);
        if (std::isnan(h)) break;
        if (std::abs(h) < kBoundaryEquilibriumTolerance) return mid;
        if ((h < 0.0) == (h_lo < 0.0)) {
            lo = mid;
            h_lo = h;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-15) return mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SweepReport run_sweep_b0(const RunConfig& config, const SweepCallback& on_point) {
    config.validate();
    SweepReport report;
    report.base_params = config.params;
    report.settings = config.sweep;

    // The orbit of the base configuration, if it has one, is where the
    // convergence runs toward a regular advance sink start.
    std::optional<SectionPoint> reference;
    try {
        const SectionMaps maps(config.params, config.integrator);
        OrbitOptions options;
        options.tolerance = config.orbit.tolerance;
        options.max_iterations = config.orbit.max_iterations;
        reference = maps.find_periodic_orbit(maps.retreat_sink_projection(), options).fixed_point;
    } catch (const std::exception&) {
        try {
            reference = SectionMaps(config.params, config.integrator).retreat_sink_projection();
        } catch (const std::exception&) {
        }
    }

    const std::vector<double> grid = sweep_grid(config.sweep);
    std::vector<SweepRecord> records(grid.size());
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const auto workers = std::min<std::size_t>(
        grid.size(), config.sweep.workers > 0 ? static_cast<std::size_t>(config.sweep.workers) : hw);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            records[i] = sweep_point(config.params, grid[i], config, reference);
            if (on_point) on_point(records[i]);
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < workers; ++k) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    if (config.sweep.refine) {
        std::vector<SweepRecord> extra;
        for (std::size_t i = 0; i + 1 < records.size(); ++i) {
            ModelParameters lo_p = config.params;
            lo_p.b0 = grid[i];
            ModelParameters hi_p = config.params;
            hi_p.b0 = grid[i + 1];
            const double h_lo = advance_sink_side(records[i].equilibria, lo_p);
            const double h_hi = advance_sink_side(records[i + 1].equilibria, hi_p);
            if (!(h_lo * h_hi < 0.0)) continue;
            const double b0 = bisect_boundary(config.params, grid[i], grid[i + 1], h_lo);
            SweepRecord rec = sweep_point(config.params, b0, config, reference);
            rec.refined = true;
            if (on_point) on_point(rec);
            extra.push_back(std::move(rec));
        }
        records.insert(records.end(), extra.begin(), extra.end());
        std::stable_sort(records.begin(), records.end(),
                         [](const auto& l, const auto& r) { return l.swept_value < r.swept_value; });
    }

    // Each outcome should form one block; a repeat after a different outcome
    // is flagged for review.
    std::vector<SweepOutcome> closed;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const SweepOutcome o = records[i].outcome;
        if (o == SweepOutcome::Undetermined) {
            report.review_flags.push_back("undetermined at b0 = " + brief(records[i].swept_value) + ": " +
                                          records[i].note);
        }
        if (i > 0 && records[i - 1].outcome != o) {
            closed.push_back(records[i - 1].outcome);
            if (std::find(closed.begin(), closed.end(), o) != closed.end()) {
                report.contiguous = false;
                report.review_flags.push_back(std::string(to_string(o)) + " reappears at b0 = " +
                                              brief(records[i].swept_value));
            }
        }
    }
    report.records = std::move(records);
    return report;
}

NullclineData run_nullclines(const RunConfig& config) {
    config.validate();
    const ModelParameters& p = config.params;
    NullclineData out;
    const int n = config.nullclines.samples;
    out.rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double eta = static_cast<double>(i) / (n - 1);
        NullclineRow r;
        r.eta = eta;
        r.F = F(eta, p);
        r.G_plus = G(eta, Regime::Retreat, p);
        r.G_minus = G(eta, Regime::Advance, p);
        r.g_plus = tangency_curve(eta, Regime::Retreat, p);
        r.g_minus = tangency_curve(eta, Regime::Advance, p);
        r.gamma = gamma(eta, p);
        r.h_plus = r.F - r.G_plus;
        r.h_minus = r.F - r.G_minus;
        out.rows.push_back(r);
    }
    for (const auto& e : find_planar_equilibria(Regime::Retreat, p)) out.annotations.h_plus_roots.push_back(e.eta);
    for (const auto& e : find_planar_equilibria(Regime::Advance, p)) out.annotations.h_minus_roots.push_back(e.eta);
    out.annotations.g_plus_pole = tangency_curve(1.0, Regime::Retreat, p);
    out.annotations.G_plus_pole = G(1.0, Regime::Retreat, p);
    out.annotations.g_minus_pole = tangency_curve(1.0, Regime::Advance, p);
    out.annotations.G_minus_pole = G(1.0, Regime::Advance, p);
    return out;
}

EpsilonReport run_check_epsilon(const RunConfig& config) {
    config.validate();
    const ModelParameters& p = config.params;
    EpsilonReport r;
    r.epsilon = p.epsilon;
    r.epsilon_bound = epsilon_bound(p);
    r.admissible = p.epsilon < r.epsilon_bound;
    r.eta_intersection = tangency_intersection_eta(p);
    r.intersection_in_unit_interval = r.eta_intersection >= 0.0 && r.eta_intersection <= 1.0;
    return r;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

class OutputDir {
public:
    explicit OutputDir(const RunConfig& config) : config_(config), dir_(config.output.dir) {
        write("run_config.txt", format_config(config));
    }

    void write(const std::string& name, const std::string& contents) {
        write_file_atomic((std::filesystem::path(dir_) / name).string(), contents);
        files_.push_back(name);
    }

    void table(std::string_view stem, const Table& t) {
        std::ostringstream out;
        write_table(out, t, config_.output.format);
        write(table_file(stem, config_.output.format), out.str());
    }

    std::vector<std::string> files() && { return std::move(files_); }

private:
    const RunConfig& config_;
    std::string dir_;
    std::vector<std::string> files_;
};

std::string complex_text(std::complex<double> z) {
    std::string s = fixed(z.real(), 4);
    if (z.imag() != 0.0) s += (z.imag() < 0 ? " - " : " + ") + fixed(std::abs(z.imag()), 4) + "i";
    return s;
}

}  // namespace

std::vector<std::string> cmd_equilibria(const RunConfig& config, std::ostream& log) {
    const EquilibriaReport r = run_equilibria(config);
    OutputDir out(config);
    out.write("equilibria.json", to_document(r));
    for (const auto& w : r.warnings) log << "warning: " << w << '\n';
    for (const auto& e : r.equilibria) {
        log << to_string(e.regime) << ' ' << to_string(e.stability) << " (w, eta, xi) = (" << fixed(e.state.w, 4)
            << ", " << fixed(e.state.eta, 5) << ", " << fixed(e.state.xi, 5) << ") " << to_string(e.classification)
            << "  eigenvalues";
        for (const auto& z : e.eigenvalues) log << ' ' << complex_text(z);
        log << '\n';
    }
    return std::move(out).files();
}

std::vector<std::string> cmd_simulate(const RunConfig& config, std::ostream& log) {
    const SimulationRun run = run_simulate(config);
    OutputDir out(config);
    const auto rows = flatten(run.trajectory);
    out.table("trajectory", trajectory_table(rows));
    out.table("events", event_table(run.trajectory.events));
    out.table("projection", projection_table(rows));
    out.write("summary.json", to_document(run.summary));
    const auto& s = run.summary;
    log << "termination " << to_string(s.termination) << " at t = " << brief(s.final_time) << ", "
        << s.crossings << " crossings, " << s.samples << " samples\n";
    if (!s.diagnostic.empty()) log << "diagnostic: " << s.diagnostic << '\n';
    return std::move(out).files();
}

std::vector<std::string> cmd_orbit(const RunConfig& config, std::ostream& log) {
    const OrbitRun run = run_orbit(config);
    OutputDir out(config);
    const auto rows = flatten(run.period);
    out.table("orbit_trajectory", trajectory_table(rows));
    out.table("orbit_events", event_table(run.period.events));
    out.table("orbit_projection", projection_table(rows));
    out.write("orbit_summary.json", to_document(run.report));
    const auto& r = run.report;
    log << "epsilon " << brief(r.params.epsilon) << " (bound " << fixed(r.epsilon_bound, 6) << ")\n"
        << "fixed point (w, eta) = (" << brief(r.orbit.fixed_point.w) << ", "
        << brief(r.orbit.fixed_point.eta) << ")\n"
        << "period " << brief(r.orbit.period) << ", closure " << brief(r.orbit.closure_error)
        << ", iterations " << r.orbit.iterations << ", crossings per period " << r.period_crossings << '\n';
    int agreeing = 0;
    for (const auto& t : r.seed_trials) agreeing += t.converged && t.distance <= config.orbit.agreement_tol;
    log << agreeing << " of " << r.seed_trials.size() << " random seeds agree\n";
    return std::move(out).files();
}

std::vector<std::string> cmd_sweep_b0(const RunConfig& config, std::ostream& log) {
    const std::filesystem::path points_dir = std::filesystem::path(config.output.dir) / "sweep_points";
    std::mutex m;
    std::vector<std::string> point_files;
    const SweepReport report = run_sweep_b0(config, [&](const SweepRecord& rec) {
        const std::string name = "b0_" + fixed(rec.swept_value, 12) + ".json";
        write_file_atomic((points_dir / name).string(), to_document(rec));
        const std::lock_guard lock(m);
        point_files.push_back("sweep_points/" + name);
    });
    OutputDir out(config);
    out.write("sweep.json", to_document(report));
    for (const auto& rec : report.records) {
        log << fixed(rec.swept_value, 6) << (rec.refined ? "*" : " ") << ' ' << to_string(rec.outcome);
        if (rec.orbit) log << "  period " << fixed(rec.orbit->period, 4);
        if (rec.convergence_distance) log << "  distance to sink " << brief(*rec.convergence_distance);
        log << '\n';
    }
    log << (report.contiguous ? "outcomes form contiguous blocks\n" : "outcomes interleave; see review_flags\n");
    for (const auto& f : report.review_flags) log << "review: " << f << '\n';
    std::sort(point_files.begin(), point_files.end());
    auto files = std::move(out).files();
    files.insert(files.end(), point_files.begin(), point_files.end());
    return files;
}

std::vector<std::string> cmd_nullclines(const RunConfig& config, std::ostream& log) {
    const NullclineData d = run_nullclines(config);
    OutputDir out(config);
    out.table("nullclines", nullcline_table(d.rows));
    out.write("nullcline_roots.json", to_document(d.annotations));
    log << "h_plus roots:";
    for (double e : d.annotations.h_plus_roots) log << ' ' << fixed(e, 6);
    log << "\nh_minus roots:";
    for (double e : d.annotations.h_minus_roots) log << ' ' << fixed(e, 6);
    log << "\npole: g_plus(1) = " << brief(d.annotations.g_plus_pole)
        << ", g_minus(1) = " << brief(d.annotations.g_minus_pole) << '\n';
    return std::move(out).files();
}

std::vector<std::string> cmd_check_epsilon(const RunConfig& config, std::ostream& log) {
    const EpsilonReport r = run_check_epsilon(config);
    OutputDir out(config);
    out.write("epsilon.json", to_document(r));
    log << "epsilon_bound " << fixed(r.epsilon_bound, 12) << '\n'
        << "epsilon " << brief(r.epsilon) << (r.admissible ? " admissible" : " inadmissible") << '\n'
        << "eta(epsilon) " << brief(r.eta_intersection)
        << (r.intersection_in_unit_interval ? " (tangency curves meet on the plane)\n"
                                            : " (tangency curves disjoint on [0, 1])\n");
    return std::move(out).files();
}

}  // namespace glacial
