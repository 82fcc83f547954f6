#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glacial/config.hpp"
#include "glacial/equilibria.hpp"
#include "glacial/integrator.hpp"
#include "glacial/section_maps.hpp"

namespace glacial {

// ---------------------------------------------------------------------------
// Records

struct EquilibriaReport {
    ModelParameters params;
    std::vector<EquilibriumReport> equilibria;
    std::vector<std::string> warnings;

    bool operator==(const EquilibriaReport&) const = default;
};

/// One row of a trajectory table; the regime is that of the segment the
/// sample belongs to.
struct TrajectoryRow {
    double t = 0.0;
    State x;
    Regime regime = Regime::Retreat;

    bool operator==(const TrajectoryRow&) const = default;
};

std::vector<TrajectoryRow> flatten(const HybridTrajectory& traj);

struct SimulationSummary {
    ModelParameters params;
    State start;
    Regime start_regime = Regime::Retreat;
    Termination termination = Termination::MaxTime;
    std::string diagnostic;
    double final_time = 0.0;
    State final_state;
    Regime final_regime = Regime::Retreat;
    std::size_t segments = 0;
    std::size_t samples = 0;
    std::size_t events = 0;
    std::size_t crossings = 0;

    bool operator==(const SimulationSummary&) const = default;
};

struct SeedTrial {
    SectionPoint seed;
    bool converged = false;
    SectionPoint fixed_point;
    double distance = 0.0;  ///< to the primary fixed point, embedded norm
    std::string failure;

    bool operator==(const SeedTrial&) const = default;
};

struct OrbitReport {
    ModelParameters params;
    double epsilon_bound = 0.0;
    SectionPoint seed;
    OrbitResult orbit;
    std::vector<SeedTrial> seed_trials;
    int rejected_draws = 0;
    bool seeds_agree = false;
    /// Closed period integrated from the fixed point.
    std::size_t period_crossings = 0;
    double period_time = 0.0;
    double period_closure = 0.0;
    double eta_min = 0.0;
    double eta_max = 0.0;
    double xi_min = 0.0;
    double xi_max = 0.0;

    bool operator==(const OrbitReport&) const = default;
};

enum class SweepOutcome { LimitCycle, RegularSinkAdvance, RegularSinkRetreat, BoundaryEquilibrium, Undetermined };

std::string_view to_string(SweepOutcome o) noexcept;
SweepOutcome parse_sweep_outcome(std::string_view text);

struct SweepRecord {
    double swept_value = 0.0;
    SweepOutcome outcome = SweepOutcome::Undetermined;
    std::optional<OrbitResult> orbit;
    std::vector<EquilibriumReport> equilibria;
    /// Inserted by bisection between grid points rather than taken from the grid.
    bool refined = false;
    /// Distance to the advance sink after the convergence run (RegularSinkAdvance only).
    std::optional<double> convergence_distance;
    std::string note;

    bool operator==(const SweepRecord&) const = default;
};

struct SweepReport {
    ModelParameters base_params;
    SweepSettings settings;
    std::vector<SweepRecord> records;  ///< ordered by swept value
    /// Each outcome occupies a single contiguous block of the sweep.
    bool contiguous = true;
    std::vector<std::string> review_flags;

    bool operator==(const SweepReport&) const = default;
};

struct NullclineRow {
    double eta = 0.0;
    double F = 0.0;
    double G_plus = 0.0;
    double G_minus = 0.0;
    double g_plus = 0.0;
    double g_minus = 0.0;
    double gamma = 0.0;
    double h_plus = 0.0;   ///< F - G_plus
    double h_minus = 0.0;  ///< F - G_minus

    bool operator==(const NullclineRow&) const = default;
};

struct NullclineAnnotations {
    std::vector<double> h_plus_roots;
    std::vector<double> h_minus_roots;
    double g_plus_pole = 0.0;  ///< g_plus(1), equal to G_plus(1)
    double G_plus_pole = 0.0;
    double g_minus_pole = 0.0;
    double G_minus_pole = 0.0;

    bool operator==(const NullclineAnnotations&) const = default;
};

struct NullclineData {
    std::vector<NullclineRow> rows;
    NullclineAnnotations annotations;

    bool operator==(const NullclineData&) const = default;
};

struct EpsilonReport {
    double epsilon = 0.0;
    double epsilon_bound = 0.0;
    bool admissible = false;  ///< strictly below the bound
    double eta_intersection = 0.0;
    bool intersection_in_unit_interval = false;

    bool operator==(const EpsilonReport&) const = default;
};

// ---------------------------------------------------------------------------
// Computations. These do not touch the file system.

EquilibriaReport run_equilibria(const RunConfig& config);

struct SimulationRun {
    HybridTrajectory trajectory;
    SimulationSummary summary;
};
/// Throws std::invalid_argument when the initial state is outside the state
/// space or its regime does not match the side of the plane.
SimulationRun run_simulate(const RunConfig& config);

struct OrbitRun {
    OrbitReport report;
    HybridTrajectory period;  ///< one period from the fixed point
};
/// Throws std::invalid_argument when epsilon is inadmissible and the
/// override is off; NoOrbitFound and MapUndefined propagate.
OrbitRun run_orbit(const RunConfig& config);

/// Grid of swept values, computed as start + i * step.
std::vector<double> sweep_grid(const SweepSettings& s);
/// Full pipeline for one value of b0.
SweepRecord sweep_point(const ModelParameters& base, double b0, const RunConfig& config,
                        const std::optional<SectionPoint>& reference_orbit_point);
/// Called from worker threads as each point (grid or refined) completes.
using SweepCallback = std::function<void(const SweepRecord&)>;
SweepReport run_sweep_b0(const RunConfig& config, const SweepCallback& on_point = {});

NullclineData run_nullclines(const RunConfig& config);
EpsilonReport run_check_epsilon(const RunConfig& config);

// ---------------------------------------------------------------------------
// Commands: compute, write files into config.output.dir and a short
// human-readable account to `log`. Each returns the files written, relative
// to the output directory.

std::vector<std::string> cmd_equilibria(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_simulate(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_orbit(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_sweep_b0(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_nullclines(const RunConfig& config, std::ostream& log);
std::vector<std::string> cmd_check_epsilon(const RunConfig& config, std::ostream& log);

}  // namespace glacial
