#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "glacial/model.hpp"

namespace glacial {

enum class StepMode { FixedClassicalRK4, EmbeddedAdaptive };

std::string_view to_string(StepMode m) noexcept;
StepMode parse_step_mode(std::string_view text);

struct IntegratorConfig {
    StepMode step_mode = StepMode::EmbeddedAdaptive;
    /// Step size in fixed mode; initial step in adaptive mode.
    double base_step = 1e-3;
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    /// Largest step the adaptive controller may take.
    double max_step = 1.0;
    /// Bound on |switching_function| at a located crossing.
    double event_tol = 1e-10;
    /// Bound on |w - g(eta)| below which a crossing counts as a tangency.
    double tangency_tol = 1e-9;
    double max_time = 1e4;
    std::size_t max_events = 10000;
    /// Keep the sampled states of each segment. Section maps switch this off.
    bool record_samples = true;
    /// 0 records every accepted step; a positive value resamples each segment
    /// on a uniform time grid by linear interpolation.
    double sample_interval = 0.0;

    /// Throws std::invalid_argument on a non-positive step, tolerance or horizon.
    void validate() const;

    bool operator==(const IntegratorConfig&) const = default;
};

struct Sample {
    double t = 0.0;
    State x;

    bool operator==(const Sample&) const = default;
};

struct Segment {
    Regime regime = Regime::Retreat;
    std::vector<Sample> samples;
};

struct CrossingEvent {
    double time = 0.0;
    State state;
    BoundaryKind kind = BoundaryKind::SigmaPlus;
    Regime regime_before = Regime::Retreat;
    Regime regime_after = Regime::Retreat;

    bool operator==(const CrossingEvent&) const = default;
};

enum class Termination {
    MaxTime,         ///< reached config.max_time
    SlidingEntry,    ///< reached a sliding part of the switching plane
    LeftStateSpace,  ///< eta or xi left [0, 1]
    EventBudget,     ///< recorded config.max_events crossings
    Tangency,        ///< hit the plane on (or numerically indistinguishable from) a tangency curve
};

std::string_view to_string(Termination t) noexcept;
Termination parse_termination(std::string_view text);

/// Filippov solution through transversal crossings: smooth segments of
/// alternating regime joined at crossing events.
///
/// Each crossing state is the last sample of the segment it ends; the next
/// segment starts with its first step, so sample times increase strictly
/// across the whole trajectory.
struct HybridTrajectory {
    std::vector<Segment> segments;
    std::vector<CrossingEvent> events;
    Termination termination = Termination::MaxTime;
    double final_time = 0.0;
    State final_state;
    Regime final_regime = Regime::Retreat;
    std::string diagnostic;

    /// Number of events that switched the regime.
    std::size_t crossing_count() const;
};

/// Advances the regime's smooth field by exactly `dt`. Fixed mode takes one
/// classical Runge-Kutta step; adaptive mode takes as many Dormand-Prince
/// sub-steps as its tolerances require. Throws StepSizeUnderflow if the
/// adaptive step collapses.
State smooth_step(const State& x, Regime r, double dt, const ModelParameters& p,
                  const IntegratorConfig& config);

struct CrossingLocation {
    double time_fraction = 0.0;  ///< position of the crossing within the step
    State state;                 ///< |switching_function| <= config.event_tol
};

/// Locates the crossing of the switching plane within a step of length `dt`
/// from `before` to `after` (taken with the regime's field). Bisects on the
/// step fraction, re-stepping from `before` with the configured method, and
/// polishes the final bracket with secant steps.
///
/// Requires side_sign(r) * h(after) < 0 <= side_sign(r) * h(before) + event_tol;
/// throws std::invalid_argument otherwise and CrossingNotConverged when 100
/// bisections do not reach the event tolerance.
CrossingLocation locate_crossing(const State& before, const State& after, double dt, Regime r,
                                 const ModelParameters& p, const IntegratorConfig& config);

struct SlidingVector {
    State velocity;  ///< (1 - q) V_advance + q V_retreat, tangent to the plane
    double q = 0.0;
};

/// Filippov convex combination of the two fields that is tangent to the
/// switching plane. Throws std::invalid_argument off the plane and NotSliding
/// where no weight in [0, 1] achieves tangency (transversal crossing points).
SlidingVector filippov_sliding_field(const State& x, const ModelParameters& p,
                                     BoundaryTolerance tol = {});

/// Integrates the switching system from `start`.
///
/// Off the plane, `start_regime` must match the half-space of `start`. On
/// the plane (|h| <= event_tol) it must be the regime into whose half-space
/// both fields point: Advance on SigmaPlus, Retreat on SigmaMinus. Starts on
/// a sliding or tangency point terminate immediately. Throws
/// std::invalid_argument for a start outside the state space or a regime
/// mismatch.
HybridTrajectory evolve_hybrid(const State& start, Regime start_regime, const ModelParameters& p,
                               const IntegratorConfig& config);

}  // namespace glacial
