#include "glacial/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "glacial/errors.hpp"
#include "glacial/runge_kutta.hpp"

namespace glacial {

std::string_view to_string(StepMode m) noexcept {
    return m == StepMode::FixedClassicalRK4 ? "fixed_rk4" : "adaptive";
}

StepMode parse_step_mode(std::string_view text) {
    if (text == "fixed_rk4") return StepMode::FixedClassicalRK4;
    if (text == "adaptive") return StepMode::EmbeddedAdaptive;
    throw std::invalid_argument("unknown step mode '" + std::string(text) + "'");
}

std::string_view to_string(Termination t) noexcept {
    switch (t) {
        case Termination::MaxTime: return "max_time";
        case Termination::SlidingEntry: return "sliding_entry";
        case Termination::LeftStateSpace: return "left_state_space";
        case Termination::EventBudget: return "event_budget";
        case Termination::Tangency: return "tangency";
    }
    return "unknown";
}

Termination parse_termination(std::string_view text) {
    for (auto t : {Termination::MaxTime, Termination::SlidingEntry, Termination::LeftStateSpace,
                   Termination::EventBudget, Termination::Tangency}) {
        if (to_string(t) == text) return t;
    }
    throw std::invalid_argument("unknown termination '" + std::string(text) + "'");
}

void IntegratorConfig::validate() const {
    if (!(base_step > 0.0)) throw std::invalid_argument("integrator.base_step must be positive");
    if (!(event_tol > 0.0)) throw std::invalid_argument("integrator.event_tol must be positive");
    if (!(tangency_tol > 0.0)) throw std::invalid_argument("integrator.tangency_tol must be positive");
    if (!(max_time > 0.0)) throw std::invalid_argument("integrator.max_time must be positive");
    if (max_events == 0) throw std::invalid_argument("integrator.max_events must be at least 1");
    if (!(sample_interval >= 0.0)) {
        throw std::invalid_argument("integrator.sample_interval must be non-negative");
    }
    if (step_mode == StepMode::EmbeddedAdaptive) {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
            throw std::invalid_argument("adaptive mode requires positive rel_tol and abs_tol");
        }
        if (!(max_step > 0.0)) throw std::invalid_argument("integrator.max_step must be positive");
    }
}

std::size_t HybridTrajectory::crossing_count() const {
    return static_cast<std::size_t>(std::count_if(events.begin(), events.end(), [](const auto& e) {
        return e.regime_before != e.regime_after;
    }));
}

namespace {

struct FieldOf {
    Regime regime;
    const ModelParameters& params;
    State operator()(const State& x) const { return vector_field(x, regime, params); }
};

/// Single step of the configured method without error control.
State raw_step(const State& x, Regime r, double dt, const ModelParameters& p, StepMode mode) {
    const FieldOf f{r, p};
    if (mode == StepMode::FixedClassicalRK4) return rk::classical_step(f, x, dt);
    return rk::dormand_prince_step(f, x, dt).y;
}

double error_norm(const State& x, const State& y, const State& err, const IntegratorConfig& c) {
    auto scaled = [&](double xi, double yi, double ei) {
        return ei / (c.abs_tol + c.rel_tol * std::max(std::abs(xi), std::abs(yi)));
    };
    const double e0 = scaled(x.w, y.w, err.w);
    const double e1 = scaled(x.eta, y.eta, err.eta);
    const double e2 = scaled(x.xi, y.xi, err.xi);
    return std::sqrt((e0 * e0 + e1 * e1 + e2 * e2) / 3.0);
}

/// Step-size controller shared by smooth_step and evolve_hybrid.
class AdaptiveStepper {
public:
    AdaptiveStepper(Regime r, const ModelParameters& p, const IntegratorConfig& c)
        : regime_(r), params_(p), config_(c), h_(std::min(c.base_step, c.max_step)) {}

    /// Switches field and restarts step control from base_step: the solution
    /// is only continuous across the plane, so the old step says little.
    void restart(Regime r) {
        regime_ = r;
        h_ = std::min(config_.base_step, config_.max_step);
    }

    /// Attempts steps from (t, x) no longer than `limit` until one is accepted;
    /// returns the accepted step length and writes the new state.
    double advance(double t, const State& x, double limit, State& out) {
        const FieldOf f{regime_, params_};
        double h = std::min({h_, limit, config_.max_step});
        for (;;) {
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                throw StepSizeUnderflow("adaptive step underflow at t = " + std::to_string(t));
            }
            const auto trial = rk::dormand_prince_step(f, x, h);
            const double err = error_norm(x, trial.y, trial.error, config_);
            if (err <= 1.0) {
                const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
                // A step clipped by `limit` says nothing about the natural step size.
                h_ = h < limit ? h * grow : std::max(h_, h * grow);
                h_ = std::min(h_, config_.max_step);
                out = trial.y;
                return h;
            }
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        }
    }

private:
    Regime regime_;
    const ModelParameters& params_;
    const IntegratorConfig& config_;
    double h_;
};

}  // namespace

State smooth_step(const State& x, Regime r, double dt, const ModelParameters& p,
                  const IntegratorConfig& config) {
    if (!(dt > 0.0)) throw std::invalid_argument("smooth_step: dt must be positive");
    if (config.step_mode == StepMode::FixedClassicalRK4) {
        return rk::classical_step(FieldOf{r, p}, x, dt);
    }
    IntegratorConfig c = config;
    c.base_step = dt;
    c.max_step = dt;
    AdaptiveStepper stepper(r, p, c);
    double t = 0.0;
    State y = x;
    while (dt - t > 1e-15 * dt) {
        State next;
        t += stepper.advance(t, y, dt - t, next);
        y = next;
    }
    return y;
}

CrossingLocation locate_crossing(const State& before, const State& after, double dt, Regime r,
                                 const ModelParameters& p, const IntegratorConfig& config) {
    const double s = side_sign(r);
    double h_lo = s * switching_function(before, p);
    double h_hi = s * switching_function(after, p);
    if (!(h_hi < 0.0) || h_lo < -config.event_tol) {
        throw std::invalid_argument("locate_crossing: no sign change of the switching function");
    }
    if (h_lo <= 0.0) return {0.0, before};

    double lo = 0.0;
    double hi = 1.0;
    State x_hi = after;
    int iterations = 0;
    while (-h_hi > config.event_tol) {
        if (++iterations > 100) {
            throw CrossingNotConverged("locate_crossing: bisection did not reach event_tol");
        }
        const double mid = 0.5 * (lo + hi);
        const State x_mid = raw_step(before, r, mid * dt, p, config.step_mode);
        const double h_mid = s * switching_function(x_mid, p);
        if (h_mid < 0.0) {
            hi = mid;
            h_hi = h_mid;
            x_hi = x_mid;
        } else {
            lo = mid;
            h_lo = h_mid;
        }
    }

    // Secant polish inside the final bracket; keeps the located point a
    // smooth function of the step endpoints instead of the bisection path.
    double best_frac = hi;
    State best = x_hi;
    double best_abs = -h_hi;
    for (int k = 0; k < 3 && h_lo > 0.0 && best_abs > 0.0; ++k) {
        const double frac = lo + (hi - lo) * h_lo / (h_lo - h_hi);
        if (!(frac > lo && frac < hi)) break;
        const State x_s = raw_step(before, r, frac * dt, p, config.step_mode);
        const double h_s = s * switching_function(x_s, p);
        if (std::abs(h_s) < best_abs) {
            best_abs = std::abs(h_s);
            best = x_s;
            best_frac = frac;
        }
        if (h_s < 0.0) {
            hi = frac;
            h_hi = h_s;
        } else if (h_s > 0.0) {
            lo = frac;
            h_lo = h_s;
        } else {
            break;
        }
    }
    return {best_frac, best};
}

SlidingVector filippov_sliding_field(const State& x, const ModelParameters& p,
                                     BoundaryTolerance tol) {
    const double h = switching_function(x, p);
    if (!(std::abs(h) <= tol.on_plane)) {
        throw std::invalid_argument("filippov_sliding_field: point is off the switching plane");
    }
    const State N = switching_normal(p);
    const State v_minus = vector_field(x, Regime::Advance, p);
    const State v_plus = vector_field(x, Regime::Retreat, p);
    const double n_minus = dot(v_minus, N);
    const double n_plus = dot(v_plus, N);
    const double denom = n_minus - n_plus;
    if (denom == 0.0) {
        if (n_minus == 0.0) return {v_minus, 0.0};
        throw NotSliding("filippov_sliding_field: both fields cross the plane in the same direction");
    }
    double q = n_minus / denom;
    constexpr double slack = 1e-12;
    if (q < -slack || q > 1.0 + slack) {
        throw NotSliding("filippov_sliding_field: transversal crossing point (q = " +
                         std::to_string(q) + ")");
    }
    q = std::clamp(q, 0.0, 1.0);
    return {(1.0 - q) * v_minus + q * v_plus, q};
}

namespace {

class TrajectoryBuilder {
public:
    TrajectoryBuilder(const IntegratorConfig& c, HybridTrajectory& traj) : config_(c), traj_(traj) {}

    void begin_segment(Regime r) { traj_.segments.push_back(Segment{r, {}}); }

    void first_sample(double t, const State& x) {
        if (!config_.record_samples) return;
        push(t, x);
        next_grid_ = t + config_.sample_interval;
    }

    /// Records the accepted step (t0, x0) -> (t1, x1). `closing` marks a step
    /// ending on a crossing, whose end point is always kept.
    void step(double t0, const State& x0, double t1, const State& x1, bool closing) {
        if (!config_.record_samples) return;
        if (config_.sample_interval <= 0.0) {
            push(t1, x1);
            return;
        }
        while (next_grid_ < t1 || (!closing && next_grid_ == t1)) {
            const double f = (next_grid_ - t0) / (t1 - t0);
            push(next_grid_, x0 + f * (x1 - x0));
            next_grid_ += config_.sample_interval;
        }
        if (closing) push(t1, x1);
    }

    void force_sample(double t, const State& x) {
        if (!config_.record_samples) return;
        auto& s = traj_.segments.back().samples;
        if (s.empty() || s.back().t < t) push(t, x);
    }

private:
    void push(double t, const State& x) { traj_.segments.back().samples.push_back({t, x}); }

    const IntegratorConfig& config_;
    HybridTrajectory& traj_;
    double next_grid_ = 0.0;
};

Termination terminal_for(BoundaryKind kind) {
    switch (kind) {
        case BoundaryKind::TangencyPlus:
        case BoundaryKind::TangencyMinus: return Termination::Tangency;
        default: return Termination::SlidingEntry;
    }
}

}  // namespace

HybridTrajectory evolve_hybrid(const State& start, Regime start_regime, const ModelParameters& p,
                               const IntegratorConfig& config) {
    config.validate();
    if (!in_state_space(start)) {
        throw std::invalid_argument("evolve_hybrid: start lies outside eta, xi in [0, 1]");
    }
    const BoundaryTolerance btol{config.event_tol, config.tangency_tol};

    HybridTrajectory traj;
    TrajectoryBuilder out(config, traj);
    Regime regime = start_regime;
    double t = 0.0;
    State x = start;

    auto finish = [&](Termination why, std::string diagnostic = {}) {
        traj.termination = why;
        traj.final_time = t;
        traj.final_state = x;
        traj.final_regime = regime;
        traj.diagnostic = std::move(diagnostic);
    };

    out.begin_segment(regime);
    out.first_sample(t, x);

    const double h0 = switching_function(start, p);
    if (std::abs(h0) <= config.event_tol) {
        const BoundaryKind kind = classify_boundary_point(start, p, btol);
        if (kind == BoundaryKind::SigmaPlus || kind == BoundaryKind::SigmaMinus) {
            const Regime required = kind == BoundaryKind::SigmaPlus ? Regime::Advance : Regime::Retreat;
            if (required != regime) {
                throw std::invalid_argument("evolve_hybrid: on " + std::string(to_string(kind)) +
                                            " the flow continues in the " +
                                            std::string(to_string(required)) + " regime");
            }
        } else {
            traj.events.push_back({t, x, kind, regime, regime});
            finish(terminal_for(kind), "start point is " + std::string(to_string(kind)));
            return traj;
        }
    } else if (side_sign(regime) * h0 < 0.0) {
        throw std::invalid_argument("evolve_hybrid: start regime " + std::string(to_string(regime)) +
                                    " does not match the half-space of the start point");
    }

    AdaptiveStepper stepper(regime, p, config);
    const bool adaptive = config.step_mode == StepMode::EmbeddedAdaptive;

    while (t < config.max_time) {
        const double limit = config.max_time - t;
        State y;
        double dt;
        if (adaptive) {
            dt = stepper.advance(t, x, limit, y);
        } else {
            dt = std::min(config.base_step, limit);
            y = raw_step(x, regime, dt, p, config.step_mode);
        }
        const double t_next = limit - dt <= 1e-15 * config.max_time ? config.max_time : t + dt;

        if (side_sign(regime) * switching_function(y, p) < 0.0) {
            const CrossingLocation loc = locate_crossing(x, y, dt, regime, p, config);
            const double tc = t + loc.time_fraction * dt;
            out.step(t, x, tc, loc.state, true);
            out.force_sample(tc, loc.state);
            t = tc;
            x = loc.state;

            const BoundaryKind kind = classify_boundary_point(x, p, btol);
            const bool switches = (kind == BoundaryKind::SigmaPlus && regime == Regime::Retreat) ||
                                  (kind == BoundaryKind::SigmaMinus && regime == Regime::Advance);
            if (!switches) {
                traj.events.push_back({t, x, kind, regime, regime});
                finish(terminal_for(kind), "reached " + std::string(to_string(kind)) + " from the " +
                                               std::string(to_string(regime)) + " side");
                return traj;
            }
            const Regime next = opposite(regime);
            traj.events.push_back({t, x, kind, regime, next});
            regime = next;
            stepper.restart(regime);
            if (traj.events.size() >= config.max_events) {
                finish(Termination::EventBudget);
                return traj;
            }
            out.begin_segment(regime);
            continue;
        }

        out.step(t, x, t_next, y, false);
        t = t_next;
        x = y;
        if (!in_state_space(x)) {
            out.force_sample(t, x);
            finish(Termination::LeftStateSpace, "left the state space at t = " + std::to_string(t));
            return traj;
        }
    }
    out.force_sample(t, x);
    finish(Termination::MaxTime);
    return traj;
}

}  // namespace glacial
