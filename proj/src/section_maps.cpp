#include "glacial/section_maps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "glacial/errors.hpp"
#include "glacial/runge_kutta.hpp"

namespace glacial {

double section_distance(const SectionPoint& x, const SectionPoint& y, const ModelParameters& p) {
    const double dw = x.w - y.w;
    const double deta = x.eta - y.eta;
    const double dxi = gamma(x.eta, p) - gamma(y.eta, p);
    return std::sqrt(dw * dw + deta * deta + dxi * dxi);
}

double planar_distance(const SectionPoint& x, const SectionPoint& y) {
    return std::hypot(x.w - y.w, x.eta - y.eta);
}

// ---------------------------------------------------------------------------
// GuardSet

namespace {

using Planar = std::array<double, 2>;

std::vector<std::pair<double, double>> trace_branch(const Planar& start, const ModelParameters& p,
                                                    double w_floor, double w_ceiling) {
    // Backward time: integrate the negated advance (w, eta) field.
    auto backward = [&p](const Planar& y) -> Planar {
        const State v = vector_field({y[0], y[1], 0.0}, Regime::Advance, p);
        return {-v.w, -v.eta};
    };
    constexpr double dt = 1e-3;
    constexpr int max_steps = 1'000'000;
    std::vector<std::pair<double, double>> out;
    Planar y = start;
    for (int i = 0; i < max_steps; ++i) {
        using rk::operator+;
        using rk::operator*;
        const Planar next = rk::classical_step(backward, y, dt);
        if (next[0] < w_floor || next[0] > w_ceiling || next[1] < 0.0 || next[1] > 1.0) break;
        out.emplace_back(next[1], next[0]);
        y = next;
    }
    return out;
}

/// Longest prefix along which eta moves strictly in one direction.
void keep_monotone_prefix(std::vector<std::pair<double, double>>& branch, double eta0) {
    if (branch.empty()) return;
    const bool increasing = branch.front().first > eta0;
    double last = eta0;
    std::size_t keep = 0;
    for (; keep < branch.size(); ++keep) {
        const double eta = branch[keep].first;
        if (increasing ? !(eta > last) : !(eta < last)) break;
        last = eta;
    }
    branch.resize(keep);
}

}  // namespace

GuardSet::GuardSet(const ModelParameters& p, double offset, double w_floor, double w_ceiling) {
    const auto roots = find_planar_equilibria(Regime::Advance, p);
    const auto it = std::find_if(roots.begin(), roots.end(),
                                 [](const auto& e) { return e.stability == Stability::Saddle; });
    if (it == roots.end()) {
        throw std::invalid_argument("GuardSet: the advance regime has no saddle equilibrium");
    }
    saddle_ = *it;

    // Stable eigenvector of the planar block [[-tau, tau F'], [rho, -rho G']].
    const double lambda_s = std::min(saddle_.eigenvalues[0].real(), saddle_.eigenvalues[1].real());
    double vw = p.tau * F_prime(saddle_.eta, p);
    double veta = lambda_s + p.tau;
    const double len = std::hypot(vw, veta);
    vw /= len;
    veta /= len;

    auto up = trace_branch({saddle_.w + offset * vw, saddle_.eta + offset * veta}, p, w_floor, w_ceiling);
    auto down = trace_branch({saddle_.w - offset * vw, saddle_.eta - offset * veta}, p, w_floor, w_ceiling);
    keep_monotone_prefix(up, saddle_.eta);
    keep_monotone_prefix(down, saddle_.eta);

    table_.reserve(up.size() + down.size() + 1);
    table_.insert(table_.end(), up.begin(), up.end());
    table_.insert(table_.end(), down.begin(), down.end());
    table_.emplace_back(saddle_.eta, saddle_.w);
    std::sort(table_.begin(), table_.end());
    table_.erase(std::unique(table_.begin(), table_.end(),
                             [](const auto& l, const auto& r) { return l.first == r.first; }),
                 table_.end());
}

double GuardSet::separatrix(double eta) const {
    if (eta <= table_.front().first) return table_.front().second;
    if (eta >= table_.back().first) return table_.back().second;
    const auto hi = std::lower_bound(table_.begin(), table_.end(), eta,
                                     [](const auto& entry, double e) { return entry.first < e; });
    const auto lo = hi - 1;
    const double f = (eta - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

// ---------------------------------------------------------------------------
// SectionMaps

SectionMaps::SectionMaps(ModelParameters p, IntegratorConfig config)
    : params_(p), config_(config), guard_(params_), equilibria_(all_equilibria(params_)) {
    params_.validate();
    config_.validate();
    config_.record_samples = false;
    config_.max_events = 1;
}

BoundaryKind SectionMaps::classify(const SectionPoint& x) const {
    return classify_boundary_point(x.on_plane(params_), params_,
                                   {config_.event_tol, config_.tangency_tol});
}

SectionImage SectionMaps::apply(const SectionPoint& x, Regime flow, BoundaryKind from,
                                BoundaryKind to) const {
    const BoundaryKind start_kind = classify(x);
    if (start_kind != from) {
        throw MapUndefined("start point is " + std::string(to_string(start_kind)) + ", expected " +
                           std::string(to_string(from)));
    }
    if (!guard_.contains(x)) throw MapUndefined("start point lies outside the guard set");
    if (!in_state_space(x.on_plane(params_))) throw MapUndefined("start point lies outside the state space");

    const HybridTrajectory traj = evolve_hybrid(x.on_plane(params_), flow, params_, config_);
    if (traj.termination != Termination::EventBudget || traj.events.size() != 1) {
        std::string why = "flow ended with " + std::string(to_string(traj.termination));
        if (!traj.diagnostic.empty()) why += " (" + traj.diagnostic + ")";
        throw MapUndefined(why + " before returning to " + std::string(to_string(to)));
    }
    const CrossingEvent& e = traj.events.front();
    if (e.kind != to) {
        throw MapUndefined("returned to " + std::string(to_string(e.kind)) + " instead of " +
                           std::string(to_string(to)));
    }
    const SectionPoint image{e.state.w, e.state.eta};
    if (!guard_.contains(image)) throw MapUndefined("image lies outside the guard set");
    return {image, e.time};
}

SectionImage SectionMaps::minus(const SectionPoint& x) const {
    return apply(x, Regime::Advance, BoundaryKind::SigmaPlus, BoundaryKind::SigmaMinus);
}

SectionImage SectionMaps::plus(const SectionPoint& y) const {
    return apply(y, Regime::Retreat, BoundaryKind::SigmaMinus, BoundaryKind::SigmaPlus);
}

CompositeImage SectionMaps::composite(const SectionPoint& x) const {
    const SectionImage first = minus(x);
    const SectionImage second = plus(first.point);
    return {second.point, first.point, first.transit_time, second.transit_time};
}

SectionPoint SectionMaps::retreat_sink_projection() const {
    const auto* sink = find_sink(equilibria_, Regime::Retreat);
    if (sink == nullptr) throw MapUndefined("the retreat regime has no sink");
    return {sink->state.w, sink->state.eta};
}

SectionPoint SectionMaps::advance_sink_projection() const {
    const auto* sink = find_sink(equilibria_, Regime::Advance);
    if (sink == nullptr) throw MapUndefined("the advance regime has no sink");
    return {sink->state.w, sink->state.eta};
}

OrbitResult SectionMaps::find_periodic_orbit(const SectionPoint& seed, OrbitOptions options) const {
    if (options.enforce_epsilon_bound && !(params_.epsilon < epsilon_bound(params_))) {
        throw std::invalid_argument("epsilon = " + std::to_string(params_.epsilon) +
                                    " is not below the tangency bound " +
                                    std::to_string(epsilon_bound(params_)));
    }
    if (!(options.tolerance > 0.0) || options.max_iterations < 1) {
        throw std::invalid_argument("find_periodic_orbit: tolerance and max_iterations must be positive");
    }
    OrbitResult result;
    SectionPoint x = seed;
    for (int it = 1; it <= options.max_iterations; ++it) {
        const CompositeImage img = composite(x);
        const double step = section_distance(img.point, x, params_);
        result.step_sizes.push_back(step);
        if (step < options.tolerance) {
            result.fixed_point = img.point;
            result.partner_point = img.partner;
            result.transit_minus = img.transit_minus;
            result.transit_plus = img.transit_plus;
            result.period = img.period();
            result.closure_error = step;
            result.iterations = it;
            break;
        }
        x = img.point;
    }
    if (result.iterations == 0) {
        std::string trace;
        const auto& s = result.step_sizes;
        for (std::size_t i = s.size() > 5 ? s.size() - 5 : 0; i < s.size(); ++i) {
            trace += " " + std::to_string(s[i]);
        }
        throw NoOrbitFound("no fixed point after " + std::to_string(options.max_iterations) +
                           " iterations; last steps:" + trace);
    }

    // Ratio of successive steps while they are well above round-off.
    const auto& s = result.step_sizes;
    double ratio = 0.0;
    bool measured = false;
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i - 1] > 100.0 * options.tolerance) {
            ratio = std::max(ratio, s[i] / s[i - 1]);
            measured = true;
        }
    }
    if (!measured && s.size() >= 2 && s[0] > 0.0) ratio = s[1] / s[0];
    result.contraction_estimate = ratio;
    return result;
}

ContractionEstimate SectionMaps::estimate_contraction(const Rectangle& region, WhichMap map,
                                                      int n_pairs, std::uint64_t seed) const {
    const double dw = region.w_max - region.w_min;
    const double deta = region.eta_max - region.eta_min;
    if (dw < 0.0 || deta < 0.0 || std::hypot(dw, deta) == 0.0) {
        throw std::invalid_argument("estimate_contraction: region has zero diameter");
    }
    if (n_pairs < 1) throw std::invalid_argument("estimate_contraction: n_pairs must be positive");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uw(region.w_min, region.w_max);
    std::uniform_real_distribution<double> ueta(region.eta_min, region.eta_max);
    auto image = [&](const SectionPoint& x) { return map == WhichMap::Minus ? minus(x) : plus(x); };

    ContractionEstimate est;
    for (int i = 0; i < n_pairs; ++i) {
        const SectionPoint x1{uw(rng), ueta(rng)};
        const SectionPoint x2{uw(rng), ueta(rng)};
        const double before = section_distance(x1, x2, params_);
        if (before == 0.0) continue;
        try {
            const SectionPoint y1 = image(x1).point;
            const SectionPoint y2 = image(x2).point;
            est.factor = std::max(est.factor, section_distance(y1, y2, params_) / before);
            est.planar_factor = std::max(est.planar_factor, planar_distance(y1, y2) / planar_distance(x1, x2));
            ++est.pairs_used;
        } catch (const MapUndefined& e) {
            ++est.pairs_excluded;
            est.exclusions.emplace_back(e.what());
        }
    }
    if (est.pairs_used == 0) throw MapUndefined("estimate_contraction: no pair has a defined image");
    return est;
}

SectionImage section_map_minus(const SectionPoint& x, const ModelParameters& p,
                               const IntegratorConfig& config) {
    return SectionMaps(p, config).minus(x);
}

SectionImage section_map_plus(const SectionPoint& y, const ModelParameters& p,
                              const IntegratorConfig& config) {
    return SectionMaps(p, config).plus(y);
}

CompositeImage composite_map(const SectionPoint& x, const ModelParameters& p,
                             const IntegratorConfig& config) {
    return SectionMaps(p, config).composite(x);
}

OrbitResult find_periodic_orbit(const SectionPoint& seed, const ModelParameters& p,
                                const IntegratorConfig& config, OrbitOptions options) {
    return SectionMaps(p, config).find_periodic_orbit(seed, options);
}

bool guard_set_membership(const SectionPoint& x, const ModelParameters& p) {
    return GuardSet(p).contains(x);
}

}  // namespace glacial
