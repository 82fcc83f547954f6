#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glacial/equilibria.hpp"
#include "glacial/integrator.hpp"

namespace glacial {

/// Point (w, eta) of the switching plane; the ice line is implied, xi = gamma(eta).
struct SectionPoint {
    double w = 0.0;
    double eta = 0.0;

    State on_plane(const ModelParameters& p) const { return {w, eta, gamma(eta, p)}; }

    bool operator==(const SectionPoint&) const = default;
};

/// Distance of the embedded points (w, eta, gamma(eta)).
double section_distance(const SectionPoint& x, const SectionPoint& y, const ModelParameters& p);
/// Euclidean distance in (w, eta) only.
double planar_distance(const SectionPoint& x, const SectionPoint& y);

/// Region of the switching plane above the stable manifold of the advance
/// saddle. The manifold lives in the (w, eta) plane because the snow line
/// subsystem does not see xi, so membership is a planar test against a
/// tabulated curve w = m(eta).
class GuardSet {
public:
    /// Builds the separatrix by backward integration from offsets of
    /// `offset` along the saddle's stable eigenvector, stopping each branch
    /// when w leaves [w_floor, w_ceiling] or eta leaves [0, 1]. Throws
    /// std::invalid_argument when the advance regime has no saddle.
    explicit GuardSet(const ModelParameters& p, double offset = 1e-6, double w_floor = -60.0,
                      double w_ceiling = 30.0);

    /// Strictly above the separatrix. Points on the curve are excluded.
    bool contains(const SectionPoint& x) const { return x.w > separatrix(x.eta); }

    /// Interpolated separatrix; constant extrapolation past the table ends.
    double separatrix(double eta) const;

    const PlanarEquilibrium& saddle() const noexcept { return saddle_; }
    /// (eta, w) pairs with strictly increasing eta.
    const std::vector<std::pair<double, double>>& table() const noexcept { return table_; }

private:
    PlanarEquilibrium saddle_;
    std::vector<std::pair<double, double>> table_;
};

struct SectionImage {
    SectionPoint point;
    double transit_time = 0.0;
};

struct CompositeImage {
    SectionPoint point;    ///< r_plus(r_minus(x)), in SigmaPlus
    SectionPoint partner;  ///< r_minus(x), in SigmaMinus
    double transit_minus = 0.0;
    double transit_plus = 0.0;
    double period() const noexcept { return transit_minus + transit_plus; }
};

struct OrbitOptions {
    double tolerance = 1e-10;  ///< on successive section points, in the embedded norm
    int max_iterations = 500;
    /// Refuse to search when epsilon >= epsilon_bound (tangency curves meet).
    bool enforce_epsilon_bound = true;
};

struct OrbitResult {
    SectionPoint fixed_point;    ///< in SigmaPlus and the guard set
    SectionPoint partner_point;  ///< in SigmaMinus and the guard set
    double period = 0.0;
    double transit_minus = 0.0;
    double transit_plus = 0.0;
    double closure_error = 0.0;
    double contraction_estimate = 0.0;
    int iterations = 0;
    std::vector<double> step_sizes;  ///< embedded distance between successive iterates

    bool operator==(const OrbitResult&) const = default;
};

enum class WhichMap { Minus, Plus };

struct Rectangle {
    double w_min = 0.0;
    double w_max = 0.0;
    double eta_min = 0.0;
    double eta_max = 0.0;
};

struct ContractionEstimate {
    double factor = 0.0;          ///< max ratio in the embedded (three-component) norm
    double planar_factor = 0.0;   ///< the same pairs measured in (w, eta)
    int pairs_used = 0;
    int pairs_excluded = 0;
    std::vector<std::string> exclusions;  ///< reason for each excluded pair
};

/// Boundary-to-boundary return maps of the switching system and the
/// machinery built on them. Holds the parameters, the integrator settings
/// and the guard set, which is computed once.
class SectionMaps {
public:
    SectionMaps(ModelParameters p, IntegratorConfig config);

    const ModelParameters& params() const noexcept { return params_; }
    const IntegratorConfig& config() const noexcept { return config_; }
    const GuardSet& guard() const noexcept { return guard_; }

    BoundaryKind classify(const SectionPoint& x) const;
    bool in_guard_set(const SectionPoint& x) const { return guard_.contains(x); }

    /// Flows the advance field from x in SigmaPlus to the first return to
    /// SigmaMinus. Throws MapUndefined when x is not in SigmaPlus and the
    /// guard set, or the flow ends any other way.
    SectionImage minus(const SectionPoint& x) const;
    /// Flows the retreat field from y in SigmaMinus to the first return to
    /// SigmaPlus; mirror of `minus`.
    SectionImage plus(const SectionPoint& y) const;
    CompositeImage composite(const SectionPoint& x) const;

    /// Projections of the retreat and advance sinks onto the plane, the
    /// default seeds for the two maps. Throw MapUndefined if a sink is missing.
    SectionPoint retreat_sink_projection() const;
    SectionPoint advance_sink_projection() const;

    /// Picard iteration of the composite map from `seed`. Throws
    /// NoOrbitFound after options.max_iterations, MapUndefined when an iterate
    /// leaves the domain, std::invalid_argument when epsilon is inadmissible.
    OrbitResult find_periodic_orbit(const SectionPoint& seed, OrbitOptions options = {}) const;

    /// Largest observed expansion ratio of `map` over `n_pairs` random pairs
    /// in `region`. Pairs with an undefined image are excluded and listed.
    ContractionEstimate estimate_contraction(const Rectangle& region, WhichMap map, int n_pairs,
                                             std::uint64_t seed = 20150720) const;

private:
    SectionImage apply(const SectionPoint& x, Regime flow, BoundaryKind from, BoundaryKind to) const;

    ModelParameters params_;
    IntegratorConfig config_;
    GuardSet guard_;
    std::vector<EquilibriumReport> equilibria_;
};

// Free-function forms; each builds a SectionMaps (and hence the guard set).
SectionImage section_map_minus(const SectionPoint& x, const ModelParameters& p,
                               const IntegratorConfig& config);
SectionImage section_map_plus(const SectionPoint& y, const ModelParameters& p,
                              const IntegratorConfig& config);
CompositeImage composite_map(const SectionPoint& x, const ModelParameters& p,
                             const IntegratorConfig& config);
OrbitResult find_periodic_orbit(const SectionPoint& seed, const ModelParameters& p,
                                const IntegratorConfig& config, OrbitOptions options = {});
bool guard_set_membership(const SectionPoint& x, const ModelParameters& p);

}  // namespace glacial
