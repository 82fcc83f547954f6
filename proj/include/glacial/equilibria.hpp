#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <vector>

#include "glacial/model.hpp"

namespace glacial {

enum class Stability { Sink, Saddle, Source, Degenerate };

/// Position of a regime equilibrium relative to the switching plane:
/// Regular if it lies in its own regime's half-space, Virtual if it lies
/// strictly in the other one, Boundary if it lies on the plane.
enum class Classification { Regular, Virtual, Boundary };

std::string_view to_string(Stability s) noexcept;
std::string_view to_string(Classification c) noexcept;
Stability parse_stability(std::string_view text);
Classification parse_classification(std::string_view text);

/// Real parts within this distance of zero are reported as Degenerate.
inline constexpr double kStabilityTolerance = 1e-9;
/// |switching_function| below this classifies an equilibrium as Boundary.
inline constexpr double kBoundaryEquilibriumTolerance = 1e-9;

/// Equilibrium of the decoupled (w, eta) subsystem of one regime.
struct PlanarEquilibrium {
    double w = 0.0;
    double eta = 0.0;
    std::array<std::complex<double>, 2> eigenvalues{};
    Stability stability = Stability::Degenerate;

    bool operator==(const PlanarEquilibrium&) const = default;
};

struct EquilibriumReport {
    State state;
    Regime regime = Regime::Retreat;
    std::array<std::complex<double>, 3> eigenvalues{};
    Stability stability = Stability::Degenerate;
    Classification classification = Classification::Regular;

    bool operator==(const EquilibriumReport&) const = default;
};

/// F(eta) - G(eta; regime); its zeros in [0, 1] are the snow lines of the
/// regime's equilibria.
double equilibrium_gap(double eta, Regime r, const ModelParameters& p) noexcept;

/// All zeros of `equilibrium_gap` on [0, 1], ordered by eta. Sign changes are
/// located on a uniform grid of `grid_step` and refined by bisection to
/// `eta_tol`. Returns an empty list when the regime has no equilibrium with
/// eta in [0, 1].
std::vector<PlanarEquilibrium> find_planar_equilibria(Regime r, const ModelParameters& p,
                                                      double grid_step = 1e-3,
                                                      double eta_tol = 1e-12);

/// Eigenvalues of the 2x2 (w, eta) block of the Jacobian at `eta`.
std::array<std::complex<double>, 2> planar_eigenvalues(double eta, Regime r,
                                                       const ModelParameters& p);

/// Lifts a planar equilibrium to the full system (xi fixed by the ice line
/// equation) and classifies it against the switching plane.
EquilibriumReport lift_equilibrium(const PlanarEquilibrium& planar, Regime r,
                                   const ModelParameters& p);

/// Every equilibrium of both regimes: retreat first, each ordered by eta.
std::vector<EquilibriumReport> all_equilibria(const ModelParameters& p);

/// The stable equilibrium of a regime, if any (the one with largest eta when
/// several exist).
const EquilibriumReport* find_sink(const std::vector<EquilibriumReport>& reports, Regime r);

}  // namespace glacial
