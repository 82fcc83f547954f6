#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "glacial/parameters.hpp"

namespace glacial {

/// A point (w, eta, xi) of the model space: translated global mean
/// temperature, snow line and ice line (both as sine of latitude).
///
/// Nothing clamps eta and xi; use `in_state_space` to check membership of
/// the physical box eta, xi in [0, 1].
struct State {
    double w = 0.0;
    double eta = 0.0;
    double xi = 0.0;

    State& operator+=(const State& o) noexcept {
        w += o.w;
        eta += o.eta;
        xi += o.xi;
        return *this;
    }
    State& operator-=(const State& o) noexcept {
        w -= o.w;
        eta -= o.eta;
        xi -= o.xi;
        return *this;
    }
    State& operator*=(double s) noexcept {
        w *= s;
        eta *= s;
        xi *= s;
        return *this;
    }

    friend State operator+(State l, const State& r) noexcept { return l += r; }
    friend State operator-(State l, const State& r) noexcept { return l -= r; }
    friend State operator*(double s, State v) noexcept { return v *= s; }
    friend State operator*(State v, double s) noexcept { return v *= s; }

    bool operator==(const State&) const = default;

    Eigen::Vector3d vec() const { return {w, eta, xi}; }
    static State from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

double dot(const State& l, const State& r) noexcept;
double norm(const State& v) noexcept;

inline bool in_state_space(const State& x) noexcept {
    return x.eta >= 0.0 && x.eta <= 1.0 && x.xi >= 0.0 && x.xi <= 1.0;
}

// ---------------------------------------------------------------------------
// Closed-form ingredients

/// Second even Legendre polynomial (3y^2 - 1) / 2.
double legendre_p2(double y) noexcept;
/// Its antiderivative from 0: (y^3 - y) / 2.
double legendre_p2_integral(double y) noexcept;

/// Latitudinal insolation weight s(y) = 1 + s2 p2(y). Throws std::domain_error
/// for y outside [0, 1].
double insolation_distribution(double y, const ModelParameters& p);

/// Equilibrium value of w for a fixed snow line (the w-nullcline); a cubic.
double F(double eta, const ModelParameters& p) noexcept;
double F_prime(double eta, const ModelParameters& p) noexcept;

/// Snow line nullcline of the given regime; a quadratic. The two regimes
/// differ only by the constant Tc_minus - Tc_plus.
double G(double eta, Regime r, const ModelParameters& p) noexcept;
double G_prime(double eta, const ModelParameters& p) noexcept;

/// Ice line coordinate of the switching plane above a given snow line:
/// (1 + a/b) eta - a/b.
double gamma(double eta, const ModelParameters& p) noexcept;

/// b (eta - xi) - a (1 - eta). Negative in the advance half-space, positive in
/// the retreat half-space, zero on the switching plane.
double switching_function(const State& x, const ModelParameters& p) noexcept;

/// Normal (0, 1 + a/b, -1) of the switching plane; the gradient of the
/// switching function is b times this vector.
State switching_normal(const ModelParameters& p) noexcept;

/// Smooth field of a regime, evaluated anywhere (each field extends smoothly
/// across the plane).
State vector_field(const State& x, Regime r, const ModelParameters& p) noexcept;

Eigen::Matrix3d jacobian(const State& x, Regime r, const ModelParameters& p) noexcept;

/// Curve w = g(eta) on the switching plane along which the regime field is
/// tangent to it. Above the curve the field points into the retreat side.
double tangency_curve(double eta, Regime r, const ModelParameters& p) noexcept;

/// Where a point of the switching plane sits relative to the two tangency
/// curves. `SlidingAttracting` only exists when epsilon is at or above
/// `epsilon_bound` and the tangency curves intersect.
enum class BoundaryKind {
    SigmaPlus,          ///< w < g_plus: both fields cross from retreat to advance
    SigmaMinus,         ///< w > g_minus: both fields cross from advance to retreat
    SlidingRepelling,   ///< g_plus < w < g_minus: both fields point away
    SlidingAttracting,  ///< g_minus < w < g_plus: both fields point inward
    TangencyPlus,       ///< on the retreat tangency curve
    TangencyMinus,      ///< on the advance tangency curve
};

std::string_view to_string(BoundaryKind k) noexcept;
BoundaryKind parse_boundary_kind(std::string_view text);

struct BoundaryTolerance {
    double on_plane = 1e-8;  ///< |switching_function| accepted as "on the plane"
    double tangency = 1e-9;  ///< |w - g(eta)| accepted as "on a tangency curve"
};

/// Classifies a point of the switching plane. Throws std::invalid_argument if
/// |switching_function(x)| exceeds `tol.on_plane`.
BoundaryKind classify_boundary_point(const State& x, const ModelParameters& p,
                                     BoundaryTolerance tol = {});

/// Supremum of epsilon for which the two tangency curves stay disjoint on
/// eta in [0, 1].
double epsilon_bound(const ModelParameters& p) noexcept;

/// Snow line at which the two tangency curves intersect for the configured
/// epsilon; negative exactly when epsilon < epsilon_bound.
double tangency_intersection_eta(const ModelParameters& p) noexcept;

// ---------------------------------------------------------------------------
// Four-variable reduction of the latitude-resolved energy balance

/// Coordinates (w0, z0, w2, z2) of an even, piecewise quadratic temperature
/// profile with a jump at the snow line.
struct ProfileCoords {
    double w0 = 0.0;
    double z0 = 0.0;
    double w2 = 0.0;
    double z2 = 0.0;
};

/// Equilibrium values (z0, w2, z2) of the globally attracting invariant line.
struct InvariantLine {
    double z0 = 0.0;
    double w2 = 0.0;
    double z2 = 0.0;
};

InvariantLine invariant_line_coords(const ModelParameters& p) noexcept;

/// Rates of the four coordinates for a frozen snow line, with the heat
/// capacity normalised so that B / R = tau.
std::array<double, 4> four_ode_rhs(const ProfileCoords& c, double eta,
                                   const ModelParameters& p) noexcept;

}  // namespace glacial
