#include "glacial/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace glacial {

double dot(const State& l, const State& r) noexcept {
    return l.w * r.w + l.eta * r.eta + l.xi * r.xi;
}

double norm(const State& v) noexcept { return std::sqrt(dot(v, v)); }

double legendre_p2(double y) noexcept { return 0.5 * (3.0 * y * y - 1.0); }

double legendre_p2_integral(double y) noexcept { return 0.5 * (y * y * y - y); }

double insolation_distribution(double y, const ModelParameters& p) {
    if (!(y >= 0.0 && y <= 1.0)) {
        throw std::domain_error("insolation_distribution: y = " + std::to_string(y) +
                                " outside [0, 1]");
    }
    return 1.0 + p.s2 * legendre_p2(y);
}

double F(double eta, const ModelParameters& p) noexcept {
    const double albedo_jump = p.alpha2 - p.alpha1;
    return (p.Q * (1.0 - p.alpha0()) - p.A +
            p.C * p.L() * albedo_jump * (eta - 0.5 + p.s2 * legendre_p2_integral(eta))) /
           p.B;
}

double F_prime(double eta, const ModelParameters& p) noexcept {
    return p.C * p.L() * (p.alpha2 - p.alpha1) * (1.0 + p.s2 * legendre_p2(eta)) / p.B;
}

double G(double eta, Regime r, const ModelParameters& p) noexcept {
    return -p.L() * p.s2 * (1.0 - p.alpha0()) * legendre_p2(eta) + critical_temperature(r, p);
}

double G_prime(double eta, const ModelParameters& p) noexcept {
    return -p.L() * p.s2 * (1.0 - p.alpha0()) * 3.0 * eta;
}

double gamma(double eta, const ModelParameters& p) noexcept {
    const double k = p.a_over_b();
    return (1.0 + k) * eta - k;
}

double switching_function(const State& x, const ModelParameters& p) noexcept {
    return p.b * (x.eta - x.xi) - p.a * (1.0 - x.eta);
}

State switching_normal(const ModelParameters& p) noexcept {
    return {0.0, 1.0 + p.a_over_b(), -1.0};
}

State vector_field(const State& x, Regime r, const ModelParameters& p) noexcept {
    return {
        -p.tau * (x.w - F(x.eta, p)),
        p.rho * (x.w - G(x.eta, r, p)),
        p.epsilon * (ablation_rate(r, p) * (x.eta - x.xi) - p.a * (1.0 - x.eta)),
    };
}

Eigen::Matrix3d jacobian(const State& x, Regime r, const ModelParameters& p) noexcept {
    const double br = ablation_rate(r, p);
    Eigen::Matrix3d J;
    J << -p.tau, p.tau * F_prime(x.eta, p), 0.0,
         p.rho, -p.rho * G_prime(x.eta, p), 0.0,
         0.0, p.epsilon * (br + p.a), -p.epsilon * br;
    return J;
}

double tangency_curve(double eta, Regime r, const ModelParameters& p) noexcept {
    return G(eta, r, p) +
           p.epsilon * p.a * (1.0 - eta) * (ablation_rate(r, p) - p.b) / (p.rho * (p.a + p.b));
}

std::string_view to_string(BoundaryKind k) noexcept {
    switch (k) {
        case BoundaryKind::SigmaPlus: return "sigma_plus";
        case BoundaryKind::SigmaMinus: return "sigma_minus";
        case BoundaryKind::SlidingRepelling: return "sliding_repelling";
        case BoundaryKind::SlidingAttracting: return "sliding_attracting";
        case BoundaryKind::TangencyPlus: return "tangency_plus";
        case BoundaryKind::TangencyMinus: return "tangency_minus";
    }
    return "unknown";
}

BoundaryKind parse_boundary_kind(std::string_view text) {
    for (auto k : {BoundaryKind::SigmaPlus, BoundaryKind::SigmaMinus,
                   BoundaryKind::SlidingRepelling, BoundaryKind::SlidingAttracting,
                   BoundaryKind::TangencyPlus, BoundaryKind::TangencyMinus}) {
        if (to_string(k) == text) return k;
    }
    throw std::invalid_argument("unknown boundary kind '" + std::string(text) + "'");
}

BoundaryKind classify_boundary_point(const State& x, const ModelParameters& p,
                                     BoundaryTolerance tol) {
    const double h = switching_function(x, p);
    if (!(std::abs(h) <= tol.on_plane)) {
        throw std::invalid_argument("classify_boundary_point: point is off the switching plane (h = " +
                                    std::to_string(h) + ")");
    }
    const double g_plus = tangency_curve(x.eta, Regime::Retreat, p);
    const double g_minus = tangency_curve(x.eta, Regime::Advance, p);
    if (std::abs(x.w - g_plus) <= tol.tangency) return BoundaryKind::TangencyPlus;
    if (std::abs(x.w - g_minus) <= tol.tangency) return BoundaryKind::TangencyMinus;

    const bool below_plus = x.w < g_plus;
    const bool above_minus = x.w > g_minus;
    if (below_plus && above_minus) return BoundaryKind::SlidingAttracting;
    if (below_plus) return BoundaryKind::SigmaPlus;
    if (above_minus) return BoundaryKind::SigmaMinus;
    return BoundaryKind::SlidingRepelling;
}

double epsilon_bound(const ModelParameters& p) noexcept {
    return (p.Tc_minus - p.Tc_plus) * p.rho * (p.a + p.b) / (p.a * (p.b1 - p.b0));
}

double tangency_intersection_eta(const ModelParameters& p) noexcept {
    return 1.0 - epsilon_bound(p) / p.epsilon;
}

InvariantLine invariant_line_coords(const ModelParameters& p) noexcept {
    const double L = p.L();
    return {L * (p.alpha2 - p.alpha1), L * p.s2 * (1.0 - p.alpha0()), L * p.s2 * (p.alpha2 - p.alpha1)};
}

std::array<double, 4> four_ode_rhs(const ProfileCoords& c, double eta,
                                   const ModelParameters& p) noexcept {
    const double inv_R = p.tau / p.B;
    const double BC = p.B + p.C;
    const double jump = p.alpha2 - p.alpha1;
    return {
        inv_R * (p.Q * (1.0 - p.alpha0()) - p.A - p.B * c.w0 +
                 p.C * ((eta - 0.5) * c.z0 + c.z2 * legendre_p2_integral(eta))),
        inv_R * (p.Q * jump - BC * c.z0),
        inv_R * (p.Q * p.s2 * (1.0 - p.alpha0()) - BC * c.w2),
        inv_R * (p.Q * p.s2 * jump - BC * c.z2),
    };
}

}  // namespace glacial
