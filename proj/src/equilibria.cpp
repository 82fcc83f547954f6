#include "glacial/equilibria.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace glacial {

std::string_view to_string(Stability s) noexcept {
    switch (s) {
        case Stability::Sink: return "sink";
        case Stability::Saddle: return "saddle";
        case Stability::Source: return "source";
        case Stability::Degenerate: return "degenerate";
    }
    return "unknown";
}

std::string_view to_string(Classification c) noexcept {
    switch (c) {
        case Classification::Regular: return "regular";
        case Classification::Virtual: return "virtual";
        case Classification::Boundary: return "boundary";
    }
    return "unknown";
}

Stability parse_stability(std::string_view text) {
    for (auto s : {Stability::Sink, Stability::Saddle, Stability::Source, Stability::Degenerate}) {
        if (to_string(s) == text) return s;
    }
    throw std::invalid_argument("unknown stability '" + std::string(text) + "'");
}

Classification parse_classification(std::string_view text) {
    for (auto c : {Classification::Regular, Classification::Virtual, Classification::Boundary}) {
        if (to_string(c) == text) return c;
    }
    throw std::invalid_argument("unknown classification '" + std::string(text) + "'");
}

double equilibrium_gap(double eta, Regime r, const ModelParameters& p) noexcept {
    return F(eta, p) - G(eta, r, p);
}

std::array<std::complex<double>, 2> planar_eigenvalues(double eta, Regime r,
                                                       const ModelParameters& p) {
    (void)r;  // G' does not depend on the critical temperature
    const double m11 = -p.tau;
    const double m12 = p.tau * F_prime(eta, p);
    const double m21 = p.rho;
    const double m22 = -p.rho * G_prime(eta, p);
    const double tr = m11 + m22;
    const double det = m11 * m22 - m12 * m21;
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        // Avoid cancellation in the smaller root.
        const double root = std::sqrt(disc);
        const double big = 0.5 * tr + (tr >= 0.0 ? root : -root);
        const double small = big != 0.0 ? det / big : 0.0;
        return {std::complex<double>(big, 0.0), std::complex<double>(small, 0.0)};
    }
    const double im = std::sqrt(-disc);
    return {std::complex<double>(0.5 * tr, im), std::complex<double>(0.5 * tr, -im)};
}

namespace {

template <std::size_t N>
Stability stability_of(const std::array<std::complex<double>, N>& ev) {
    bool any_pos = false;
    bool any_neg = false;
    for (const auto& z : ev) {
        if (std::abs(z.real()) <= kStabilityTolerance) return Stability::Degenerate;
        (z.real() > 0.0 ? any_pos : any_neg) = true;
    }
    if (any_pos && any_neg) return Stability::Saddle;
    return any_neg ? Stability::Sink : Stability::Source;
}

PlanarEquilibrium make_planar(double eta, Regime r, const ModelParameters& p) {
    PlanarEquilibrium eq;
    eq.eta = eta;
    eq.w = F(eta, p);
    eq.eigenvalues = planar_eigenvalues(eta, r, p);
    eq.stability = stability_of(eq.eigenvalues);
    return eq;
}

double bisect(double lo, double hi, double f_lo, Regime r, const ModelParameters& p, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = equilibrium_gap(mid, r, p);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

std::vector<PlanarEquilibrium> find_planar_equilibria(Regime r, const ModelParameters& p,
                                                      double grid_step, double eta_tol) {
    if (!(grid_step > 0.0 && grid_step <= 1.0)) {
        throw std::invalid_argument("find_planar_equilibria: grid_step must lie in (0, 1]");
    }
    std::vector<PlanarEquilibrium> roots;
    const auto n = static_cast<long>(std::ceil(1.0 / grid_step));
    double prev_eta = 0.0;
    double prev_f = equilibrium_gap(0.0, r, p);
    if (prev_f == 0.0) roots.push_back(make_planar(0.0, r, p));
    for (long i = 1; i <= n; ++i) {
        const double eta = i == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n);
        const double f = equilibrium_gap(eta, r, p);
        if (f == 0.0) {
            roots.push_back(make_planar(eta, r, p));
        } else if (prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0)) {
            roots.push_back(make_planar(bisect(prev_eta, eta, prev_f, r, p, eta_tol), r, p));
        }
        prev_eta = eta;
        prev_f = f;
    }
    return roots;
}

EquilibriumReport lift_equilibrium(const PlanarEquilibrium& planar, Regime r,
                                   const ModelParameters& p) {
    const double br = ablation_rate(r, p);
    EquilibriumReport rep;
    rep.regime = r;
    rep.state = {planar.w, planar.eta, (1.0 + p.a / br) * planar.eta - p.a / br};
    rep.eigenvalues = {planar.eigenvalues[0], planar.eigenvalues[1],
                       std::complex<double>(-p.epsilon * br, 0.0)};
    rep.stability = stability_of(rep.eigenvalues);

    const double h = switching_function(rep.state, p);
    if (std::abs(h) < kBoundaryEquilibriumTolerance) {
        rep.classification = Classification::Boundary;
    } else {
        const bool in_own_half = side_sign(r) * h > 0.0;
        rep.classification = in_own_half ? Classification::Regular : Classification::Virtual;
    }
    return rep;
}

std::vector<EquilibriumReport> all_equilibria(const ModelParameters& p) {
    std::vector<EquilibriumReport> out;
    for (Regime r : {Regime::Retreat, Regime::Advance}) {
        for (const auto& planar : find_planar_equilibria(r, p)) {
            out.push_back(lift_equilibrium(planar, r, p));
        }
    }
    return out;
}

const EquilibriumReport* find_sink(const std::vector<EquilibriumReport>& reports, Regime r) {
    const EquilibriumReport* best = nullptr;
    for (const auto& rep : reports) {
        if (rep.regime == r && rep.stability == Stability::Sink &&
            (best == nullptr || rep.state.eta > best->state.eta)) {
            best = &rep;
        }
    }
    return best;
}

}  // namespace glacial
