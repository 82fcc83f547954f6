#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace glacial {

/// Physical and empirical constants of the temperature / snow line / ice line
/// model. Default member values are the reference parameter set; `epsilon`
/// has no reference value and defaults to 0.03.
///
/// Rates tau, rho and epsilon are per unit model time. The surface heat
/// capacity is not stored: tau = B / R is given directly.
struct ModelParameters {
    double Q = 343.0;        ///< mean annual insolation (W/m^2)
    double A = 202.0;        ///< outgoing longwave radiation offset (W/m^2)
    double B = 1.9;          ///< outgoing longwave radiation slope (W/m^2/degC)
    double C = 3.04;         ///< meridional transport coefficient (W/m^2/degC)
    double alpha1 = 0.32;    ///< albedo of ice-free surface
    double alpha2 = 0.62;    ///< albedo of snow-covered surface
    double Tc_plus = -10.0;  ///< critical temperature while the ice sheet retreats (degC)
    double Tc_minus = -5.5;  ///< critical temperature while the ice sheet advances (degC)
    double a = 1.05;         ///< accumulation rate
    double b0 = 1.5;         ///< ablation rate while advancing
    double b = 1.75;         ///< ablation rate defining the switching plane
    double b1 = 5.0;         ///< ablation rate while retreating
    double tau = 1.0;        ///< relaxation rate of w
    double rho = 0.1;        ///< relaxation rate of the snow line
    double epsilon = 0.03;   ///< time constant of the ice line
    double s2 = -0.482;      ///< second Legendre coefficient of the insolation distribution

    /// L = Q / (B + C).
    double L() const noexcept { return Q / (B + C); }
    /// Mean of the two albedos.
    double alpha0() const noexcept { return 0.5 * (alpha1 + alpha2); }
    /// Slope factor a / b of the switching plane.
    double a_over_b() const noexcept { return a / b; }

    /// Throws std::invalid_argument naming the first violated hard invariant:
    /// positivity of B, C, Q, tau, rho, epsilon, a, b0, b, b1; alpha1 < alpha2;
    /// Tc_minus > Tc_plus.
    void validate() const;

    /// Soft invariants. The analysis assumes 0 < b0 < b < b1, but boundary
    /// equilibrium sweeps deliberately push b0 through b, so a violated
    /// ordering is reported rather than rejected.
    std::vector<std::string> warnings() const;

    bool operator==(const ModelParameters&) const = default;
};

/// Names accepted by `set_parameter`, in declaration order.
const std::vector<std::string_view>& parameter_names();

/// Assigns the field called `name`. Returns false for an unknown name.
bool set_parameter(ModelParameters& params, std::string_view name, double value);

/// Reads the field called `name`; throws std::out_of_range for an unknown name.
double get_parameter(const ModelParameters& params, std::string_view name);

/// The two smooth regimes of the switching system.
///
/// Advance: accumulation exceeds ablation (switching function negative); uses
/// the warmer critical temperature Tc_minus and ablation rate b0.
/// Retreat: ablation exceeds accumulation (switching function positive); uses
/// Tc_plus and b1.
enum class Regime { Advance, Retreat };

inline Regime opposite(Regime r) noexcept {
    return r == Regime::Advance ? Regime::Retreat : Regime::Advance;
}

/// +1 for the half-space in which the regime is active (sign of the switching
/// function), -1 otherwise.
inline double side_sign(Regime r) noexcept { return r == Regime::Retreat ? 1.0 : -1.0; }

inline double critical_temperature(Regime r, const ModelParameters& p) noexcept {
    return r == Regime::Advance ? p.Tc_minus : p.Tc_plus;
}

inline double ablation_rate(Regime r, const ModelParameters& p) noexcept {
    return r == Regime::Advance ? p.b0 : p.b1;
}

std::string_view to_string(Regime r) noexcept;
/// Parses "advance" / "retreat"; throws std::invalid_argument otherwise.
Regime parse_regime(std::string_view text);

}  // namespace glacial
