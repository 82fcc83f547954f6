#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace glacial::rk {

// Fixed-size vectors used by the planar and four-variable integrations.
template <std::size_t N>
std::array<double, N> operator+(std::array<double, N> l, const std::array<double, N>& r) {
    for (std::size_t i = 0; i < N; ++i) l[i] += r[i];
    return l;
}

template <std::size_t N>
std::array<double, N> operator*(double s, std::array<double, N> v) {
    for (auto& x : v) x *= s;
    return v;
}

/// One classical four-stage Runge-Kutta step of y' = f(y).
/// Y needs `Y + Y` and `double * Y`.
template <typename Y, typename Field>
Y classical_step(const Field& f, const Y& y, double dt) {
    const Y k1 = f(y);
    const Y k2 = f(y + (0.5 * dt) * k1);
    const Y k3 = f(y + (0.5 * dt) * k2);
    const Y k4 = f(y + dt * k3);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename Y>
struct EmbeddedStep {
    Y y;      ///< fifth-order solution
    Y error;  ///< difference to the embedded fourth-order solution
};

/// One Dormand-Prince 5(4) step of y' = f(y) with its embedded error estimate.
template <typename Y, typename Field>
EmbeddedStep<Y> dormand_prince_step(const Field& f, const Y& y, double h) {
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                     a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                     b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
    // b - b_hat of the embedded fourth-order formula.
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                     e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    const Y k1 = f(y);
    const Y k2 = f(y + (h * a21) * k1);
    const Y k3 = f(y + h * (a31 * k1 + a32 * k2));
    const Y k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Y k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Y k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Y y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Y k7 = f(y5);
    const Y err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    return {y5, err};
}

}  // namespace glacial::rk
