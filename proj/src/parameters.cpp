#include "glacial/parameters.hpp"

#include <array>
#include <stdexcept>
#include <utility>

namespace glacial {

namespace {

using Field = double ModelParameters::*;

const std::array<std::pair<std::string_view, Field>, 16>& field_table() {
    static const std::array<std::pair<std::string_view, Field>, 16> table{{
        {"Q", &ModelParameters::Q},
        {"A", &ModelParameters::A},
        {"B", &ModelParameters::B},
        {"C", &ModelParameters::C},
        {"alpha1", &ModelParameters::alpha1},
        {"alpha2", &ModelParameters::alpha2},
        {"Tc_plus", &ModelParameters::Tc_plus},
        {"Tc_minus", &ModelParameters::Tc_minus},
        {"a", &ModelParameters::a},
        {"b0", &ModelParameters::b0},
        {"b", &ModelParameters::b},
        {"b1", &ModelParameters::b1},
        {"tau", &ModelParameters::tau},
        {"rho", &ModelParameters::rho},
        {"epsilon", &ModelParameters::epsilon},
        {"s2", &ModelParameters::s2},
    }};
    return table;
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

void ModelParameters::validate() const {
    require_positive(B, "B");
    require_positive(C, "C");
    require_positive(Q, "Q");
    require_positive(tau, "tau");
    require_positive(rho, "rho");
    require_positive(epsilon, "epsilon");
    require_positive(a, "a");
    require_positive(b0, "b0");
    require_positive(b, "b");
    require_positive(b1, "b1");
    if (!(alpha1 < alpha2)) {
        throw std::invalid_argument(
            "degenerate albedo: alpha1 must be strictly below alpha2 "
            "(no ice-albedo contrast makes F independent of the snow line)");
    }
    if (!(Tc_minus > Tc_plus)) {
        throw std::invalid_argument("Tc_minus must exceed Tc_plus");
    }
}

std::vector<std::string> ModelParameters::warnings() const {
    std::vector<std::string> out;
    if (!(b0 < b)) out.emplace_back("b0 >= b: the advance sink is not virtual");
    if (!(b < b1)) out.emplace_back("b >= b1: the retreat sink is not virtual");
    return out;
}

const std::vector<std::string_view>& parameter_names() {
    static const std::vector<std::string_view> names = [] {
        std::vector<std::string_view> v;
        for (const auto& [name, field] : field_table()) v.push_back(name);
        return v;
    }();
    return names;
}

bool set_parameter(ModelParameters& params, std::string_view name, double value) {
    for (const auto& [n, field] : field_table()) {
        if (n == name) {
            params.*field = value;
            return true;
        }
    }
    return false;
}

double get_parameter(const ModelParameters& params, std::string_view name) {
    for (const auto& [n, field] : field_table()) {
        if (n == name) return params.*field;
    }
    throw std::out_of_range("unknown parameter '" + std::string(name) + "'");
}

std::string_view to_string(Regime r) noexcept {
    return r == Regime::Advance ? "advance" : "retreat";
}

Regime parse_regime(std::string_view text) {
    if (text == "advance") return Regime::Advance;
    if (text == "retreat") return Regime::Retreat;
    throw std::invalid_argument("unknown regime '" + std::string(text) + "'");
}

}  // namespace glacial
