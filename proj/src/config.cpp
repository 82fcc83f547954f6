#include "glacial/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "glacial/errors.hpp"

namespace glacial {

std::string_view to_string(TableFormat f) noexcept { return f == TableFormat::Csv ? "csv" : "json"; }

TableFormat parse_table_format(std::string_view text) {
    if (text == "csv") return TableFormat::Csv;
    if (text == "json") return TableFormat::Json;
    throw std::invalid_argument("unknown table format '" + std::string(text) + "' (csv or json)");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view v) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
    }
    return out;
}

template <typename Int>
Int to_integer(std::string_view v) {
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw std::invalid_argument("expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

bool to_bool(std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct Entry {
    std::string key;
    std::function<void(RunConfig&, std::string_view)> set;
    std::function<std::string(const RunConfig&)> get;
};

template <typename T>
Entry real(std::string key, T RunConfig::*group, double T::*field) {
    return {std::move(key), [=](RunConfig& c, std::string_view v) { (c.*group).*field = to_double(v); },
            [=](const RunConfig& c) { return fmt((c.*group).*field); }};
}

template <typename T>
Entry optional_real(std::string key, T RunConfig::*group, std::optional<double> T::*field) {
    return {std::move(key),
            [=](RunConfig& c, std::string_view v) {
                if (v == "auto") {
                    ((c.*group).*field).reset();
                } else {
                    (c.*group).*field = to_double(v);
                }
            },
            [=](const RunConfig& c) {
                const auto& o = (c.*group).*field;
                return o ? fmt(*o) : std::string("auto");
            }};
}

template <typename T, typename Int>
Entry integer(std::string key, T RunConfig::*group, Int T::*field) {
    return {std::move(key), [=](RunConfig& c, std::string_view v) { (c.*group).*field = to_integer<Int>(v); },
            [=](const RunConfig& c) { return std::to_string((c.*group).*field); }};
}

template <typename T>
Entry boolean(std::string key, T RunConfig::*group, bool T::*field) {
    return {std::move(key), [=](RunConfig& c, std::string_view v) { (c.*group).*field = to_bool(v); },
            [=](const RunConfig& c) { return std::string((c.*group).*field ? "true" : "false"); }};
}

std::vector<Entry> build_entries() {
    std::vector<Entry> e;
    for (const auto name : parameter_names()) {
        const std::string n(name);
        e.push_back({"params." + n,
                     [n](RunConfig& c, std::string_view v) { set_parameter(c.params, n, to_double(v)); },
                     [n](const RunConfig& c) { return fmt(get_parameter(c.params, n)); }});
    }

    using IC = IntegratorConfig;
    e.push_back({"integrator.step_mode",
                 [](RunConfig& c, std::string_view v) { c.integrator.step_mode = parse_step_mode(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.integrator.step_mode)); }});
    e.push_back(real("integrator.base_step", &RunConfig::integrator, &IC::base_step));
    e.push_back(real("integrator.rel_tol", &RunConfig::integrator, &IC::rel_tol));
    e.push_back(real("integrator.abs_tol", &RunConfig::integrator, &IC::abs_tol));
    e.push_back(real("integrator.max_step", &RunConfig::integrator, &IC::max_step));
    e.push_back(real("integrator.event_tol", &RunConfig::integrator, &IC::event_tol));
    e.push_back(real("integrator.tangency_tol", &RunConfig::integrator, &IC::tangency_tol));
    e.push_back(real("integrator.max_time", &RunConfig::integrator, &IC::max_time));
    e.push_back(integer("integrator.max_events", &RunConfig::integrator, &IC::max_events));
    e.push_back(boolean("integrator.record_samples", &RunConfig::integrator, &IC::record_samples));
    e.push_back(real("integrator.sample_interval", &RunConfig::integrator, &IC::sample_interval));

    using SS = SimulateSettings;
    e.push_back(real("simulate.w", &RunConfig::simulate, &SS::w));
    e.push_back(real("simulate.eta", &RunConfig::simulate, &SS::eta));
    e.push_back(real("simulate.xi", &RunConfig::simulate, &SS::xi));
    e.push_back({"simulate.regime",
                 [](RunConfig& c, std::string_view v) {
                     if (v == "auto") {
                         c.simulate.regime.reset();
                     } else {
                         c.simulate.regime = parse_regime(v);
                     }
                 },
                 [](const RunConfig& c) {
                     return c.simulate.regime ? std::string(to_string(*c.simulate.regime)) : std::string("auto");
                 }});

    using OS = OrbitSettings;
    e.push_back(optional_real("orbit.seed_w", &RunConfig::orbit, &OS::seed_w));
    e.push_back(optional_real("orbit.seed_eta", &RunConfig::orbit, &OS::seed_eta));
    e.push_back(real("orbit.tolerance", &RunConfig::orbit, &OS::tolerance));
    e.push_back(integer("orbit.max_iterations", &RunConfig::orbit, &OS::max_iterations));
    e.push_back(boolean("orbit.allow_inadmissible_epsilon", &RunConfig::orbit, &OS::allow_inadmissible_epsilon));
    e.push_back(integer("orbit.random_seeds", &RunConfig::orbit, &OS::random_seeds));
    e.push_back(integer("orbit.rng_seed", &RunConfig::orbit, &OS::rng_seed));
    e.push_back(integer("orbit.max_draws", &RunConfig::orbit, &OS::max_draws));
    e.push_back(real("orbit.agreement_tol", &RunConfig::orbit, &OS::agreement_tol));

    using WS = SweepSettings;
    e.push_back(real("sweep.start", &RunConfig::sweep, &WS::start));
    e.push_back(real("sweep.stop", &RunConfig::sweep, &WS::stop));
    e.push_back(real("sweep.step", &RunConfig::sweep, &WS::step));
    e.push_back(integer("sweep.workers", &RunConfig::sweep, &WS::workers));
    e.push_back(boolean("sweep.refine", &RunConfig::sweep, &WS::refine));
    e.push_back(real("sweep.convergence_time", &RunConfig::sweep, &WS::convergence_time));

    e.push_back(integer("nullclines.samples", &RunConfig::nullclines, &NullclineSettings::samples));

    e.push_back({"output.dir", [](RunConfig& c, std::string_view v) { c.output.dir = std::string(v); },
                 [](const RunConfig& c) { return c.output.dir; }});
    e.push_back({"output.format",
                 [](RunConfig& c, std::string_view v) { c.output.format = parse_table_format(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.output.format)); }});
    return e;
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = build_entries();
    return table;
}

}  // namespace

void RunConfig::validate() const {
    try {
        params.validate();
        integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!std::isfinite(sweep.start) || !std::isfinite(sweep.stop)) {
        throw ConfigError("sweep range must be finite", 0, "sweep.start");
    }
    if (!(sweep.step > 0.0)) throw ConfigError("must be positive", 0, "sweep.step");
    if (sweep.stop < sweep.start) throw ConfigError("must not be below sweep.start", 0, "sweep.stop");
    if (sweep.workers < 0) throw ConfigError("must be non-negative", 0, "sweep.workers");
    if (!(sweep.convergence_time > 0.0)) throw ConfigError("must be positive", 0, "sweep.convergence_time");
    if (orbit.seed_w.has_value() != orbit.seed_eta.has_value()) {
        throw ConfigError("orbit.seed_w and orbit.seed_eta must be given together", 0, "orbit.seed_w");
    }
    if (!(orbit.tolerance > 0.0)) throw ConfigError("must be positive", 0, "orbit.tolerance");
    if (orbit.max_iterations < 1) throw ConfigError("must be at least 1", 0, "orbit.max_iterations");
    if (orbit.random_seeds < 0) throw ConfigError("must be non-negative", 0, "orbit.random_seeds");
    if (orbit.max_draws < 1) throw ConfigError("must be at least 1", 0, "orbit.max_draws");
    if (!(orbit.agreement_tol > 0.0)) throw ConfigError("must be positive", 0, "orbit.agreement_tol");
    if (nullclines.samples < 2) throw ConfigError("must be at least 2", 0, "nullclines.samples");
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& e : entries()) keys.push_back(e.key);
    return keys;
}

void apply_setting(RunConfig& config, std::string_view key, std::string_view value, int line) {
    for (const auto& e : entries()) {
        if (e.key != key) continue;
        try {
            e.set(config, value);
        } catch (const std::exception& ex) {
            throw ConfigError(ex.what(), line, std::string(key));
        }
        return;
    }
    throw ConfigError("unknown key", line, std::string(key));
}

void apply_override(RunConfig& config, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError("override must have the form key=value, got '" + std::string(assignment) + "'");
    }
    apply_setting(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::set<std::string, std::less<>> seen;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line_no);
        if (value.empty()) throw ConfigError("missing value", line_no, std::string(key));
        if (!seen.emplace(key).second) throw ConfigError("key given twice", line_no, std::string(key));
        apply_setting(base, key, value, line_no);
    }
    return base;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_config(const RunConfig& config) {
    std::string out;
    for (const auto& e : entries()) out += e.key + " = " + e.get(config) + "\n";
    return out;
}

}  // namespace glacial
