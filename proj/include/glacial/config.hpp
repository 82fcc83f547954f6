#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glacial/integrator.hpp"
#include "glacial/parameters.hpp"

namespace glacial {

enum class TableFormat { Csv, Json };

std::string_view to_string(TableFormat f) noexcept;
TableFormat parse_table_format(std::string_view text);

struct SimulateSettings {
    double w = 0.0;
    double eta = 0.8;
    double xi = 0.6;
    /// Empty selects the regime from the side of the switching plane.
    std::optional<Regime> regime;

    bool operator==(const SimulateSettings&) const = default;
};

struct OrbitSettings {
    /// Picard seed in SigmaPlus; empty uses the retreat sink projection.
    std::optional<double> seed_w;
    std::optional<double> seed_eta;
    double tolerance = 1e-10;
    int max_iterations = 500;
    /// Search even when epsilon is at or above the tangency bound.
    bool allow_inadmissible_epsilon = false;
    /// Extra random seeds drawn from SigmaPlus inside the guard set.
    int random_seeds = 5;
    std::uint64_t rng_seed = 1;
    /// Draws allowed per accepted random seed before giving up.
    int max_draws = 200;
    double agreement_tol = 1e-8;

    bool operator==(const OrbitSettings&) const = default;
};

struct SweepSettings {
    double start = 1.5;
    double stop = 2.5;
    double step = 0.02;
    /// 0 uses the hardware concurrency.
    int workers = 0;
    /// Bisect the boundary equilibrium between grid points where the advance
    /// sink changes side and insert it as an extra record.
    bool refine = true;
    /// Length of the run from the reference orbit toward a regular sink.
    double convergence_time = 3000.0;

    bool operator==(const SweepSettings&) const = default;
};

struct NullclineSettings {
    int samples = 1001;

    bool operator==(const NullclineSettings&) const = default;
};

struct OutputSettings {
    std::string dir = "out";
    TableFormat format = TableFormat::Csv;

    bool operator==(const OutputSettings&) const = default;
};

struct RunConfig {
    ModelParameters params;
    IntegratorConfig integrator;
    SimulateSettings simulate;
    OrbitSettings orbit;
    SweepSettings sweep;
    NullclineSettings nullclines;
    OutputSettings output;

    /// Throws ConfigError for values no command can use (non-finite or empty
    /// sweep range, non-positive step, bad counts) and for parameter or
    /// integrator settings rejected by their own validators.
    void validate() const;

    bool operator==(const RunConfig&) const = default;
};

/// Keys accepted by the config parser, in the order `format_config` writes them.
std::vector<std::string> config_keys();

/// Assigns one `key = value` setting. Throws ConfigError (carrying `line`)
/// for an unknown key or an unparsable value.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value, int line = 0);

/// Applies a command-line override of the form `key=value`.
void apply_override(RunConfig& config, std::string_view assignment);

/// Parses flat `key = value` text with dotted keys and `#` comments, starting
/// from `base`. Unknown and repeated keys are errors.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path);

/// Every setting, one per line; parses back to an equal RunConfig.
std::string format_config(const RunConfig& config);

}  // namespace glacial
