#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "glacial/config.hpp"
#include "glacial/experiments.hpp"

namespace glacial {

// ---------------------------------------------------------------------------
// Tables: trajectories, event logs, projections and nullcline samples.

using Cell = std::variant<double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Numbers with 17 significant digits, which round-trips every double.
std::string format_number(double x);

/// Header line, then one comma-separated line per row.
void write_csv(std::ostream& out, const Table& table);
/// Every cell comes back as a string; `expected_header` must match exactly.
Table read_csv(std::istream& in, const std::vector<std::string>& expected_header);

void write_table(std::ostream& out, const Table& table, TableFormat format);
Table read_table(std::istream& in, const std::vector<std::string>& expected_header, TableFormat format);

/// File name of a table in the given format, e.g. "trajectory.csv".
std::string table_file(std::string_view stem, TableFormat format);

const std::vector<std::string>& trajectory_header();  ///< t,w,eta,xi,regime
const std::vector<std::string>& event_header();       ///< t,w,eta,xi,kind,regime_before,regime_after
const std::vector<std::string>& projection_header();  ///< t,eta,xi
const std::vector<std::string>& nullcline_header();

Table trajectory_table(const std::vector<TrajectoryRow>& rows);
std::vector<TrajectoryRow> trajectory_rows(const Table& table);

Table event_table(const std::vector<CrossingEvent>& events);
std::vector<CrossingEvent> event_rows(const Table& table);

/// Time series of the snow and ice lines: the (eta, xi) projection.
Table projection_table(const std::vector<TrajectoryRow>& rows);

Table nullcline_table(const std::vector<NullclineRow>& rows);
std::vector<NullclineRow> nullcline_rows(const Table& table);

// ---------------------------------------------------------------------------
// Structured documents (summaries and reports).

using Json = nlohmann::ordered_json;

void to_json(Json& j, const State& x);
void from_json(const Json& j, State& x);
void to_json(Json& j, const ModelParameters& p);
void from_json(const Json& j, ModelParameters& p);
void to_json(Json& j, const SectionPoint& x);
void from_json(const Json& j, SectionPoint& x);
void to_json(Json& j, const EquilibriumReport& e);
void from_json(const Json& j, EquilibriumReport& e);
void to_json(Json& j, const OrbitResult& r);
void from_json(const Json& j, OrbitResult& r);
void to_json(Json& j, const SweepSettings& s);
void from_json(const Json& j, SweepSettings& s);

void to_json(Json& j, const EquilibriaReport& r);
void from_json(const Json& j, EquilibriaReport& r);
void to_json(Json& j, const SimulationSummary& s);
void from_json(const Json& j, SimulationSummary& s);
void to_json(Json& j, const SeedTrial& s);
void from_json(const Json& j, SeedTrial& s);
void to_json(Json& j, const OrbitReport& r);
void from_json(const Json& j, OrbitReport& r);
void to_json(Json& j, const SweepRecord& r);
void from_json(const Json& j, SweepRecord& r);
void to_json(Json& j, const SweepReport& r);
void from_json(const Json& j, SweepReport& r);
void to_json(Json& j, const NullclineAnnotations& a);
void from_json(const Json& j, NullclineAnnotations& a);
void to_json(Json& j, const EpsilonReport& r);
void from_json(const Json& j, EpsilonReport& r);

/// Pretty-printed document with a trailing newline.
template <typename T>
std::string to_document(const T& value) {
    Json j;
    to_json(j, value);
    return j.dump(2) + "\n";
}

template <typename T>
T from_document(std::string_view text) {
    T value;
    from_json(Json::parse(text), value);
    return value;
}

// ---------------------------------------------------------------------------
// Files

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
void write_file_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace glacial
