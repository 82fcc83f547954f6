#include "glacial/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace glacial {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

std::string cell_text(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
    return std::get<std::string>(c);
}

double cell_number(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    const auto& s = std::get<std::string>(c);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("table cell '" + s + "' is not a number");
    }
    return out;
}

const std::string& cell_string(const Cell& c) {
    if (const auto* s = std::get_if<std::string>(&c)) return *s;
    throw std::invalid_argument("table cell holds a number where a label was expected");
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void check_width(const Table& t) {
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (t.rows[i].size() != t.columns.size()) {
            throw std::invalid_argument("table row " + std::to_string(i + 1) + " has " +
                                        std::to_string(t.rows[i].size()) + " cells, expected " +
                                        std::to_string(t.columns.size()));
        }
    }
}

}  // namespace

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell_text(row[i]);
        out << '\n';
    }
}

Table read_csv(std::istream& in, const std::vector<std::string>& expected_header) {
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty table");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.columns = split(line);
    if (t.columns != expected_header) throw std::invalid_argument("unexpected table header '" + line + "'");
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line);
        t.rows.emplace_back(fields.begin(), fields.end());
    }
    check_width(t);
    return t;
}

void write_table(std::ostream& out, const Table& table, TableFormat format) {
    if (format == TableFormat::Csv) {
        write_csv(out, table);
        return;
    }
    Json j;
    j["columns"] = table.columns;
    Json rows = Json::array();
    for (const auto& row : table.rows) {
        Json r = Json::array();
        for (const auto& c : row) {
            if (const auto* d = std::get_if<double>(&c)) {
                r.push_back(*d);
            } else {
                r.push_back(std::get<std::string>(c));
            }
        }
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    out << j.dump(1) << '\n';
}

Table read_table(std::istream& in, const std::vector<std::string>& expected_header, TableFormat format) {
    if (format == TableFormat::Csv) return read_csv(in, expected_header);
    const Json j = Json::parse(in);
    Table t;
    t.columns = j.at("columns").get<std::vector<std::string>>();
    if (t.columns != expected_header) throw std::invalid_argument("unexpected table columns");
    for (const auto& r : j.at("rows")) {
        std::vector<Cell> row;
        for (const auto& c : r) {
            if (c.is_string()) {
                row.emplace_back(c.get<std::string>());
            } else {
                row.emplace_back(c.get<double>());
            }
        }
        t.rows.push_back(std::move(row));
    }
    check_width(t);
    return t;
}

std::string table_file(std::string_view stem, TableFormat format) {
    return std::string(stem) + (format == TableFormat::Csv ? ".csv" : ".json");
}

const std::vector<std::string>& trajectory_header() {
    static const std::vector<std::string> h{"t", "w", "eta", "xi", "regime"};
    return h;
}

const std::vector<std::string>& event_header() {
    static const std::vector<std::string> h{"t", "w", "eta", "xi", "kind", "regime_before", "regime_after"};
    return h;
}

const std::vector<std::string>& projection_header() {
    static const std::vector<std::string> h{"t", "eta", "xi"};
    return h;
}

const std::vector<std::string>& nullcline_header() {
    static const std::vector<std::string> h{"eta",     "F",       "G_plus", "G_minus", "g_plus",
                                            "g_minus", "gamma",   "h_plus", "h_minus"};
    return h;
}

Table trajectory_table(const std::vector<TrajectoryRow>& rows) {
    Table t{trajectory_header(), {}};
    t.rows.reserve(rows.size());
    for (const auto& r : rows) {
        t.rows.push_back({r.t, r.x.w, r.x.eta, r.x.xi, std::string(to_string(r.regime))});
    }
    return t;
}

std::vector<TrajectoryRow> trajectory_rows(const Table& table) {
    std::vector<TrajectoryRow> out;
    out.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        out.push_back({cell_number(r[0]),
                       {cell_number(r[1]), cell_number(r[2]), cell_number(r[3])},
                       parse_regime(cell_string(r[4]))});
    }
    return out;
}

Table event_table(const std::vector<CrossingEvent>& events) {
    Table t{event_header(), {}};
    for (const auto& e : events) {
        t.rows.push_back({e.time, e.state.w, e.state.eta, e.state.xi, std::string(to_string(e.kind)),
                          std::string(to_string(e.regime_before)), std::string(to_string(e.regime_after))});
    }
    return t;
}

std::vector<CrossingEvent> event_rows(const Table& table) {
    std::vector<CrossingEvent> out;
    for (const auto& r : table.rows) {
        out.push_back({cell_number(r[0]),
                       {cell_number(r[1]), cell_number(r[2]), cell_number(r[3])},
                       parse_boundary_kind(cell_string(r[4])),
                       parse_regime(cell_string(r[5])),
                       parse_regime(cell_string(r[6]))});
    }
    return out;
}

Table projection_table(const std::vector<TrajectoryRow>& rows) {
    Table t{projection_header(), {}};
    t.rows.reserve(rows.size());
    for (const auto& r : rows) t.rows.push_back({r.t, r.x.eta, r.x.xi});
    return t;
}

Table nullcline_table(const std::vector<NullclineRow>& rows) {
    Table t{nullcline_header(), {}};
    for (const auto& r : rows) {
        t.rows.push_back({r.eta, r.F, r.G_plus, r.G_minus, r.g_plus, r.g_minus, r.gamma, r.h_plus, r.h_minus});
    }
    return t;
}

std::vector<NullclineRow> nullcline_rows(const Table& table) {
    std::vector<NullclineRow> out;
    for (const auto& r : table.rows) {
        out.push_back({cell_number(r[0]), cell_number(r[1]), cell_number(r[2]), cell_number(r[3]),
                       cell_number(r[4]), cell_number(r[5]), cell_number(r[6]), cell_number(r[7]),
                       cell_number(r[8])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <std::size_t N>
Json eigen_json(const std::array<std::complex<double>, N>& ev) {
    Json out = Json::array();
    for (const auto& z : ev) out.push_back({z.real(), z.imag()});
    return out;
}

template <std::size_t N>
std::array<std::complex<double>, N> eigen_from(const Json& j) {
    if (j.size() != N) throw std::invalid_argument("wrong number of eigenvalues");
    std::array<std::complex<double>, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = {j[i].at(0).get<double>(), j[i].at(1).get<double>()};
    return out;
}

}  // namespace

void to_json(Json& j, const State& x) { j = {{"w", x.w}, {"eta", x.eta}, {"xi", x.xi}}; }

void from_json(const Json& j, State& x) {
    x = {j.at("w").get<double>(), j.at("eta").get<double>(), j.at("xi").get<double>()};
}

void to_json(Json& j, const ModelParameters& p) {
    j = Json::object();
    for (const auto name : parameter_names()) j[std::string(name)] = get_parameter(p, name);
}

void from_json(const Json& j, ModelParameters& p) {
    for (const auto name : parameter_names()) set_parameter(p, name, j.at(std::string(name)).get<double>());
}

void to_json(Json& j, const SectionPoint& x) { j = {{"w", x.w}, {"eta", x.eta}}; }

void from_json(const Json& j, SectionPoint& x) { x = {j.at("w").get<double>(), j.at("eta").get<double>()}; }

void to_json(Json& j, const EquilibriumReport& e) {
    j = Json::object();
    j["regime"] = to_string(e.regime);
    j["state"] = e.state;
    j["eigenvalues"] = eigen_json(e.eigenvalues);
    j["stability"] = to_string(e.stability);
    j["classification"] = to_string(e.classification);
}

void from_json(const Json& j, EquilibriumReport& e) {
    e.regime = parse_regime(j.at("regime").get<std::string>());
    e.state = j.at("state").get<State>();
    e.eigenvalues = eigen_from<3>(j.at("eigenvalues"));
    e.stability = parse_stability(j.at("stability").get<std::string>());
    e.classification = parse_classification(j.at("classification").get<std::string>());
}

void to_json(Json& j, const OrbitResult& r) {
    j = Json::object();
    j["fixed_point"] = r.fixed_point;
    j["partner_point"] = r.partner_point;
    j["period"] = r.period;
    j["transit_minus"] = r.transit_minus;
    j["transit_plus"] = r.transit_plus;
    j["closure_error"] = r.closure_error;
    j["contraction_estimate"] = r.contraction_estimate;
    j["iterations"] = r.iterations;
    j["step_sizes"] = r.step_sizes;
}

void from_json(const Json& j, OrbitResult& r) {
    r.fixed_point = j.at("fixed_point").get<SectionPoint>();
    r.partner_point = j.at("partner_point").get<SectionPoint>();
    r.period = j.at("period").get<double>();
    r.transit_minus = j.at("transit_minus").get<double>();
    r.transit_plus = j.at("transit_plus").get<double>();
    r.closure_error = j.at("closure_error").get<double>();
    r.contraction_estimate = j.at("contraction_estimate").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.step_sizes = j.at("step_sizes").get<std::vector<double>>();
}

void to_json(Json& j, const SweepSettings& s) {
    j = {{"start", s.start},   {"stop", s.stop},     {"step", s.step},
         {"workers", s.workers}, {"refine", s.refine}, {"convergence_time", s.convergence_time}};
}

void from_json(const Json& j, SweepSettings& s) {
    s.start = j.at("start").get<double>();
    s.stop = j.at("stop").get<double>();
    s.step = j.at("step").get<double>();
    s.workers = j.at("workers").get<int>();
    s.refine = j.at("refine").get<bool>();
    s.convergence_time = j.at("convergence_time").get<double>();
}

void to_json(Json& j, const EquilibriaReport& r) {
    j = {{"params", r.params}, {"equilibria", r.equilibria}, {"warnings", r.warnings}};
}

void from_json(const Json& j, EquilibriaReport& r) {
    r.params = j.at("params").get<ModelParameters>();
    r.equilibria = j.at("equilibria").get<std::vector<EquilibriumReport>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
}

void to_json(Json& j, const SimulationSummary& s) {
    j = Json::object();
    j["params"] = s.params;
    j["start"] = s.start;
    j["start_regime"] = to_string(s.start_regime);
    j["termination"] = to_string(s.termination);
    j["diagnostic"] = s.diagnostic;
    j["final_time"] = s.final_time;
    j["final_state"] = s.final_state;
    j["final_regime"] = to_string(s.final_regime);
    j["segments"] = s.segments;
    j["samples"] = s.samples;
    j["events"] = s.events;
    j["crossings"] = s.crossings;
}

void from_json(const Json& j, SimulationSummary& s) {
    s.params = j.at("params").get<ModelParameters>();
    s.start = j.at("start").get<State>();
    s.start_regime = parse_regime(j.at("start_regime").get<std::string>());
    s.termination = parse_termination(j.at("termination").get<std::string>());
    s.diagnostic = j.at("diagnostic").get<std::string>();
    s.final_time = j.at("final_time").get<double>();
    s.final_state = j.at("final_state").get<State>();
    s.final_regime = parse_regime(j.at("final_regime").get<std::string>());
    s.segments = j.at("segments").get<std::size_t>();
    s.samples = j.at("samples").get<std::size_t>();
    s.events = j.at("events").get<std::size_t>();
    s.crossings = j.at("crossings").get<std::size_t>();
}

void to_json(Json& j, const SeedTrial& s) {
    j = {{"seed", s.seed},
         {"converged", s.converged},
         {"fixed_point", s.fixed_point},
         {"distance", s.distance},
         {"failure", s.failure}};
}

void from_json(const Json& j, SeedTrial& s) {
    s.seed = j.at("seed").get<SectionPoint>();
    s.converged = j.at("converged").get<bool>();
    s.fixed_point = j.at("fixed_point").get<SectionPoint>();
    s.distance = j.at("distance").get<double>();
    s.failure = j.at("failure").get<std::string>();
}

void to_json(Json& j, const OrbitReport& r) {
    j = Json::object();
    j["params"] = r.params;
    j["epsilon_bound"] = r.epsilon_bound;
    j["seed"] = r.seed;
    j["orbit"] = r.orbit;
    j["seed_trials"] = r.seed_trials;
    j["rejected_draws"] = r.rejected_draws;
    j["seeds_agree"] = r.seeds_agree;
    j["period_crossings"] = r.period_crossings;
    j["period_time"] = r.period_time;
    j["period_closure"] = r.period_closure;
    j["eta_range"] = {r.eta_min, r.eta_max};
    j["xi_range"] = {r.xi_min, r.xi_max};
}

void from_json(const Json& j, OrbitReport& r) {
    r.params = j.at("params").get<ModelParameters>();
    r.epsilon_bound = j.at("epsilon_bound").get<double>();
    r.seed = j.at("seed").get<SectionPoint>();
    r.orbit = j.at("orbit").get<OrbitResult>();
    r.seed_trials = j.at("seed_trials").get<std::vector<SeedTrial>>();
    r.rejected_draws = j.at("rejected_draws").get<int>();
    r.seeds_agree = j.at("seeds_agree").get<bool>();
    r.period_crossings = j.at("period_crossings").get<std::size_t>();
    r.period_time = j.at("period_time").get<double>();
    r.period_closure = j.at("period_closure").get<double>();
    r.eta_min = j.at("eta_range").at(0).get<double>();
    r.eta_max = j.at("eta_range").at(1).get<double>();
    r.xi_min = j.at("xi_range").at(0).get<double>();
    r.xi_max = j.at("xi_range").at(1).get<double>();
}

void to_json(Json& j, const SweepRecord& r) {
    j = Json::object();
    j["b0"] = r.swept_value;
    j["outcome"] = to_string(r.outcome);
    j["refined"] = r.refined;
    j["orbit"] = r.orbit ? Json(*r.orbit) : Json(nullptr);
    j["convergence_distance"] = r.convergence_distance ? Json(*r.convergence_distance) : Json(nullptr);
    j["equilibria"] = r.equilibria;
    j["note"] = r.note;
}

void from_json(const Json& j, SweepRecord& r) {
    r.swept_value = j.at("b0").get<double>();
    r.outcome = parse_sweep_outcome(j.at("outcome").get<std::string>());
    r.refined = j.at("refined").get<bool>();
    r.orbit.reset();
    if (!j.at("orbit").is_null()) r.orbit = j.at("orbit").get<OrbitResult>();
    r.convergence_distance.reset();
    if (!j.at("convergence_distance").is_null()) r.convergence_distance = j.at("convergence_distance").get<double>();
    r.equilibria = j.at("equilibria").get<std::vector<EquilibriumReport>>();
    r.note = j.at("note").get<std::string>();
}

void to_json(Json& j, const SweepReport& r) {
    j = Json::object();
    j["parameter"] = "b0";
    j["base_params"] = r.base_params;
    j["settings"] = r.settings;
    j["contiguous"] = r.contiguous;
    j["review_flags"] = r.review_flags;
    j["records"] = r.records;
}

void from_json(const Json& j, SweepReport& r) {
    r.base_params = j.at("base_params").get<ModelParameters>();
    r.settings = j.at("settings").get<SweepSettings>();
    r.contiguous = j.at("contiguous").get<bool>();
    r.review_flags = j.at("review_flags").get<std::vector<std::string>>();
    r.records = j.at("records").get<std::vector<SweepRecord>>();
}

void to_json(Json& j, const NullclineAnnotations& a) {
    j = Json::object();
    j["h_plus_roots"] = a.h_plus_roots;
    j["h_minus_roots"] = a.h_minus_roots;
    j["pole"] = {{"g_plus", a.g_plus_pole},
                 {"G_plus", a.G_plus_pole},
                 {"g_minus", a.g_minus_pole},
                 {"G_minus", a.G_minus_pole}};
    j["w_nullcline_shared"] = true;
}

void from_json(const Json& j, NullclineAnnotations& a) {
    a.h_plus_roots = j.at("h_plus_roots").get<std::vector<double>>();
    a.h_minus_roots = j.at("h_minus_roots").get<std::vector<double>>();
    const auto& pole = j.at("pole");
    a.g_plus_pole = pole.at("g_plus").get<double>();
    a.G_plus_pole = pole.at("G_plus").get<double>();
    a.g_minus_pole = pole.at("g_minus").get<double>();
    a.G_minus_pole = pole.at("G_minus").get<double>();
}

void to_json(Json& j, const EpsilonReport& r) {
    j = {{"epsilon", r.epsilon},
         {"epsilon_bound", r.epsilon_bound},
         {"admissible", r.admissible},
         {"eta_intersection", r.eta_intersection},
         {"intersection_in_unit_interval", r.intersection_in_unit_interval}};
}

void from_json(const Json& j, EpsilonReport& r) {
    r.epsilon = j.at("epsilon").get<double>();
    r.epsilon_bound = j.at("epsilon_bound").get<double>();
    r.admissible = j.at("admissible").get<bool>();
    r.eta_intersection = j.at("eta_intersection").get<double>();
    r.intersection_in_unit_interval = j.at("intersection_in_unit_interval").get<bool>();
}

// ---------------------------------------------------------------------------
// Files

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace glacial
