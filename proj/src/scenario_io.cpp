#include "rsnet/scenario_io.hpp"

#include "rsnet/errors.hpp"

#include <fstream>

namespace rsnet {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains(field)) throw ConfigError("missing field '" + field + "'");
    return j.at(field);
}

double json_number(const json& j, const std::string& field) {
    if (!j.is_number()) throw ConfigError("field '" + field + "' must be a number");
    return j.get<double>();
}

// Scalar broadcast to n entries, or an explicit array.
Vector scalar_or_vector(const json& j, const std::string& field, std::size_t n) {
    if (j.is_number()) return Vector::Constant(static_cast<Eigen::Index>(n), j.get<double>());
    return json_vector(j, field, n);
}

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
    const std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

TemperatureSeries temperature_from_json(const json& j, const std::filesystem::path& base) {
    if (j.is_number()) {
        TemperatureSeries s;
        s.hours = {0.0};
        s.deg_c = {j.get<double>()};
        return s;
    }
    if (!j.is_object()) throw ConfigError("T_ext_degC must be a number or an object");
    if (j.contains("csv")) {
        ColumnSpec cols;
        const auto column = [&](const char* key, std::string& out) {
            if (!j.contains(key)) return;
            const json& c = j.at(key);
            out = c.is_string() ? c.get<std::string>() : std::to_string(c.get<long>());
        };
        column("time_column", cols.time);
        column("value_column", cols.value);
        const auto path = resolve_path(require(j, "csv").get<std::string>(), base);
        if (!std::filesystem::exists(path)) throw ConfigError("temperature file not found: " + path.string());
        return load_temperature_csv(path.string(), cols);
    }
    if (j.contains("synthetic")) {
        if (j.at("synthetic") != "cold_snap") throw ConfigError("unknown synthetic series");
        const double hours = j.value("hours", 336.0);
        const double step = j.value("step_h", 1.0);
        return synthetic_cold_snap(hours, step);
    }
    TemperatureSeries s;
    const Vector h = json_vector(require(j, "hours"), "hours");
    const Vector v = json_vector(require(j, "values"), "values", static_cast<std::size_t>(h.size()));
    s.hours.assign(h.data(), h.data() + h.size());
    s.deg_c.assign(v.data(), v.data() + v.size());
    return s;
}

SectorPair pair_from_json(const json& j, std::size_t n) {
    if (j.is_string()) {
        const auto name = j.get<std::string>();
        if (name == "saturation" || name == "saturation_deadzone") return SectorPair::saturation(n);
        if (name == "identity" || name == "identity_zero") return SectorPair::identity(n);
        throw ConfigError("unknown sector pair '" + name + "'");
    }
    const json& pieces = require(j, "custom");
    if (!pieces.is_array() || pieces.size() != n) throw ConfigError("custom pair needs one piece per coordinate");
    std::vector<PiecewiseLinear> out;
    for (const json& p : pieces) {
        PiecewiseLinear pw;
        const Vector k = json_vector(require(p, "knots"), "knots");
        const Vector v = json_vector(require(p, "values"), "values", static_cast<std::size_t>(k.size()));
        pw.knots.assign(k.data(), k.data() + k.size());
        pw.values.assign(v.data(), v.data() + v.size());
        pw.left_slope = p.value("left_slope", 0.0);
        pw.right_slope = p.value("right_slope", 0.0);
        out.push_back(std::move(pw));
    }
    SectorPair pair = SectorPair::custom(std::move(out));
    const std::string bad = sector_violation(pair);
    if (!bad.empty()) throw InvalidArgument("custom pair: " + bad);
    return pair;
}

DisturbanceSignal disturbance_from_json(const json& doc, std::size_t n) {
    if (doc.contains("w_series")) {
        const json& ws = doc.at("w_series");
        const Vector h = json_vector(require(ws, "hours"), "w_series.hours");
        const json& vals = require(ws, "values");
        if (!vals.is_array() || vals.size() != static_cast<std::size_t>(h.size())) {
            throw ConfigError("w_series.values needs one row per timestamp");
        }
        std::vector<Vector> rows;
        for (const json& row : vals) rows.push_back(json_vector(row, "w_series.values", n));
        return DisturbanceSignal::series(std::vector<double>(h.data(), h.data() + h.size()), std::move(rows));
    }
    if (!doc.contains("w")) return DisturbanceSignal::constant(Vector::Zero(static_cast<Eigen::Index>(n)));
    return DisturbanceSignal::constant(scalar_or_vector(doc.at("w"), "w", n));
}

ResolvedScenario from_heating(HeatingScenario hs, const json& doc) {
    StandardForm sf = to_standard_form(hs);
    const std::size_t n = hs.n();
    const auto fill = [n](const Vector& v, double def) {
        return v.size() == 0 ? Vector::Constant(static_cast<Eigen::Index>(n), def) : v;
    };
    ResolvedScenario out{"heating",
                         std::nullopt,
                         std::move(sf.plant),
                         std::move(sf.w),
                         fill(hs.p_per_degc, 2.5),
                         fill(hs.r_per_degc_h, 0.2),
                         fill(hs.s_degc, 2.0),
                         hs.beta,
                         std::nullopt,
                         std::move(sf.l_diag)};
    if (doc.contains("L_diag")) out.l_diag = scalar_or_vector(doc.at("L_diag"), "L_diag", n);
    out.heating = std::move(hs);
    return out;
}

ResolvedScenario from_standard(const json& doc) {
    const Vector a = json_vector(require(doc, "a_per_h"), "a_per_h");
    const auto n = static_cast<std::size_t>(a.size());
    const Matrix b = json_matrix(require(doc, "B"), "B");
    if (static_cast<std::size_t>(b.rows()) != n) throw ConfigError("B must be n x n");
    SectorPair pair = pair_from_json(doc.contains("pair") ? doc.at("pair") : json("saturation"), n);
    PlantModel plant(a, b, std::move(pair));
    DisturbanceSignal w = disturbance_from_json(doc, n);
    ResolvedScenario out{"standard",
                         std::nullopt,
                         std::move(plant),
                         std::move(w),
                         scalar_or_vector(require(doc, "p"), "p", n),
                         scalar_or_vector(require(doc, "r"), "r", n),
                         scalar_or_vector(require(doc, "s"), "s", n),
                         doc.contains("beta") ? json_number(doc.at("beta"), "beta") : 0.0,
                         std::nullopt,
                         a};
    if (doc.contains("K_static")) out.k_static = json_matrix(doc.at("K_static"), "K_static");
    if (doc.contains("L_diag")) out.l_diag = scalar_or_vector(doc.at("L_diag"), "L_diag", n);
    return out;
}

}  // namespace

Vector json_vector(const json& j, const std::string& field, std::optional<std::size_t> n) {
    if (!j.is_array()) throw ConfigError("field '" + field + "' must be an array of numbers");
    if (n && j.size() != *n) {
        throw ConfigError("field '" + field + "' must have " + std::to_string(*n) + " entries");
    }
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = json_number(j[i], field);
    return v;
}

Matrix json_matrix(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) throw ConfigError("field '" + field + "' must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        m.row(static_cast<Eigen::Index>(i)) = json_vector(j[i], field, cols).transpose();
    }
    if (rows != cols) throw ConfigError("field '" + field + "' must be square");
    return m;
}

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json matrix_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose()));
    return out;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
    }
}

json heating_scenario_to_json(const HeatingScenario& s) {
    json j;
    j["schema_version"] = kScenarioSchemaVersion;
    j["kind"] = "heating";
    j["n"] = s.n();
    j["a_kw_per_degC"] = vector_json(s.a_kw_per_degc);
    j["C_kwh_per_degC"] = vector_json(s.c_kwh_per_degc);
    j["B_heat_kw"] = matrix_json(s.b_heat_kw);
    j["x_c_degC"] = s.x_c_degc;
    j["T_ext_degC"] = {{"hours", s.t_ext.hours}, {"values", s.t_ext.deg_c}};
    if (s.p_per_degc.size() > 0) j["p_per_degC"] = vector_json(s.p_per_degc);
    if (s.r_per_degc_h.size() > 0) j["r_per_degC_h"] = vector_json(s.r_per_degc_h);
    if (s.s_degc.size() > 0) j["s_degC"] = vector_json(s.s_degc);
    j["beta"] = s.beta;
    return j;
}

HeatingScenario heating_scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
    try {
        if (doc.contains("schema_version") && doc.at("schema_version") != kScenarioSchemaVersion) {
            throw ConfigError("unsupported scenario schema_version");
        }
        const json& a = require(doc, "a_kw_per_degC");
        std::size_t n = 0;
        if (doc.contains("n")) {
            n = doc.at("n").get<std::size_t>();
        } else if (a.is_array()) {
            n = a.size();
        } else {
            throw ConfigError("field 'n' is required when a_kw_per_degC is a scalar");
        }
        if (n == 0) throw ConfigError("n must be at least 1");

        HeatingScenario s;
        s.a_kw_per_degc = scalar_or_vector(a, "a_kw_per_degC", n);
        s.c_kwh_per_degc = scalar_or_vector(require(doc, "C_kwh_per_degC"), "C_kwh_per_degC", n);
        const json& b = require(doc, "B_heat_kw");
        if (b.is_object()) {
            s.b_heat_kw = benchmark_coupling_matrix(n, json_number(require(b, "diagonal"), "diagonal"),
                                                    json_number(require(b, "coupling"), "coupling"));
        } else {
            s.b_heat_kw = json_matrix(b, "B_heat_kw");
            if (static_cast<std::size_t>(s.b_heat_kw.rows()) != n) throw ConfigError("B_heat_kw must be n x n");
        }
        s.x_c_degc = doc.contains("x_c_degC") ? json_number(doc.at("x_c_degC"), "x_c_degC") : 20.0;
        s.t_ext = temperature_from_json(require(doc, "T_ext_degC"), base_dir);
        if (doc.contains("p_per_degC")) s.p_per_degc = scalar_or_vector(doc.at("p_per_degC"), "p_per_degC", n);
        if (doc.contains("r_per_degC_h")) s.r_per_degc_h = scalar_or_vector(doc.at("r_per_degC_h"), "r_per_degC_h", n);
        if (doc.contains("s_degC")) s.s_degc = scalar_or_vector(doc.at("s_degC"), "s_degC", n);
        s.beta = doc.contains("beta") ? json_number(doc.at("beta"), "beta") : 0.0;
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("heating scenario: ") + e.what());
    }
}

ResolvedScenario resolve_scenario(const json& doc, const std::filesystem::path& base_dir) {
    if (doc.is_string()) {
        const auto path = resolve_path(doc.get<std::string>(), base_dir);
        return resolve_scenario(read_json_file(path), path.parent_path());
    }
    if (!doc.is_object()) throw ConfigError("scenario must be an object or a file path");
    try {
        if (doc.contains("builtin")) {
            if (doc.at("builtin") != "benchmark") throw ConfigError("unknown builtin scenario");
            json merged = heating_scenario_to_json(paper_benchmark_scenario());
            json patch = doc;
            patch.erase("builtin");
            patch.erase("L_diag");
            merged.merge_patch(patch);
            // A replaced building count invalidates the inlined matrices.
            if (patch.contains("n") && !patch.contains("B_heat_kw")) {
                merged["B_heat_kw"] = {{"diagonal", 12.0}, {"coupling", -0.15}};
            }
            if (patch.contains("n")) {
                for (const char* key : {"a_kw_per_degC", "C_kwh_per_degC", "p_per_degC", "r_per_degC_h", "s_degC"}) {
                    if (!patch.contains(key)) merged[key] = merged[key][0];
                }
            }
            return from_heating(heating_scenario_from_json(merged, base_dir), doc);
        }
        const std::string kind = doc.value("kind", std::string("heating"));
        if (kind == "heating") return from_heating(heating_scenario_from_json(doc, base_dir), doc);
        if (kind == "standard") return from_standard(doc);
        throw ConfigError("unknown scenario kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

ControllerSpec ResolvedScenario::controller(ControllerVariant variant) const {
    switch (variant) {
        case ControllerVariant::Decentralized:
            return ControllerSpec::decentralized(p, r, s);
        case ControllerVariant::Coordinating:
            return ControllerSpec::coordinating(p, r, s, beta);
        case ControllerVariant::Static:
            return k_static ? ControllerSpec::static_feedback(*k_static) : ControllerSpec::static_default(plant);
    }
    throw UnsupportedVariant("unknown controller variant");
}

std::optional<std::pair<double, double>> ResolvedScenario::disturbance_span() const {
    if (w.is_constant()) return std::nullopt;
    return std::make_pair(w.times().front(), w.times().back());
}

}  // namespace rsnet
