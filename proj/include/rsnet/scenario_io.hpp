#pragma once

#include "rsnet/heating.hpp"
#include "rsnet/matrixlab.hpp"
#include "rsnet/model.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace rsnet {

inline constexpr int kScenarioSchemaVersion = 1;

/// A scenario reduced to standard form, with the controller gains it carries.
struct ResolvedScenario {
    std::string kind;  // "heating" or "standard"
    std::optional<HeatingScenario> heating;
    PlantModel plant;
    DisturbanceSignal w;
    Vector p;
    Vector r;
    Vector s;
    double beta = 0.0;
    std::optional<Matrix> k_static;
    Vector l_diag;

    ControllerSpec controller(ControllerVariant variant) const;
    /// Time span covered by the disturbance samples, if it is a series.
    std::optional<std::pair<double, double>> disturbance_span() const;
};

nlohmann::json heating_scenario_to_json(const HeatingScenario& s);

/// Heating document fields (units in the names):
///   a_kw_per_degC, C_kwh_per_degC (scalar or per building), n,
///   B_heat_kw (matrix, or {"diagonal": d, "coupling": c} for B_ij = c min(i, j)),
///   x_c_degC, T_ext_degC ({"hours": [...], "values": [...]}, {"csv": path, ...},
///   {"synthetic": "cold_snap"} or a constant), p_per_degC, r_per_degC_h,
///   s_degC, beta.
/// Structural problems raise ConfigError; domain problems (e.g. NotMMatrix)
/// propagate unchanged.
HeatingScenario heating_scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Accepts {"builtin": "benchmark", ...overrides}, a heating document or a
/// standard-form document ("kind": "standard", a_per_h, B, pair, w or
/// w_series, p, r, s, beta, K_static, L_diag). A string is read as a path to
/// such a document.
ResolvedScenario resolve_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Reads a JSON file; ConfigError on I/O or syntax problems.
nlohmann::json read_json_file(const std::filesystem::path& path);

/// Helpers shared with the run configuration parser (ConfigError on failure).
Vector json_vector(const nlohmann::json& j, const std::string& field, std::optional<std::size_t> n = std::nullopt);
Matrix json_matrix(const nlohmann::json& j, const std::string& field);
nlohmann::json vector_json(const Vector& v);
nlohmann::json matrix_json(const Matrix& m);

}  // namespace rsnet
