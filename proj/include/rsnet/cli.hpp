#pragma once

#include "rsnet/model.hpp"
#include "rsnet/scenario_io.hpp"
#include "rsnet/simulate.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rsnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitWarning = 2;
inline constexpr int kExitUsage = 64;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kConfigSchemaVersion = 1;

struct CertifyOptions {
    int restarts = 50;
    int contraction_trials = 1000;
    int monitor_runs = 3;
    std::optional<double> monitor_time_h;  // default 50 / min(a)
    double monitor_init_radius = 100.0;
    std::optional<double> w_time_h;        // default: start of the time span
};

struct RunConfig {
    nlohmann::json scenario;
    std::filesystem::path base_dir;
    std::vector<ControllerVariant> controllers{ControllerVariant::Decentralized};
    double tolerance = 1e-10;
    double certificate_tolerance = 1e-7;
    long max_iterations = 1'000'000;
    std::optional<TimeSpan> t_span;  // default: disturbance samples, else [0, 50 / min(a)]
    double dt_h = 0.01;
    std::size_t csv_stride = 1;
    std::filesystem::path out_dir = "rsnet_out";
    std::uint64_t seed = 1;
    // Empty: derive from the plant when the pair is saturation.
    std::optional<Vector> gamma;
    std::optional<Vector> l_diag;
    std::optional<double> epsilon;
    std::optional<Vector> x_init;
    std::optional<Vector> z_init;
    CertifyOptions certify;
};

/// ConfigError on unknown keys, wrong types or invalid values. Relative
/// paths (scenario, out_dir) resolve against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

struct CommandResult {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::string text;
};

/// Each command writes its files into config.out_dir and returns the report
/// it wrote. Scenario errors propagate (ConfigError, NotMMatrix, ...).
CommandResult cmd_certify(const RunConfig& config);
CommandResult cmd_simulate(const RunConfig& config);
CommandResult cmd_compare(const RunConfig& config);
CommandResult cmd_equilibrium(const RunConfig& config);
CommandResult cmd_lp(const RunConfig& config);

TimeSpan default_time_span(const RunConfig& config, const ResolvedScenario& scenario);

/// Parses one compare table (header controller,J1,Jinf,J2).
struct CostRow {
    std::string controller;
    double j1 = 0.0;
    double jinf = 0.0;
    double j2 = 0.0;
};
std::vector<CostRow> read_cost_table(std::istream& in);

/// Entry point: rsnet <certify|simulate|compare|equilibrium|lp> --config <path>
/// [--out dir] [--seed n] [--dt h] [--controller name ...].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rsnet::cli
