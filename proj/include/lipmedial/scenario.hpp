#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lipmedial/lift.hpp"

namespace lipmedial {

inline constexpr const char* kVersion = "0.1.0";

/// Malformed configuration; the message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ScenarioKind { MedialAxis, VerifyStructure, CheckLift, ScalarDemo, Counterexample };

/// A built-in function family for the lift scenarios; f maps R^1 x R^1 to R^1.
struct FunctionSpec {
    std::string family = "abs-linear";
    double a = 2.0;
    double b = 1.0;
};

struct LiftSettings {
    std::vector<double> x0{0.0};
    std::vector<double> y0{0.0};
    std::vector<Interval> u{{-1.0, 1.0}};
    std::vector<Interval> v{{-1.0, 1.0}};
    int resolution = 101;
    double clarke_radius = 0.1;
    double fd_step = 1e-6;
};

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::VerifyStructure;
    std::string name;
    std::uint64_t seed = 0;

    std::vector<std::vector<double>> sites;
    std::optional<std::vector<double>> x0;
    /// Ball radius around x0 (verify) or half-width of the cube (medial axis).
    /// Non-positive: library default.
    double radius = -1.0;
    std::optional<std::vector<Interval>> box;
    int resolution = 17;

    /// Absent: relative rule 1e-9 (1 + delta).
    std::optional<double> tie_tol;
    double site_tol = 1e-9;
    double cluster_eps = 1e-6;
    double solver_tol = 1e-10;

    int choice_samples = 256;
    int probe_samples = 256;
    int direction_candidates = 64;
    int clarke_samples = 200;
    int chart_samples = 100;

    FunctionSpec function;
    LiftSettings lift;

    std::filesystem::path out_dir = "out";
    std::string report_file = "report.json";
    std::string nodes_file = "nodes.csv";
};

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_from_string(const std::string& s);

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Throws ConfigError naming the first offending field.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

std::vector<std::string> preset_names();
/// Throws ConfigError for an unknown name.
ScenarioConfig preset(const std::string& name);

/// The family's f, and its closed-form solution g of f(x, g(x)) = z0 when known.
SplitFn make_function(const FunctionSpec& spec);
std::optional<std::function<double(double, double)>> closed_form_solution(const FunctionSpec& spec);

struct RunResult {
    nlohmann::json report;
    std::string nodes_csv;
    std::filesystem::path report_path;
    std::filesystem::path nodes_path;
};

/// Runs the scenario pipeline without touching the filesystem.
RunResult execute(const ScenarioConfig& cfg);

/// execute() followed by an atomic write of the report and node table.
/// Throws std::runtime_error when the output directory is unwritable.
RunResult run(const ScenarioConfig& cfg);

/// Writes via a temporary sibling and rename.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace lipmedial
