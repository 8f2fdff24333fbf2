#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lmce/grid.hpp"
#include "lmce/io.hpp"

namespace lmce {

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitNonConvergence = 2, kExitInvalidInput = 3 };

/// Every check name accepted in the `checks` key, in report order.
const std::vector<std::string>& known_checks();

/// Batch configuration. Text files hold `key = value` lines ('#' comments);
/// JSON files hold one object with the same keys. Lists are comma separated
/// in text form and arrays in JSON.
struct RunConfig {
    double half_width = 4.0;  ///< key L
    int n = 257;
    std::string family = "quadratic";  ///< quadratic | anisotropic | perturbed | field
    double a = 1.0;
    double theta1 = 1.0471975511965976;  ///< pi/3
    double theta2 = 0.5235987755982988;  ///< pi/6
    double epsilon = 0.1;
    std::string field_file;
    std::string source = "manufactured";  ///< manufactured | solve
    double delta = 0.3;
    double c = 0.5;
    std::optional<double> A;  ///< empty: fit
    double jacobi_budget_factor = 10.0;
    double hessian_budget = 5.0;
    double R = 4.0;
    std::string regime = "auto";  ///< auto | case1 | case2
    double cutoff_r1 = 2.0;
    double cutoff_r2 = 3.0;
    std::vector<std::string> checks = known_checks();
    int trials = 200;
    std::uint64_t seed = 0;
    std::string out = "lmce_out";
    std::string input;  ///< directory merged by `report`
    std::string sweep_param = "a";  ///< a | epsilon | A | n
    std::vector<double> sweep_values = {1.0, 2.0, 4.0, 8.0};
    double newton_tol = 1e-10;
    int max_newton = 50;
    double linear_tol = 1e-12;
    bool heatmaps = false;

    /// Throws std::invalid_argument when a field is out of range or a check is unknown.
    void validate() const;
};

/// Throws std::invalid_argument on unknown keys or unparsable values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// (key, value) pairs that parse back to the same configuration.
std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg);

struct CheckEntry {
    std::string name;
    std::string kind;             ///< identity | inequality | solver
    std::string tolerance_class;  ///< algebraic | differencing | slack
    bool pass = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double tolerance = 0.0;
    int excluded = 0;
    std::vector<std::pair<std::string, double>> values;
    std::string note;
};

struct SolveSummary {
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;
    double certified_residual = 0.0;
    double error_vs_exact = 0.0;
};

struct RunReport {
    std::string command;
    RunConfig config;
    std::vector<CheckEntry> checks;
    std::optional<SolveSummary> solve;
    /// CSV tables keyed by file name.
    std::map<std::string, CsvTable> tables;
    /// Fields written as field CSV and, when enabled, as heatmaps.
    std::vector<std::pair<std::string, ScalarField2>> fields;
    std::vector<std::pair<std::string, double>> timings;
    int exit_code = kExitOk;
};

RunReport cmd_solve(const RunConfig& cfg);
RunReport cmd_verify(const RunConfig& cfg);
RunReport cmd_sweep(const RunConfig& cfg);
/// Merges every CSV below `input_dir` (except consolidated.csv) into one
/// table with a leading `source` column and the union of all columns.
CsvTable cmd_report(const std::filesystem::path& input_dir);

/// Writes checks.csv, the report's tables, field files, optional heatmaps and
/// summary.json into `dir`.
void write_run_outputs(const RunReport& report, const std::filesystem::path& dir);

}  // namespace lmce
