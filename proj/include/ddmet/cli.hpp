#pragma once

// Experiment runner behind the `ddmet` executable: a flat `key = value`
// configuration, named scenarios, CSV curves and a JSON run manifest.
//
// Units: reservoir parameters are given in physical units. Times in the
// configuration (grid, schedule.period) and the `t` column are measured in
// `time_unit`, which defaults to 1/lambda. Every emitted quantity is expressed
// in the same unit system: QFI with respect to omega0 * time_unit and decay
// rates in units of 1/time_unit, so the noiseless curve is exactly t^2.

#include "ddmet/jcmodel.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ddmet::cli {

inline constexpr std::string_view kVersion = "0.1.0";
inline constexpr std::string_view kManifestSchema = "manifest_v1";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

enum class Scenario { Fig1, Fig2, Fig3, TheoremDemo, OracleConvergence, Custom };

std::string_view to_string(Scenario s) noexcept;
std::string_view to_string(jc::QfiMode m) noexcept;

struct OracleSettings {
    /// Finest Volterra step in physical time; the study also uses 2 dt and 4 dt.
    double dt = 1e-3;
    std::vector<std::size_t> modes{100, 200, 400};
    /// Half-width of the sampled bath window in units of lambda.
    double window = 80.0;
};

struct TheoremSettings {
    std::size_t samples = 64;
    double tolerance = 1e-8;
    /// Length of the discretized control sequence.
    std::size_t controls = 4;
};

struct RunConfig {
    Scenario scenario = Scenario::Fig1;
    jc::ReservoirParams reservoir{};
    /// Pulse period in time units; sigma_z kicks of angle pi/2.
    std::optional<double> schedule_period;
    double t_min = 0.0;
    double t_max = 10.0;
    std::size_t n_points = 500;
    jc::QfiMode qfi_mode = jc::QfiMode::Full;
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    /// Physical time per configuration time unit; unset means 1/lambda.
    std::optional<double> time_unit;
    /// Finite-difference step in omega0 (physical units); unset uses the library default.
    std::optional<double> fd_step;
    OracleSettings oracle{};
    TheoremSettings theorem{};

    double time_scale() const { return time_unit ? *time_unit : 1.0 / reservoir.lambda; }
};

/// A configuration problem pinned to a line (0 when not tied to one) and a field path.
struct Diagnostic {
    std::size_t line = 0;
    std::string field;
    std::string message;
};

std::string format(const Diagnostic& d, std::string_view source);

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<Diagnostic> diagnostics);
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<Diagnostic> diagnostics_;
};

/// Parses and validates. Grammar: one `key = value` per line, `#` starts a
/// comment, blank lines ignored, keys unique. Throws ConfigError listing every problem.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in documentation order.
std::vector<std::pair<std::string, std::string>> resolved_entries(const RunConfig& config);

/// Shortest round-trip decimal; NaN prints as "nan".
std::string format_number(double x);

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

struct OutputFile {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string status = "ok";  // "ok" or "failed"
    std::string error;
    double wall_time_seconds = 0.0;
    std::vector<OutputFile> outputs;
};

struct RunOptions {
    unsigned threads = 1;
};

/// Executes the scenario, writes its artifacts and manifest.json into
/// config.output_dir (created if needed). Numerical failures are reported
/// through status = "failed"; the manifest is written either way.
RunManifest run(const RunConfig& config, const RunOptions& options = {});

} // namespace ddmet::cli
