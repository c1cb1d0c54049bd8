#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bclab/space_io.hpp"

namespace bclab {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kSchemaVersion = "v1";

struct Settings {
    double delta = 0.1;
    int k = 0;  // 0: the declared dimension
    std::size_t trials = 20000;
    std::size_t pairs = 1000;
    std::size_t targets = 1000;
    std::size_t samples = 4000;
    double eps = 0.3;
    std::vector<double> radii;
    std::vector<double> scales;
    std::optional<Point> point;
};

struct ExperimentConfig {
    Json space;
    std::string suite = "all";
    std::uint64_t seed = 1;
    std::string out;
    Json params;  // declared-constant overrides
    Settings settings;

    // Normalized form echoed in reports; excludes the output path.
    Json echo() const;
};

const std::vector<std::string>& suite_names();

// INI-style text ([run], [space], [space.factor1], [params], [settings])
// or JSON.  Throws InputError with a line or field diagnostic.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Re-validates a normalized echo, as carried by witnesses.
ExperimentConfig config_from_echo(const Json& echo);

struct CurveFile {
    std::string name;
    std::string csv;
};

struct RunOutput {
    Json report;
    std::vector<CurveFile> curves;
    int exit_code = 0;
};

// Applies the BCLAB_TRIALS override, runs the suite and assembles the report.
RunOutput run_experiment(const ExperimentConfig& config);

// Copy of a report without wall-clock fields.
Json strip_timing(const Json& report);

// Writes through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& content);

struct ReplayOutcome {
    std::string check;
    double residual = 0.0;
    std::optional<double> recorded;
    bool version_mismatch = false;
};

// Accepts a single witness object or a whole report.
std::vector<ReplayOutcome> replay(const Json& doc);

}  // namespace bclab
