#pragma once

#include "fmcw/types.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>

namespace fmcw {

struct PlanInputs {
    double base_fs = 0.0;
    int n_factor = 0;
    int band_index = 0;
    int nfft = 0;
};

struct ScenarioConfig {
    RadarScene scene;
    PlanInputs plan;
    FilterSpec filter;  // rate is derived from the plan at run time
    std::string attenuation_convention = "single_pass";
    int n_chirps = 1;
    std::vector<std::string> techniques{"common", "proposed"};
    std::uint64_t seed = 0;
    std::string output_dir = "out";
    bool freeze_estimate = false;
    std::optional<std::pair<double, double>> estimation_window_hz;
    std::optional<double> exclusion_zone_m;
};

// Carries every field-level problem found, not just the first.
struct ConfigError : std::runtime_error {
    explicit ConfigError(std::vector<std::string> errs);
    std::vector<std::string> errors;
};

ScenarioConfig parse_config(const std::string& text);

// Built-in scenario presets: "experiment_a" (long-range, leakage-only noise
// study) and "experiment_b" (short-range target with internal-delay fold).
std::string preset_json(const std::string& name);
ScenarioConfig preset_config(const std::string& name);

struct RunResult {
    FrequencyPlan plan;
    ValidationReport validation;
    std::vector<std::string> warnings;
    double phi_rms = 0.0;
    double r_max = 0.0;       // m
    double r_internal = 0.0;  // m
    std::map<std::string, RangeSpectrum> spectra;
    std::map<std::string, std::vector<Peak>> peaks;
    std::vector<LeakageEstimate> estimates;  // per chirp, when "proposed" ran
    std::optional<NoiseFloorReport> noise_floor;
    std::vector<AliasPrediction> alias_predictions;  // per target path
    nlohmann::ordered_json summary;
    std::vector<std::string> files_written;
};

// Runs every chirp through the requested techniques and, when output_dir is
// non-empty, writes spectrum_<technique>.csv plus summary.json there.
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace fmcw
