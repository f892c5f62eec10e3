#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace fmcw {

using Eigen::ArrayXcd;
using Eigen::ArrayXd;

// Linear chirp pair driving the deramp. Beat tones land at
// (f_tx - f_rx) + sweep_slope * delay.
struct ChirpParams {
    double f_tx = 0.0;          // Hz, TX sweep start
    double f_rx = 0.0;          // Hz, RX-side reference sweep start
    double bandwidth = 0.0;     // Hz, swept bandwidth
    double sweep_period = 0.0;  // s
    double amplitude = 1.0;
    double const_phase = 0.0;   // rad
};

enum class PathKind { leakage, target };

// One propagation path folded to a scalar amplitude. delay is the total
// round-trip delay at the RF port (for targets that includes the internal
// leakage delay).
struct ScatteringPath {
    double delay = 0.0;       // s
    double amplitude = 0.0;
    double const_phase = 0.0; // rad
    PathKind kind = PathKind::target;
};

// Power-law oscillator phase noise: one-sided PSD in dB(rad^2/Hz), anchored
// at anchor_offset, rolling off at `slope` dB/decade, flat beyond `cutoff`.
struct PhaseNoiseModel {
    double psd_anchor_dbc_hz = -1e300; // -inf disables the noise
    double anchor_offset = 1e4;        // Hz
    double slope = -20.0;              // dB/decade
    double cutoff = 1e6;               // Hz
    std::uint64_t seed = 0;
};

struct RadarScene {
    ChirpParams chirp;
    std::vector<ScatteringPath> paths;
    PhaseNoiseModel noise;
    double thermal_noise_dbfs = -1e300; // dB relative to leakage tone amplitude
};

// One chirp of real IF samples at the oversampled rate. The first
// samples.size() - meaningful_count samples are settling transient and are
// skipped by estimation and down-conversion.
struct IfSampleBlock {
    ArrayXd samples;
    int chirp_index = 0;
    Eigen::Index meaningful_count = 0;
};

struct FrequencyPlan {
    double base_fs = 0.0;        // Hz, post-decimation rate
    int n_factor = 0;            // oversampling/decimation factor N
    int band_index = 0;          // undersampling band M
    double oversampled_fs = 0.0; // Hz, N * base_fs
    double if_carrier = 0.0;     // Hz, folded into [0, oversampled_fs/2)
    int nfft = 0;                // zero-padded FFT length for estimation
};

struct Spectrum {
    ArrayXcd bins;
    double bin_spacing = 0.0; // Hz
    double rate = 0.0;        // Hz
};

struct FilterSpec {
    int order = 0;
    double passband_edge = 0.0;    // Hz
    double stopband_edge = 0.0;    // Hz
    double passband_atten_db = 0.0;
    double stopband_atten_db = 0.0;
    double rate = 0.0;             // Hz
};

// Cascaded biquads, b/a rows normalized to a0 = 1.
struct FilterCoefficients {
    Eigen::Matrix<double, Eigen::Dynamic, 6> sections; // b0 b1 b2 a0 a1 a2
    double dc_gain = 1.0;
    double max_pole_radius = 0.0;
};

struct LeakageEstimate {
    int bin_index = 0;          // argmax bin on the zero-padded spectrum
    double if_beat_freq = 0.0;  // Hz, rate * bin_index / nfft
    double const_phase = 0.0;   // rad, in (-pi, pi]
};

struct BasebandBlock {
    ArrayXd samples;
    double rate_hz = 0.0;
    int chirp_index = 0;
    std::string technique; // "common" or "proposed"
    std::optional<LeakageEstimate> applied_estimate;
};

struct RangeSpectrum {
    ArrayXd power_db;
    ArrayXd range_axis; // m
    std::string technique;
    int chirps_averaged = 0;
};

struct NoiseFloorReport {
    ArrayXd diff_db;            // common - proposed over the support
    ArrayXd support_range_m;    // range axis of the support bins
    Eigen::Matrix<double, 9, 1> fit_coeffs; // ascending powers, x in [-1,1]
    double exclusion_zone = 0.0; // m
    double max_improvement_db = 0.0; // of the fitted curve
    double min_improvement_db = 0.0;
    double fit_near_db = 0.0;   // fitted value at the support start
    double fit_far_db = 0.0;    // fitted value at the support end
};

struct AliasPrediction {
    double apparent = 0.0;   // m
    double observed = 0.0;   // m
    bool aliased = false;
    double usable_max = 0.0; // m
};

struct Peak {
    double range_m = 0.0;
    double power_db = 0.0;
    double refined_range_m = 0.0; // parabolic interpolation around the bin
    double refined_power_db = 0.0;
};

struct PathCheck {
    PathKind kind = PathKind::target;
    double delay = 0.0;          // s
    double beat_freq = 0.0;      // Hz above the carrier
    double tone_freq = 0.0;      // Hz at the oversampled rate
    double sum_term_raw = 0.0;   // Hz, tone + worst-case mixer tone, unfolded
    double sum_term_folded = 0.0;
    bool sum_ok = false;
    double diff_term = 0.0;      // Hz after mixing with the plan carrier
    bool diff_ok = false;
};

struct ValidationReport {
    bool pass = false;
    double scene_carrier = 0.0; // Hz, f_tx - f_rx
    double plan_carrier = 0.0;  // Hz
    bool carrier_ok = false;
    bool collision_ok = false;  // leakage beat clear of the desired-band limit
    double collision_limit = 0.0; // Hz, oversampled_fs/4 - passband edge
    std::vector<PathCheck> paths;
    std::vector<std::string> failures;
    std::vector<std::string> warnings;
    std::string fold_rule;
};

}  // namespace fmcw
