#pragma once

#include "fmcw/types.hpp"

namespace fmcw {

// Anchors below -1e299 dBc/Hz mean "no phase noise".
bool noise_enabled(const PhaseNoiseModel& model);

// One-sided phase PSD in rad^2/Hz at offset f.
double noise_psd(const PhaseNoiseModel& model, double f);

// Model rms phase over the band [f_lo, f_hi], closed-form integral.
double noise_phi_rms(const PhaseNoiseModel& model, double f_lo, double f_hi);

// Checks scene invariants; throws on violation, appends soft issues to
// `warnings` when given.
void validate_scene(const RadarScene& scene, std::vector<std::string>* warnings = nullptr);

const ScatteringPath& dominant_leakage(const RadarScene& scene);

// Stationary zero-mean sequence with the model PSD, deterministic per seed.
ArrayXd synthesize_phase_noise(const PhaseNoiseModel& model, Eigen::Index count, double rate);

// out[i] = noise[i + ceil(tau*rate)] - noise(t - tau), fractional delays via
// linear interpolation. The leading samples without history are dropped.
ArrayXd delayed_difference(const ArrayXd& noise, double rate, double tau);

// The master oscillator phase stream a given chirp draws from; every path's
// phase term is a delayed difference of this one sequence.
ArrayXd chirp_noise_stream(const RadarScene& scene, const FrequencyPlan& plan, int chirp_index,
                           Eigen::Index count);

// Sums per-path deramped tones plus correlated phase noise and thermal noise
// at the oversampled rate.
IfSampleBlock synthesize_if_block(const RadarScene& scene, const FrequencyPlan& plan,
                                  int chirp_index);

}  // namespace fmcw
