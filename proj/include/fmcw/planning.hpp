#pragma once

#include "fmcw/types.hpp"

namespace fmcw {

inline constexpr double kSpeedOfLight = 299792458.0;

double sweep_slope(const ChirpParams& chirp);  // Hz/s
double scene_carrier(const ChirpParams& chirp);

// Aliases f into [0, fs/2] for a real signal sampled at fs.
double fold_frequency(double f, double fs);

// Places the IF carrier at the quarter point of the oversampled band
// (undersampling bands fold back onto the same quarter point).
FrequencyPlan make_plan(double base_fs, int n_factor, int band_index, int nfft,
                        std::vector<std::string>* warnings = nullptr);

double range_of_beat(double f_beat, const ChirpParams& chirp);
double beat_of_range(double r, const ChirpParams& chirp);

// Predicts every path's beat tone and post-mixing sum-term, then checks that
// sum-terms land in the LPF stopband and desired difference-terms stay out of
// the transition band.
ValidationReport validate_plan(const FrequencyPlan& plan, const RadarScene& scene,
                               const FilterSpec& lpf);

}  // namespace fmcw
