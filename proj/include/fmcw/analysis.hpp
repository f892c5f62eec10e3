#pragma once

#include "fmcw/types.hpp"

namespace fmcw {

// Per-bin mean of one-sided |FFT|^2 across blocks, in dB, with the bin axis
// mapped to range.
RangeSpectrum averaged_power_spectrum(const std::vector<BasebandBlock>& blocks,
                                      const ChirpParams& chirp);

// Walks right from the dominant peak until the spectrum is within margin_db
// of the local floor (median of the `lookahead` bins ahead). Returns the
// boundary in meters.
double default_exclusion_zone(const RangeSpectrum& spec, double margin_db = 3.0,
                              int lookahead = 32);

// common minus proposed over [exclusion_zone_m, upper_limit_m], with an
// order-8 least-squares fit on range normalized to [-1, 1].
NoiseFloorReport noise_floor_difference(const RangeSpectrum& common,
                                        const RangeSpectrum& proposed, double exclusion_zone_m,
                                        double upper_limit_m = 1e300);

// Mirror-fold map of an uncompensated target range about r_max.
AliasPrediction predict_alias(double r_target, double r_internal, double r_max);

// Local maxima at least min_prominence_db above the surrounding median,
// sorted by power descending. Refined fields use 3-point parabolic
// interpolation in dB.
std::vector<Peak> detect_peaks(const RangeSpectrum& spec, double min_prominence_db = 10.0);

}  // namespace fmcw
