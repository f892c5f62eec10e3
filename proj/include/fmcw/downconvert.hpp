#pragma once

#include "fmcw/types.hpp"

namespace fmcw {

// Peak pick on the zero-padded power spectrum inside (win_lo, win_hi),
// exclusive bounds. Frequency is bin-quantized; phase is the bin's angle,
// which is the optimal start-referenced phase for that quantized frequency.
LeakageEstimate estimate_tone(const ArrayXd& samples, double rate, int nfft, double win_lo,
                              double win_hi);

// Same on a block's meaningful samples; negative bounds select the default
// window (oversampled_fs/4, oversampled_fs/2).
LeakageEstimate estimate_leakage_tone(const IfSampleBlock& block, const FrequencyPlan& plan,
                                      double win_lo = -1.0, double win_hi = -1.0);

// out[n] = cos(2*pi*if_beat_freq*n/oversampled_fs + const_phase).
ArrayXd generate_nco(const LeakageEstimate& estimate, Eigen::Index count,
                     const FrequencyPlan& plan);

// Estimate -> NCO -> mix -> zero-phase LPF -> decimate. Locks the dominant
// leakage to DC and shifts targets to their internal-delay-free beats.
BasebandBlock proposed_downconvert(const IfSampleBlock& block, const FrequencyPlan& plan,
                                   const FilterCoefficients& lpf, double win_lo = -1.0,
                                   double win_hi = -1.0);

// Same chain with a caller-supplied estimate (frozen-estimate mode).
BasebandBlock proposed_downconvert(const IfSampleBlock& block, const FrequencyPlan& plan,
                                   const FilterCoefficients& lpf, const LeakageEstimate& estimate);

// Baseline: ideal digital LO at the plan carrier, phase 0, unit amplitude.
BasebandBlock common_downconvert(const IfSampleBlock& block, const FrequencyPlan& plan,
                                 const FilterCoefficients& lpf);

}  // namespace fmcw
