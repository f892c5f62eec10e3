#pragma once

#include "fmcw/types.hpp"

namespace fmcw {

// Smallest 5-smooth length >= n, cheap for the bundled FFT.
int next_fast_len(int n);

ArrayXcd forward_fft(const ArrayXcd& x);
ArrayXcd inverse_fft(const ArrayXcd& x);

// Zero-pads to nfft and returns the full complex spectrum. Unnormalized
// forward transform, so Parseval reads sum|x|^2 = mean|X|^2.
Spectrum fft_power_phase(const ArrayXd& samples, int nfft, double rate = 1.0);

// Minimum (fractional) order meeting the spec after bilinear prewarping.
double butterworth_min_order(const FilterSpec& spec);

// Cascaded-biquad lowpass, exact attenuation at the passband edge. Throws if
// spec.order cannot meet both edges.
FilterCoefficients design_butterworth_lowpass(const FilterSpec& spec);

// Single-pass magnitude response in dB at frequency f.
double filter_response_db(const FilterCoefficients& coeffs, double f, double rate);

// One forward pass through the section cascade (direct form II transposed).
ArrayXd sos_filter(const FilterCoefficients& coeffs, const ArrayXd& x);

// Edge padding used by zero_phase_filter: 3x the impulse-response length at
// which the slowest pole has decayed to 1e-6.
Eigen::Index zero_phase_pad_length(const FilterCoefficients& coeffs);

// Forward-backward filtering with linear-predictive edge padding. Output
// length equals input length; magnitude response is the single pass squared.
ArrayXd zero_phase_filter(const FilterCoefficients& coeffs, const ArrayXd& samples);

ArrayXd mix(const ArrayXd& a, const ArrayXd& b);

ArrayXd decimate(const ArrayXd& samples, int n_factor);

// Least-squares polynomial fit, coefficients in ascending powers.
Eigen::VectorXd polyfit(const ArrayXd& x, const ArrayXd& y, int degree);
ArrayXd polyval(const Eigen::VectorXd& coeffs, const ArrayXd& x);

double power_to_db(double p);
double median(ArrayXd v);

}  // namespace fmcw
