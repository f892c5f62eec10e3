#include "fmcw/downconvert.hpp"

#include "fmcw/dsp.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fmcw {

namespace {

ArrayXd meaningful_tail(const IfSampleBlock& block) {
    if (block.meaningful_count < 1 || block.meaningful_count > block.samples.size())
        throw std::invalid_argument("block meaningful_count out of range");
    return block.samples.tail(block.meaningful_count);
}

ArrayXd nco_at(double freq, double phase, Eigen::Index count, double rate) {
    const double w = 2.0 * std::numbers::pi * freq / rate;
    ArrayXd out(count);
    for (Eigen::Index i = 0; i < count; ++i) out[i] = std::cos(w * static_cast<double>(i) + phase);
    return out;
}

BasebandBlock finish(const IfSampleBlock& block, const FrequencyPlan& plan,
                     const FilterCoefficients& lpf, const ArrayXd& nco, const char* technique,
                     std::optional<LeakageEstimate> applied) {
    const ArrayXd xm = meaningful_tail(block);
    const ArrayXd mixed = mix(xm, nco);
    const ArrayXd filtered = zero_phase_filter(lpf, mixed);
    BasebandBlock out;
    out.samples = decimate(filtered, plan.n_factor);
    out.rate_hz = plan.base_fs;
    out.chirp_index = block.chirp_index;
    out.technique = technique;
    out.applied_estimate = std::move(applied);
    return out;
}

}  // namespace

LeakageEstimate estimate_tone(const ArrayXd& samples, double rate, int nfft, double win_lo,
                              double win_hi) {
    if (!(win_lo >= 0.0) || !(win_hi > win_lo) || !(win_hi <= rate / 2.0))
        throw std::invalid_argument("estimation window must satisfy 0 <= lo < hi <= rate/2");
    const Spectrum spec = fft_power_phase(samples, nfft, rate);

    const auto k_lo = static_cast<Eigen::Index>(std::floor(win_lo / spec.bin_spacing)) + 1;
    auto k_hi = static_cast<Eigen::Index>(std::ceil(win_hi / spec.bin_spacing)) - 1;
    k_hi = std::min<Eigen::Index>(k_hi, nfft / 2);
    if (k_hi < k_lo)
        throw std::invalid_argument("estimation window contains no spectrum bins");

    Eigen::Index best = k_lo;
    double best_p = -1.0;
    ArrayXd win_db(k_hi - k_lo + 1);
    for (Eigen::Index k = k_lo; k <= k_hi; ++k) {
        const double p = std::norm(spec.bins[k]);
        win_db[k - k_lo] = power_to_db(p);
        if (p > best_p) {
            best_p = p;
            best = k;
        }
    }
    if (power_to_db(best_p) < median(win_db) + 10.0)
        throw std::runtime_error(
            "no dominant tone: window peak is less than 10 dB above the window median");

    LeakageEstimate est;
    est.bin_index = static_cast<int>(best);
    est.if_beat_freq = static_cast<double>(best) * spec.bin_spacing;
    est.const_phase = std::arg(spec.bins[best]);
    if (est.const_phase <= -std::numbers::pi) est.const_phase += 2.0 * std::numbers::pi;
    return est;
}

LeakageEstimate estimate_leakage_tone(const IfSampleBlock& block, const FrequencyPlan& plan,
                                      double win_lo, double win_hi) {
    if (plan.nfft < block.meaningful_count)
        throw std::invalid_argument("plan nfft shorter than the meaningful sample count");
    if (win_lo < 0.0) win_lo = plan.oversampled_fs / 4.0;
    if (win_hi < 0.0) win_hi = plan.oversampled_fs / 2.0;
    return estimate_tone(meaningful_tail(block), plan.oversampled_fs, plan.nfft, win_lo, win_hi);
}

ArrayXd generate_nco(const LeakageEstimate& estimate, Eigen::Index count,
                     const FrequencyPlan& plan) {
    if (count <= 0) throw std::invalid_argument("generate_nco: count must be positive");
    return nco_at(estimate.if_beat_freq, estimate.const_phase, count, plan.oversampled_fs);
}

BasebandBlock proposed_downconvert(const IfSampleBlock& block, const FrequencyPlan& plan,
                                   const FilterCoefficients& lpf, double win_lo, double win_hi) {
    const LeakageEstimate est = estimate_leakage_tone(block, plan, win_lo, win_hi);
    return proposed_downconvert(block, plan, lpf, est);
}

BasebandBlock proposed_downconvert(const IfSampleBlock& block, const FrequencyPlan& plan,
                                   const FilterCoefficients& lpf,
                                   const LeakageEstimate& estimate) {
    const ArrayXd nco = generate_nco(estimate, block.meaningful_count, plan);
    return finish(block, plan, lpf, nco, "proposed", estimate);
}

BasebandBlock common_downconvert(const IfSampleBlock& block, const FrequencyPlan& plan,
                                 const FilterCoefficients& lpf) {
    const ArrayXd nco = nco_at(plan.if_carrier, 0.0, block.meaningful_count, plan.oversampled_fs);
    return finish(block, plan, lpf, nco, "common", std::nullopt);
}

}  // namespace fmcw
