#include "fmcw/analysis.hpp"

#include "fmcw/dsp.hpp"
#include "fmcw/planning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fmcw {

RangeSpectrum averaged_power_spectrum(const std::vector<BasebandBlock>& blocks,
                                      const ChirpParams& chirp) {
    if (blocks.empty()) throw std::invalid_argument("averaged_power_spectrum: no blocks");
    const Eigen::Index len = blocks.front().samples.size();
    const double rate = blocks.front().rate_hz;
    const std::string& technique = blocks.front().technique;
    for (const auto& b : blocks) {
        if (b.samples.size() != len || b.technique != technique || b.rate_hz != rate)
            throw std::invalid_argument(
                "averaged_power_spectrum: blocks differ in technique, rate, or length");
    }
    const Eigen::Index half = len / 2;
    ArrayXd acc = ArrayXd::Zero(half);
    const double norm = 1.0 / (static_cast<double>(len) * static_cast<double>(len));
    for (const auto& b : blocks) {
        const Spectrum s = fft_power_phase(b.samples, static_cast<int>(len), rate);
        for (Eigen::Index k = 0; k < half; ++k) {
            const double scale = k == 0 ? norm : 2.0 * norm;
            acc[k] += std::norm(s.bins[k]) * scale;
        }
    }
    acc /= static_cast<double>(blocks.size());

    RangeSpectrum out;
    out.power_db = acc.unaryExpr([](double p) { return power_to_db(p); });
    out.range_axis.resize(half);
    for (Eigen::Index k = 0; k < half; ++k)
        out.range_axis[k] = range_of_beat(static_cast<double>(k) * rate / len, chirp);
    out.technique = technique;
    out.chirps_averaged = static_cast<int>(blocks.size());
    return out;
}

double default_exclusion_zone(const RangeSpectrum& spec, double margin_db, int lookahead) {
    const Eigen::Index n = spec.power_db.size();
    if (n < 3) throw std::invalid_argument("spectrum too short");
    Eigen::Index peak = 0;
    spec.power_db.maxCoeff(&peak);
    for (Eigen::Index k = peak; k < n; ++k) {
        const Eigen::Index lo = std::min(k + 1, n - 1);
        const Eigen::Index hi = std::min<Eigen::Index>(k + 1 + lookahead, n);
        if (hi <= lo) return spec.range_axis[k];
        const double floor_db = median(spec.power_db.segment(lo, hi - lo));
        if (spec.power_db[k] <= floor_db + margin_db) return spec.range_axis[k];
    }
    return spec.range_axis[n - 1];
}

NoiseFloorReport noise_floor_difference(const RangeSpectrum& common,
                                        const RangeSpectrum& proposed, double exclusion_zone_m,
                                        double upper_limit_m) {
    const Eigen::Index n = common.power_db.size();
    if (proposed.power_db.size() != n || proposed.range_axis.size() != n ||
        common.range_axis.size() != n)
        throw std::invalid_argument("noise_floor_difference: spectrum sizes differ");
    if (((common.range_axis - proposed.range_axis).abs() > 1e-6).any())
        throw std::invalid_argument("noise_floor_difference: range axes differ");

    Eigen::Index first = n, last = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (common.range_axis[k] >= exclusion_zone_m && common.range_axis[k] <= upper_limit_m) {
            first = std::min(first, k);
            last = k;
        }
    }
    const Eigen::Index count = last - first + 1;
    if (last < first || count < 9)
        throw std::invalid_argument("noise_floor_difference: support shorter than 9 points");

    NoiseFloorReport rep;
    rep.exclusion_zone = exclusion_zone_m;
    rep.diff_db = common.power_db.segment(first, count) - proposed.power_db.segment(first, count);
    rep.support_range_m = common.range_axis.segment(first, count);

    const double a0 = rep.support_range_m[0];
    const double a1 = rep.support_range_m[count - 1];
    const ArrayXd xn = 2.0 * (rep.support_range_m - a0) / (a1 - a0) - 1.0;
    rep.fit_coeffs = polyfit(xn, rep.diff_db, 8);
    const ArrayXd fitted = polyval(rep.fit_coeffs, xn);
    rep.max_improvement_db = fitted.maxCoeff();
    rep.min_improvement_db = fitted.minCoeff();
    rep.fit_near_db = fitted[0];
    rep.fit_far_db = fitted[count - 1];
    return rep;
}

AliasPrediction predict_alias(double r_target, double r_internal, double r_max) {
    if (r_target < 0.0 || r_internal < 0.0 || !(r_max > 0.0))
        throw std::invalid_argument("predict_alias: ranges must be non-negative, r_max positive");
    AliasPrediction out;
    out.apparent = r_target + r_internal;
    if (out.apparent > 2.0 * r_max)
        throw std::runtime_error("predict_alias: apparent range beyond a single fold");
    out.aliased = out.apparent > r_max;
    out.observed = out.aliased ? 2.0 * r_max - out.apparent : out.apparent;
    out.usable_max = r_max - r_internal;
    return out;
}

std::vector<Peak> detect_peaks(const RangeSpectrum& spec, double min_prominence_db) {
    if (!(min_prominence_db > 0.0))
        throw std::invalid_argument("detect_peaks: prominence must be positive");
    const Eigen::Index n = spec.power_db.size();
    std::vector<Peak> peaks;
    constexpr Eigen::Index kHalfWindow = 16;
    for (Eigen::Index k = 0; k < n; ++k) {
        const bool left_ok = k > 0 && spec.power_db[k] > spec.power_db[k - 1];
        const bool right_ok = k + 1 < n && spec.power_db[k] > spec.power_db[k + 1];
        const bool is_max = (k == 0 && right_ok) || (k + 1 == n && left_ok) ||
                            (k > 0 && k + 1 < n && left_ok && spec.power_db[k] >= spec.power_db[k + 1]);
        if (!is_max) continue;
        const Eigen::Index lo = std::max<Eigen::Index>(0, k - kHalfWindow);
        const Eigen::Index hi = std::min(n, k + kHalfWindow + 1);
        const double local = median(spec.power_db.segment(lo, hi - lo));
        if (spec.power_db[k] < local + min_prominence_db) continue;

        Peak p;
        p.range_m = spec.range_axis[k];
        p.power_db = spec.power_db[k];
        p.refined_range_m = p.range_m;
        p.refined_power_db = p.power_db;
        if (k > 0 && k + 1 < n) {
            const double ym = spec.power_db[k - 1];
            const double y0 = spec.power_db[k];
            const double yp = spec.power_db[k + 1];
            const double denom = ym - 2.0 * y0 + yp;
            if (denom < -1e-12) {
                const double delta = 0.5 * (ym - yp) / denom;
                p.refined_power_db = y0 - 0.25 * (ym - yp) * delta;
                const double bin = spec.range_axis[1] - spec.range_axis[0];
                p.refined_range_m = p.range_m + delta * bin;
            }
        }
        peaks.push_back(p);
    }
    std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        return a.power_db > b.power_db;
    });
    return peaks;
}

}  // namespace fmcw
