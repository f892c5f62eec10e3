#include "fmcw/dsp.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fmcw {

namespace {

Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine;
    return engine;
}

// Burg recursion; returns the monic prediction polynomial c (c[0] = 1) with
// x[t] ~ -sum_{i>=1} c[i] x[t-i]. Stops once the residual power collapses so
// trailing coefficients never chase rounding noise.
Eigen::VectorXd burg_prediction(const ArrayXd& x, int order) {
    const Eigen::Index n = x.size();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(order + 1);
    c[0] = 1.0;
    ArrayXd f = x;
    ArrayXd b = x;
    double den0 = -1.0;
    for (int m = 1; m <= order; ++m) {
        double num = 0.0;
        double den = 0.0;
        for (Eigen::Index t = m; t < n; ++t) {
            num += f[t] * b[t - 1];
            den += f[t] * f[t] + b[t - 1] * b[t - 1];
        }
        if (den0 < 0.0) den0 = den;
        if (!(den > den0 * 1e-24) || !std::isfinite(num)) break;
        const double k = -2.0 * num / den;
        const Eigen::VectorXd prev = c;
        for (int i = 1; i <= m; ++i) c[i] = prev[i] + k * prev[m - i];
        for (Eigen::Index t = n - 1; t >= m; --t) {
            const double ft = f[t];
            const double bt = b[t - 1];
            f[t] = ft + k * bt;
            b[t] = bt + k * ft;
        }
    }
    return c;
}

// Continues x past its last sample by running the prediction recursion.
ArrayXd predict_forward(const ArrayXd& x, const Eigen::VectorXd& c, Eigen::Index count) {
    const int p = static_cast<int>(c.size()) - 1;
    const Eigen::Index n = x.size();
    std::vector<double> hist(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) hist[static_cast<std::size_t>(i)] = x[n - 1 - i];
    ArrayXd out(count);
    for (Eigen::Index j = 0; j < count; ++j) {
        double v = 0.0;
        for (int i = 1; i <= p; ++i) v -= c[i] * hist[static_cast<std::size_t>(i - 1)];
        out[j] = v;
        for (int i = p - 1; i > 0; --i)
            hist[static_cast<std::size_t>(i)] = hist[static_cast<std::size_t>(i - 1)];
        if (p > 0) hist[0] = v;
    }
    return out;
}

}  // namespace

int next_fast_len(int n) {
    if (n < 1) throw std::invalid_argument("next_fast_len: n must be positive");
    for (;; ++n) {
        int m = n;
        while (m % 2 == 0) m /= 2;
        while (m % 3 == 0) m /= 3;
        while (m % 5 == 0) m /= 5;
        if (m == 1) return n;
    }
}

ArrayXcd forward_fft(const ArrayXcd& x) {
    std::vector<std::complex<double>> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out(in.size());
    fft_engine().fwd(out, in);
    return Eigen::Map<const ArrayXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

ArrayXcd inverse_fft(const ArrayXcd& x) {
    std::vector<std::complex<double>> in(x.data(), x.data() + x.size());
    std::vector<std::complex<double>> out(in.size());
    fft_engine().inv(out, in);
    return Eigen::Map<const ArrayXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Spectrum fft_power_phase(const ArrayXd& samples, int nfft, double rate) {
    if (nfft < samples.size())
        throw std::invalid_argument("fft_power_phase: nfft shorter than the input");
    if (nfft < 1) throw std::invalid_argument("fft_power_phase: nfft must be positive");
    std::vector<double> in(static_cast<std::size_t>(nfft), 0.0);
    std::copy(samples.data(), samples.data() + samples.size(), in.begin());
    std::vector<std::complex<double>> out(static_cast<std::size_t>(nfft));
    fft_engine().fwd(out, in);
    Spectrum s;
    s.bins = Eigen::Map<const ArrayXcd>(out.data(), nfft);
    s.rate = rate;
    s.bin_spacing = rate / nfft;
    return s;
}

double butterworth_min_order(const FilterSpec& spec) {
    const double wp = std::tan(std::numbers::pi * spec.passband_edge / spec.rate);
    const double ws = std::tan(std::numbers::pi * spec.stopband_edge / spec.rate);
    const double num = (std::pow(10.0, spec.stopband_atten_db / 10.0) - 1.0) /
                       (std::pow(10.0, spec.passband_atten_db / 10.0) - 1.0);
    return std::log10(num) / (2.0 * std::log10(ws / wp));
}

FilterCoefficients design_butterworth_lowpass(const FilterSpec& spec) {
    if (spec.order < 1) throw std::invalid_argument("filter order must be >= 1");
    if (!(spec.passband_edge > 0.0) || !(spec.passband_edge < spec.stopband_edge) ||
        !(spec.stopband_edge < spec.rate / 2.0))
        throw std::invalid_argument("filter edges must satisfy 0 < passband < stopband < rate/2");
    if (!(spec.passband_atten_db > 0.0) || !(spec.stopband_atten_db > spec.passband_atten_db))
        throw std::invalid_argument("attenuations must satisfy 0 < passband < stopband");

    const double required = butterworth_min_order(spec);
    if (static_cast<double>(spec.order) < required)
        throw std::runtime_error("infeasible filter spec: order " + std::to_string(spec.order) +
                                 " cannot meet both edges (needs >= " +
                                 std::to_string(static_cast<long long>(std::ceil(required))) +
                                 ")");

    const int n = spec.order;
    const double wp = std::tan(std::numbers::pi * spec.passband_edge / spec.rate);
    const double wc = wp / std::pow(std::pow(10.0, spec.passband_atten_db / 10.0) - 1.0,
                                    1.0 / (2.0 * n));

    std::vector<std::complex<double>> zpoles;
    zpoles.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + n - 1.0) / (2.0 * n);
        const std::complex<double> pa = wc * std::exp(std::complex<double>(0.0, theta));
        zpoles.push_back((1.0 + pa) / (1.0 - pa));
    }

    std::vector<std::array<double, 6>> rows;
    double max_radius = 0.0;
    for (const auto& p : zpoles) {
        max_radius = std::max(max_radius, std::abs(p));
        if (p.imag() > 1e-12) {
            const double a1 = -2.0 * p.real();
            const double a2 = std::norm(p);
            const double g = (1.0 + a1 + a2) / 4.0;
            rows.push_back({g, 2.0 * g, g, 1.0, a1, a2});
        } else if (std::abs(p.imag()) <= 1e-12) {
            const double a1 = -p.real();
            const double g = (1.0 + a1) / 2.0;
            rows.push_back({g, g, 0.0, 1.0, a1, 0.0});
        }
    }

    FilterCoefficients out;
    out.sections.resize(static_cast<Eigen::Index>(rows.size()), 6);
    for (Eigen::Index i = 0; i < out.sections.rows(); ++i)
        for (int j = 0; j < 6; ++j) out.sections(i, j) = rows[static_cast<std::size_t>(i)][j];
    out.max_pole_radius = max_radius;
    if (max_radius >= 1.0 - 1e-9)
        throw std::runtime_error("designed filter is not safely stable");

    double dc = 1.0;
    for (Eigen::Index i = 0; i < out.sections.rows(); ++i) {
        const auto r = out.sections.row(i);
        dc *= (r[0] + r[1] + r[2]) / (r[3] + r[4] + r[5]);
    }
    out.dc_gain = dc;
    return out;
}

double filter_response_db(const FilterCoefficients& coeffs, double f, double rate) {
    const std::complex<double> zi =
        std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * f / rate));
    std::complex<double> h = 1.0;
    for (Eigen::Index i = 0; i < coeffs.sections.rows(); ++i) {
        const auto r = coeffs.sections.row(i);
        h *= (r[0] + r[1] * zi + r[2] * zi * zi) / (r[3] + r[4] * zi + r[5] * zi * zi);
    }
    return 20.0 * std::log10(std::max(std::abs(h), 1e-300));
}

ArrayXd sos_filter(const FilterCoefficients& coeffs, const ArrayXd& x) {
    ArrayXd y = x;
    for (Eigen::Index s = 0; s < coeffs.sections.rows(); ++s) {
        const double b0 = coeffs.sections(s, 0);
        const double b1 = coeffs.sections(s, 1);
        const double b2 = coeffs.sections(s, 2);
        const double a1 = coeffs.sections(s, 4);
        const double a2 = coeffs.sections(s, 5);
        double w1 = 0.0, w2 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double w0 = y[i] - a1 * w1 - a2 * w2;
            y[i] = b0 * w0 + b1 * w1 + b2 * w2;
            w2 = w1;
            w1 = w0;
        }
    }
    return y;
}

Eigen::Index zero_phase_pad_length(const FilterCoefficients& coeffs) {
    const double r = std::clamp(coeffs.max_pole_radius, 1e-12, 1.0 - 1e-12);
    const double n_eff = std::ceil(std::log(1e-6) / std::log(r));
    return 3 * static_cast<Eigen::Index>(n_eff);
}

ArrayXd zero_phase_filter(const FilterCoefficients& coeffs, const ArrayXd& samples) {
    const Eigen::Index n = samples.size();
    const Eigen::Index pad = zero_phase_pad_length(coeffs);
    if (n <= pad)
        throw std::invalid_argument("zero_phase_filter: input shorter than the edge padding (" +
                                    std::to_string(n) + " <= " + std::to_string(pad) + ")");
    const int p = static_cast<int>(std::min<Eigen::Index>(48, n / 4));
    const Eigen::VectorXd c = burg_prediction(samples, p);
    ArrayXd ext(n + 2 * pad);
    ext.segment(pad, n) = samples;
    ext.segment(pad + n, pad) = predict_forward(samples, c, pad);
    const ArrayXd head = predict_forward(samples.reverse(), c, pad);
    for (Eigen::Index i = 0; i < pad; ++i) ext[pad - 1 - i] = head[i];

    ArrayXd y = sos_filter(coeffs, ext);
    y.reverseInPlace();
    y = sos_filter(coeffs, y);
    y.reverseInPlace();
    return y.segment(pad, n);
}

ArrayXd mix(const ArrayXd& a, const ArrayXd& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mix: length mismatch");
    return a * b;
}

ArrayXd decimate(const ArrayXd& samples, int n_factor) {
    if (n_factor < 1) throw std::invalid_argument("decimate: factor must be >= 1");
    const Eigen::Index m = samples.size() / n_factor;
    ArrayXd out(m);
    for (Eigen::Index i = 0; i < m; ++i) out[i] = samples[i * n_factor];
    return out;
}

Eigen::VectorXd polyfit(const ArrayXd& x, const ArrayXd& y, int degree) {
    if (degree < 0) throw std::invalid_argument("polyfit: negative degree");
    if (x.size() != y.size() || x.size() < degree + 1)
        throw std::invalid_argument("polyfit: need at least degree+1 matching points");
    Eigen::MatrixXd v(x.size(), degree + 1);
    v.col(0).setOnes();
    for (int j = 1; j <= degree; ++j) v.col(j) = v.col(j - 1).cwiseProduct(x.matrix());
    return v.householderQr().solve(y.matrix());
}

ArrayXd polyval(const Eigen::VectorXd& coeffs, const ArrayXd& x) {
    ArrayXd acc = ArrayXd::Constant(x.size(), coeffs[coeffs.size() - 1]);
    for (Eigen::Index j = coeffs.size() - 2; j >= 0; --j) acc = acc * x + coeffs[j];
    return acc;
}

double power_to_db(double p) { return 10.0 * std::log10(std::max(p, 1e-300)); }

double median(ArrayXd v) {
    if (v.size() == 0) throw std::invalid_argument("median of empty range");
    double* first = v.data();
    double* last = v.data() + v.size();
    double* mid = first + v.size() / 2;
    std::nth_element(first, mid, last);
    if (v.size() % 2 == 1) return *mid;
    const double hi = *mid;
    std::nth_element(first, mid - 1, mid);
    return 0.5 * (*(mid - 1) + hi);
}

}  // namespace fmcw
