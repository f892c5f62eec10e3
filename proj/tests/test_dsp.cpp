#include "fmcw/dsp.hpp"

#include <doctest.h>

#include "oracle_helpers.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace fmcw;
using oracle::rms;

namespace {

bool is_5_smooth(int n) {
    for (int p : {2, 3, 5})
        while (n % p == 0) n /= p;
    return n == 1;
}

FilterSpec table_spec(double rate) {
    FilterSpec s;
    s.order = 11;
    s.passband_edge = 0.1875 * rate;
    s.stopband_edge = 0.25 * rate;
    s.passband_atten_db = 1.0;
    s.stopband_atten_db = 30.0;
    s.rate = rate;
    return s;
}

double tone_gain_db(const FilterCoefficients& lpf, double f, double rate, bool zero_phase) {
    const Eigen::Index n = 8192;
    ArrayXd x(n);
    for (Eigen::Index i = 0; i < n; ++i)
        x[i] = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(i) / rate);
    const ArrayXd y = zero_phase ? zero_phase_filter(lpf, x) : sos_filter(lpf, x);
    const Eigen::Index skip = 2000;
    const double num = rms(y.tail(n - skip));
    const double den = rms(x.tail(n - skip));
    return 20.0 * std::log10(num / den);
}

}  // namespace

TEST_CASE("next_fast_len returns the smallest 5-smooth length") {
    CHECK(next_fast_len(8600) == 8640);
    CHECK(next_fast_len(1) == 1);
    CHECK(next_fast_len(7) == 8);
    CHECK(next_fast_len(640) == 640);
    for (int n = 1; n <= 2000; ++n) {
        const int m = next_fast_len(n);
        CHECK(m >= n);
        CHECK(is_5_smooth(m));
        for (int k = n; k < m; ++k) CHECK(!is_5_smooth(k));
    }
}

TEST_CASE("fft_power_phase matches a direct DFT") {
    const ArrayXd x = oracle::random_signal(48, 7);
    const Spectrum spec = fft_power_phase(x, 64, 1000.0);
    REQUIRE(spec.bins.size() == 64);
    CHECK(spec.bin_spacing == doctest::Approx(1000.0 / 64).epsilon(1e-12));
    CHECK(spec.rate == 1000.0);
    const auto ref = oracle::brute_dft(x, 64);
    for (int k = 0; k < 64; ++k)
        CHECK(std::abs(spec.bins[k] - ref[k]) < 1e-9 * (1.0 + std::abs(ref[k])));
    CHECK_THROWS(fft_power_phase(x, 32, 1000.0));
}

TEST_CASE("fft obeys Parseval, linearity and conjugate symmetry") {
    const ArrayXd x = oracle::random_signal(100, 11);
    const Spectrum spec = fft_power_phase(x, 128, 1.0);
    const double time_energy = (x * x).sum();
    const double freq_energy = spec.bins.abs2().mean();
    CHECK(freq_energy == doctest::Approx(time_energy).epsilon(1e-10));
    for (int k = 1; k < 64; ++k)
        CHECK(std::abs(spec.bins[128 - k] - std::conj(spec.bins[k])) <
              1e-9 * (1.0 + std::abs(spec.bins[k])));

    const ArrayXd y = oracle::random_signal(100, 13);
    const Spectrum sx = fft_power_phase(x, 128), sy = fft_power_phase(y, 128),
                   sxy = fft_power_phase(x + 2.0 * y, 128);
    for (int k = 0; k < 128; ++k) {
        const auto want = sx.bins[k] + 2.0 * sy.bins[k];
        CHECK(std::abs(sxy.bins[k] - want) < 1e-9 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("forward and inverse fft round-trip") {
    ArrayXcd x(60);
    std::mt19937 rng(3);
    std::normal_distribution<double> g;
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = {g(rng), g(rng)};
    const ArrayXcd back = inverse_fft(forward_fft(x));
    for (Eigen::Index i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) < 1e-12);
}

TEST_CASE("butterworth minimum order for the shipped responses is 11") {
    for (double rate : {10e6, 2e6}) {
        const FilterSpec s = table_spec(rate);
        const double frac = butterworth_min_order(s);
        const double want = oracle::butter_min_order(s.passband_edge, s.stopband_edge,
                                                     s.passband_atten_db, s.stopband_atten_db,
                                                     rate);
        CHECK(frac == doctest::Approx(want).epsilon(1e-12));
        CHECK(std::ceil(frac) == 11);
        CHECK(frac > 10.0);
    }
}

TEST_CASE("lowpass design meets both edges and is a stable unity-DC cascade") {
    const FilterSpec s = table_spec(10e6);
    const FilterCoefficients lpf = design_butterworth_lowpass(s);

    REQUIRE(lpf.sections.rows() == 6);
    for (Eigen::Index r = 0; r < lpf.sections.rows(); ++r) {
        CHECK(lpf.sections(r, 3) == 1.0);
        const double num = lpf.sections(r, 0) + lpf.sections(r, 1) + lpf.sections(r, 2);
        const double den = 1.0 + lpf.sections(r, 4) + lpf.sections(r, 5);
        CHECK(num / den == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(lpf.dc_gain == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(lpf.max_pole_radius < 1.0 - 1e-9);

    CHECK(std::abs(filter_response_db(lpf, 0.0, s.rate)) < 1e-9);
    CHECK(filter_response_db(lpf, s.passband_edge, s.rate) ==
          doctest::Approx(-1.0).epsilon(1e-6));
    const double stop = filter_response_db(lpf, s.stopband_edge, s.rate);
    CHECK(stop <= -30.0);
    CHECK(stop > -40.0);
    CHECK(filter_response_db(lpf, s.rate / 2.0, s.rate) < -200.0);

    SUBCASE("an order that cannot meet the spec throws and names the needed order") {
        FilterSpec bad = s;
        bad.order = 10;
        bool threw = false;
        try {
            design_butterworth_lowpass(bad);
        } catch (const std::exception& e) {
            threw = true;
            CHECK(std::string(e.what()).find("11") != std::string::npos);
        }
        CHECK(threw);
    }
}

TEST_CASE("time-domain gain of the cascade matches the evaluated response") {
    const FilterSpec s = table_spec(10e6);
    const FilterCoefficients lpf = design_butterworth_lowpass(s);
    for (double f : {0.5e6, 1.0e6, 1.875e6}) {
        const double measured = tone_gain_db(lpf, f, s.rate, false);
        const double predicted = filter_response_db(lpf, f, s.rate);
        CHECK(std::abs(measured - predicted) < 0.05);
    }
}

TEST_CASE("zero-phase filtering squares the magnitude and keeps symmetry") {
    const FilterSpec s = table_spec(10e6);
    const FilterCoefficients lpf = design_butterworth_lowpass(s);

    SUBCASE("gain doubles in dB") {
        for (double f : {1.0e6, 1.875e6}) {
            const double once = filter_response_db(lpf, f, s.rate);
            const double twice = tone_gain_db(lpf, f, s.rate, true);
            CHECK(std::abs(twice - 2.0 * once) < 0.1);
        }
    }

    SUBCASE("symmetric input stays symmetric (no phase distortion)") {
        const Eigen::Index n = 4001;
        ArrayXd x(n);
        const double c = (n - 1) / 2.0;
        for (Eigen::Index i = 0; i < n; ++i)
            x[i] = std::exp(-std::pow((static_cast<double>(i) - c) / 40.0, 2));
        const ArrayXd y = zero_phase_filter(lpf, x);
        REQUIRE(y.size() == n);
        const double scale = y.abs().maxCoeff();
        for (Eigen::Index i = 0; i < n / 2; ++i)
            CHECK(std::abs(y[i] - y[n - 1 - i]) < 1e-9 * scale);
    }

    SUBCASE("input shorter than the edge padding is rejected") {
        const Eigen::Index pad = zero_phase_pad_length(lpf);
        CHECK(pad > 0);
        CHECK(pad < 512);
        CHECK_THROWS(zero_phase_filter(lpf, ArrayXd::Zero(pad)));
        CHECK_NOTHROW(zero_phase_filter(lpf, ArrayXd::Random(pad + 1)));
    }
}

TEST_CASE("mix is the elementwise product") {
    ArrayXd a(3), b(3);
    a << 1.0, -2.0, 3.0;
    b << 4.0, 5.0, -6.0;
    const ArrayXd p = mix(a, b);
    CHECK(p[0] == 4.0);
    CHECK(p[1] == -10.0);
    CHECK(p[2] == -18.0);
    CHECK_THROWS(mix(a, ArrayXd::Zero(4)));
}

TEST_CASE("decimate keeps every n-th sample, floor(len/n) of them") {
    ArrayXd x(10);
    for (int i = 0; i < 10; ++i) x[i] = i;
    const ArrayXd d2 = decimate(x, 2);
    REQUIRE(d2.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(d2[i] == 2.0 * i);
    const ArrayXd d4 = decimate(x, 4);
    REQUIRE(d4.size() == 2);
    CHECK(d4[0] == 0.0);
    CHECK(d4[1] == 4.0);
    const ArrayXd d1 = decimate(x, 1);
    REQUIRE(d1.size() == 10);
    CHECK((d1 == x).all());
}

TEST_CASE("polyfit round-trips exact polynomials and polyval is Horner-correct") {
    Eigen::VectorXd coeffs(4);
    coeffs << 2.0, -1.0, 0.5, 0.25;
    ArrayXd x(9);
    x << -1.0, -0.75, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 1.0;
    ArrayXd y = ArrayXd::Zero(9);
    for (int i = 0; i < 9; ++i)
        for (int p = 0; p < 4; ++p) y[i] += coeffs[p] * std::pow(x[i], p);

    const Eigen::VectorXd fit = polyfit(x, y, 3);
    REQUIRE(fit.size() == 4);
    for (int p = 0; p < 4; ++p) CHECK(fit[p] == doctest::Approx(coeffs[p]).epsilon(1e-10));

    const ArrayXd back = polyval(fit, x);
    for (int i = 0; i < 9; ++i) CHECK(back[i] == doctest::Approx(y[i]).epsilon(1e-10));

    SUBCASE("degree-8 fit stays within the noise band of its data") {
        const int n = 101;
        ArrayXd xs(n), ys(n);
        std::mt19937 rng(17);
        std::normal_distribution<double> g(0.0, 0.05);
        for (int i = 0; i < n; ++i) {
            xs[i] = -1.0 + 2.0 * i / (n - 1);
            ys[i] = std::sin(3.0 * xs[i]) + g(rng);
        }
        const ArrayXd smooth = polyval(polyfit(xs, ys, 8), xs);
        CHECK(rms(ys - smooth) < 0.08);
    }
}

TEST_CASE("median and power_to_db basics") {
    ArrayXd odd(3);
    odd << 3.0, 1.0, 2.0;
    CHECK(median(odd) == 2.0);
    ArrayXd even(4);
    even << 4.0, 1.0, 3.0, 2.0;
    CHECK(median(even) == 2.5);

    SUBCASE("median is permutation invariant") {
        ArrayXd v = oracle::random_signal(33, 23);
        const double m = median(v);
        std::mt19937 rng(5);
        std::vector<double> shuffled(v.data(), v.data() + v.size());
        for (int t = 0; t < 4; ++t) {
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            ArrayXd u = Eigen::Map<ArrayXd>(shuffled.data(), static_cast<Eigen::Index>(shuffled.size()));
            CHECK(median(u) == m);
        }
    }

    CHECK(power_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(std::abs(power_to_db(1.0)) < 1e-12);
    CHECK(power_to_db(0.0) <= -2990.0);
}
