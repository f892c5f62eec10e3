#include "fmcw/analysis.hpp"

#include <doctest.h>

#include "fmcw/dsp.hpp"
#include "fmcw/planning.hpp"
#include "oracle_helpers.hpp"

#include <cmath>
#include <complex>

using namespace fmcw;

namespace {

ChirpParams chirp_b() {
    ChirpParams c;
    c.f_tx = 14.3505e9;
    c.f_rx = 14.35e9;
    c.bandwidth = 150e6;
    c.sweep_period = 3e-4;
    return c;
}

BasebandBlock make_block(const ArrayXd& samples, const char* technique, int chirp = 0) {
    BasebandBlock b;
    b.samples = samples;
    b.rate_hz = 5e5;
    b.chirp_index = chirp;
    b.technique = technique;
    return b;
}

RangeSpectrum make_spectrum(const ArrayXd& power_db, double bin_m = 1.0) {
    RangeSpectrum s;
    s.power_db = power_db;
    s.range_axis.resize(power_db.size());
    for (Eigen::Index k = 0; k < power_db.size(); ++k)
        s.range_axis[k] = bin_m * static_cast<double>(k);
    s.technique = "common";
    s.chirps_averaged = 1;
    return s;
}

}  // namespace

TEST_CASE("averaged_power_spectrum averages one-sided scaled periodograms") {
    const ArrayXd x1 = oracle::random_signal(16, 41);
    const ArrayXd x2 = oracle::random_signal(16, 43);
    const std::vector<BasebandBlock> blocks{make_block(x1, "common", 0),
                                            make_block(x2, "common", 1)};
    const RangeSpectrum spec = averaged_power_spectrum(blocks, chirp_b());

    REQUIRE(spec.power_db.size() == 8);
    REQUIRE(spec.range_axis.size() == 8);
    CHECK(spec.technique == "common");
    CHECK(spec.chirps_averaged == 2);

    const auto d1 = oracle::brute_dft(x1, 16);
    const auto d2 = oracle::brute_dft(x2, 16);
    for (int k = 0; k < 8; ++k) {
        const double scale = (k == 0 ? 1.0 : 2.0) / 256.0;
        const double want =
            10.0 * std::log10(scale * (std::norm(d1[k]) + std::norm(d2[k])) / 2.0);
        CHECK(spec.power_db[k] == doctest::Approx(want).epsilon(1e-9));
        const double want_range = range_of_beat(k * 5e5 / 16.0, chirp_b());
        CHECK(spec.range_axis[k] == doctest::Approx(want_range).epsilon(1e-12));
    }

    SUBCASE("bin spacing matches the apparent range resolution") {
        ArrayXd z = ArrayXd::Zero(128);
        z[0] = 1.0;
        const RangeSpectrum s =
            averaged_power_spectrum({make_block(z, "common")}, chirp_b());
        CHECK(s.range_axis[1] - s.range_axis[0] == doctest::Approx(1.1711).epsilon(2e-4));
    }

    SUBCASE("mixed techniques or lengths are rejected") {
        CHECK_THROWS(averaged_power_spectrum({make_block(x1, "common"),
                                              make_block(x2, "proposed")},
                                             chirp_b()));
        CHECK_THROWS(averaged_power_spectrum({make_block(x1, "common"),
                                              make_block(oracle::random_signal(8, 1), "common")},
                                             chirp_b()));
        CHECK_THROWS(averaged_power_spectrum({}, chirp_b()));
    }
}

TEST_CASE("default_exclusion_zone stops where the skirt meets the look-ahead floor") {
    ArrayXd p(60);
    for (int k = 0; k <= 10; ++k) p[k] = -6.0 * k;
    for (int k = 11; k < 60; ++k) p[k] = -70.0 + 0.1 * ((k % 2 == 0) ? 1.0 : -1.0);
    const RangeSpectrum spec = make_spectrum(p, 1.5);
    CHECK(default_exclusion_zone(spec) == doctest::Approx(1.5 * 11).epsilon(1e-12));

    SUBCASE("a spectrum that never flattens runs to the last bin") {
        ArrayXd ramp(40);  // steeper than margin_db per bin even at the truncated tail
        for (int k = 0; k < 40; ++k) ramp[k] = -6.0 * k;
        CHECK(default_exclusion_zone(make_spectrum(ramp, 2.0)) ==
              doctest::Approx(2.0 * 39).epsilon(1e-12));
    }
}

TEST_CASE("noise_floor_difference fits common minus proposed over the support") {
    const int n = 64;
    ArrayXd base(n);
    for (int k = 0; k < n; ++k) base[k] = -80.0 + 0.5 * std::sin(0.3 * k);
    const RangeSpectrum proposed = make_spectrum(base, 1.0);

    SUBCASE("uniform offset comes back as a flat fit") {
        RangeSpectrum common = make_spectrum(base + 5.0, 1.0);
        const NoiseFloorReport rep = noise_floor_difference(common, proposed, 10.0);
        CHECK(rep.exclusion_zone == 10.0);
        CHECK(rep.support_range_m[0] == 10.0);
        CHECK(rep.support_range_m[rep.support_range_m.size() - 1] == 63.0);
        CHECK(rep.diff_db.size() == 54);
        CHECK((rep.diff_db - 5.0).abs().maxCoeff() < 1e-9);
        CHECK(rep.max_improvement_db == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(rep.min_improvement_db == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(rep.fit_near_db == doctest::Approx(5.0).epsilon(1e-6));
        CHECK(rep.fit_far_db == doctest::Approx(5.0).epsilon(1e-6));
    }

    SUBCASE("a planted cubic trend is recovered exactly by the degree-8 fit") {
        ArrayXd diff(n);
        for (int k = 0; k < n; ++k) {
            const double r = static_cast<double>(k);
            diff[k] = 20.0 - 0.5 * r + 0.012 * r * r - 1e-4 * r * r * r;
        }
        RangeSpectrum common = make_spectrum(base + diff, 1.0);
        const NoiseFloorReport rep = noise_floor_difference(common, proposed, 5.0, 50.0);
        CHECK(rep.support_range_m[0] == 5.0);
        CHECK(rep.support_range_m[rep.support_range_m.size() - 1] == 50.0);
        const ArrayXd fitted = polyval(rep.fit_coeffs,
                                       2.0 * (rep.support_range_m - 5.0) / 45.0 - 1.0);
        CHECK((fitted - rep.diff_db).abs().maxCoeff() < 1e-6);
        CHECK(rep.fit_near_db == doctest::Approx(diff[5]).epsilon(1e-6));
        CHECK(rep.fit_far_db == doctest::Approx(diff[50]).epsilon(1e-6));
        CHECK(rep.fit_near_db > rep.fit_far_db);
    }

    SUBCASE("adding the same offset to both spectra changes nothing") {
        RangeSpectrum common = make_spectrum(base + 3.0, 1.0);
        const NoiseFloorReport a = noise_floor_difference(common, proposed, 12.0);
        RangeSpectrum common2 = make_spectrum(base + 3.0 + 7.0, 1.0);
        RangeSpectrum proposed2 = make_spectrum(base + 7.0, 1.0);
        const NoiseFloorReport b = noise_floor_difference(common2, proposed2, 12.0);
        CHECK((a.diff_db - b.diff_db).abs().maxCoeff() < 1e-9);
        CHECK(a.max_improvement_db == doctest::Approx(b.max_improvement_db).epsilon(1e-9));
    }

    SUBCASE("short support and mismatched axes are rejected") {
        RangeSpectrum common = make_spectrum(base + 5.0, 1.0);
        CHECK_THROWS(noise_floor_difference(common, proposed, 60.0));
        CHECK_THROWS(noise_floor_difference(common, proposed, 10.0, 15.0));
        RangeSpectrum other = make_spectrum(base, 2.0);
        CHECK_THROWS(noise_floor_difference(other, proposed, 10.0));
    }
}

TEST_CASE("predict_alias folds apparent ranges about r_max") {
    const double r_max = 74.948;
    const double r_int = 12.8806;

    const AliasPrediction near = predict_alias(50.0, r_int, r_max);
    CHECK(!near.aliased);
    CHECK(near.apparent == doctest::Approx(62.8806).epsilon(1e-12));
    CHECK(near.observed == doctest::Approx(62.8806).epsilon(1e-12));
    CHECK(near.usable_max == doctest::Approx(r_max - r_int).epsilon(1e-12));

    const AliasPrediction far = predict_alias(73.0, r_int, r_max);
    CHECK(far.aliased);
    CHECK(far.apparent == doctest::Approx(85.8806).epsilon(1e-12));
    CHECK(far.observed == doctest::Approx(2.0 * r_max - 85.8806).epsilon(1e-10));

    SUBCASE("apparent exactly at r_max does not alias") {
        const AliasPrediction edge = predict_alias(48.0, 16.0, 64.0);
        CHECK(!edge.aliased);
        CHECK(edge.observed == 64.0);
    }

    SUBCASE("out-of-domain inputs throw") {
        CHECK_THROWS_AS(predict_alias(-1.0, r_int, r_max), std::invalid_argument);
        CHECK_THROWS_AS(predict_alias(2.0 * r_max, r_int, r_max), std::runtime_error);
    }
}

TEST_CASE("detect_peaks finds prominent local maxima with parabolic refinement") {
    ArrayXd p = ArrayXd::Constant(80, -80.0);
    p[19] = -26.0;
    p[20] = -20.0;
    p[21] = -23.0;
    p[39] = -36.0;
    p[40] = -30.0;
    p[41] = -33.0;
    p[60] = -75.0;  // only 5 dB proud: below the default prominence
    const RangeSpectrum spec = make_spectrum(p, 2.0);

    const auto peaks = detect_peaks(spec);
    REQUIRE(peaks.size() == 2);
    CHECK(peaks[0].range_m == doctest::Approx(40.0));
    CHECK(peaks[0].power_db == doctest::Approx(-20.0));
    CHECK(peaks[1].range_m == doctest::Approx(80.0));

    const double delta = 0.5 * (-26.0 + 23.0) / (-26.0 + 40.0 - 23.0);
    CHECK(peaks[0].refined_range_m == doctest::Approx(40.0 + delta * 2.0).epsilon(1e-12));
    CHECK(peaks[0].refined_power_db ==
          doctest::Approx(-20.0 - 0.25 * (-26.0 + 23.0) * delta).epsilon(1e-12));

    SUBCASE("edge bins can be peaks") {
        ArrayXd q = ArrayXd::Constant(40, -80.0);
        q[0] = -10.0;
        q[39] = -15.0;
        const auto edge_peaks = detect_peaks(make_spectrum(q, 1.0));
        REQUIRE(edge_peaks.size() == 2);
        CHECK(edge_peaks[0].range_m == 0.0);
        CHECK(edge_peaks[0].refined_range_m == 0.0);  // no interior neighbors to refine with
        CHECK(edge_peaks[1].range_m == 39.0);
    }

    SUBCASE("a plateau counts once, at its left edge") {
        ArrayXd q = ArrayXd::Constant(40, -80.0);
        q[10] = -20.0;
        q[11] = -20.0;
        const auto ps = detect_peaks(make_spectrum(q, 1.0));
        REQUIRE(ps.size() == 1);
        CHECK(ps[0].range_m == 10.0);
    }

    SUBCASE("raising the prominence threshold drops the weaker peak") {
        const auto strict = detect_peaks(spec, 55.0);
        REQUIRE(strict.size() == 1);
        CHECK(strict[0].range_m == doctest::Approx(40.0));
    }
}
