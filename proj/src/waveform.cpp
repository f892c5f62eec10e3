#include "fmcw/waveform.hpp"

#include "fmcw/dsp.hpp"
#include "fmcw/planning.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fmcw {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt, std::uint64_t index) {
    return splitmix64(splitmix64(seed ^ splitmix64(salt)) ^ index);
}

// Box-Muller on a fixed-width engine keeps realizations identical across
// standard libraries.
class Gaussian {
  public:
    explicit Gaussian(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

constexpr std::uint64_t kPhaseSalt = 0x70686173656e6f69ull;
constexpr std::uint64_t kThermalSalt = 0x746865726d616c00ull;

void check_model(const PhaseNoiseModel& m) {
    if (std::isnan(m.psd_anchor_dbc_hz) || !(m.anchor_offset > 0.0) || !(m.cutoff > 0.0) ||
        !std::isfinite(m.slope) || !std::isfinite(m.anchor_offset) || !std::isfinite(m.cutoff))
        throw std::invalid_argument("phase-noise model has non-finite or non-positive parameters");
}

}  // namespace

bool noise_enabled(const PhaseNoiseModel& model) {
    return model.psd_anchor_dbc_hz > -1e299 && std::isfinite(model.psd_anchor_dbc_hz);
}

double noise_psd(const PhaseNoiseModel& model, double f) {
    if (!noise_enabled(model)) return 0.0;
    const double anchor = std::pow(10.0, model.psd_anchor_dbc_hz / 10.0);
    const double fe = std::min(std::max(f, 1e-12), model.cutoff);
    return anchor * std::pow(fe / model.anchor_offset, model.slope / 10.0);
}

double noise_phi_rms(const PhaseNoiseModel& model, double f_lo, double f_hi) {
    if (!noise_enabled(model)) return 0.0;
    check_model(model);
    if (!(f_hi > f_lo) || !(f_lo > 0.0))
        throw std::invalid_argument("noise_phi_rms: need 0 < f_lo < f_hi");
    const double anchor = std::pow(10.0, model.psd_anchor_dbc_hz / 10.0);
    const double p = model.slope / 10.0;
    double var = 0.0;
    const double hi1 = std::min(f_hi, model.cutoff);
    if (hi1 > f_lo) {
        if (std::abs(p + 1.0) < 1e-12) {
            var += anchor * model.anchor_offset * std::log(hi1 / f_lo);
        } else {
            var += anchor / std::pow(model.anchor_offset, p) *
                   (std::pow(hi1, p + 1.0) - std::pow(f_lo, p + 1.0)) / (p + 1.0);
        }
    }
    if (f_hi > model.cutoff) {
        const double lo2 = std::max(f_lo, model.cutoff);
        var += noise_psd(model, model.cutoff) * (f_hi - lo2);
    }
    return std::sqrt(std::max(var, 0.0));
}

void validate_scene(const RadarScene& scene, std::vector<std::string>* warnings) {
    const auto& ch = scene.chirp;
    if (!(ch.bandwidth > 0.0) || !(ch.sweep_period > 0.0) || !(ch.amplitude > 0.0))
        throw std::invalid_argument("chirp bandwidth, sweep period, and amplitude must be positive");
    if (scene.paths.empty()) throw std::invalid_argument("scene needs at least one path");
    bool has_leakage = false;
    for (const auto& p : scene.paths) {
        if (p.delay < 0.0 || p.amplitude < 0.0)
            throw std::invalid_argument("path delay and amplitude must be non-negative");
        if (p.delay >= ch.sweep_period / 10.0)
            throw std::invalid_argument(
                "path delay must stay below sweep_period/10 to keep beats far under the carrier");
        has_leakage = has_leakage || p.kind == PathKind::leakage;
    }
    if (!has_leakage) throw std::invalid_argument("scene needs a leakage path");
    if (noise_enabled(scene.noise)) check_model(scene.noise);
    if (warnings) {
        if (ch.f_tx < ch.f_rx)
            warnings->push_back(
                "f_tx < f_rx: beats subtract from the carrier; widen the estimation window");
        if (noise_enabled(scene.noise)) {
            const double f_hi = std::max(100.0 * scene.noise.cutoff, 2.0 / ch.sweep_period);
            const double rms = noise_phi_rms(scene.noise, 1.0 / ch.sweep_period, f_hi);
            if (rms > 0.3)
                warnings->push_back("phase-noise rms " + std::to_string(rms) +
                                    " rad exceeds the small-angle regime");
        }
    }
}

const ScatteringPath& dominant_leakage(const RadarScene& scene) {
    const ScatteringPath* dom = nullptr;
    for (const auto& p : scene.paths)
        if (p.kind == PathKind::leakage && (!dom || p.amplitude > dom->amplitude)) dom = &p;
    if (!dom) throw std::invalid_argument("scene has no leakage path");
    return *dom;
}

ArrayXd synthesize_phase_noise(const PhaseNoiseModel& model, Eigen::Index count, double rate) {
    if (count <= 0) throw std::invalid_argument("synthesize_phase_noise: count must be positive");
    if (!(rate > 0.0)) throw std::invalid_argument("synthesize_phase_noise: rate must be positive");
    if (!noise_enabled(model)) return ArrayXd::Zero(count);
    check_model(model);

    const int n = next_fast_len(static_cast<int>(std::max<Eigen::Index>(count, 2)));
    const Eigen::Index nh = n / 2;
    Gaussian gauss(mix_seed(model.seed, kPhaseSalt, 0));

    ArrayXcd spec = ArrayXcd::Zero(n);
    for (Eigen::Index k = 1; k <= nh; ++k) {
        const double fk = static_cast<double>(k) * rate / n;
        const double s = noise_psd(model, fk);
        const double g1 = gauss();
        const double g2 = gauss();
        if (n % 2 == 0 && k == nh) {
            spec[k] = std::sqrt(rate * n * s) * g1;
        } else {
            const double sigma = std::sqrt(rate * n * s / 2.0);
            spec[k] = sigma * std::complex<double>(g1, g2) * std::numbers::sqrt2 / 2.0;
        }
    }
    const Eigen::Index m2 = (n - 1) / 2;
    for (Eigen::Index k = 1; k <= m2; ++k) spec[n - k] = std::conj(spec[k]);

    const ArrayXcd x = inverse_fft(spec);
    return x.real().head(count);
}

ArrayXd delayed_difference(const ArrayXd& noise, double rate, double tau) {
    if (tau < 0.0) throw std::invalid_argument("delayed_difference: tau must be >= 0");
    if (!(rate > 0.0)) throw std::invalid_argument("delayed_difference: rate must be positive");
    const double d = tau * rate;
    const Eigen::Index lead = static_cast<Eigen::Index>(std::ceil(d));
    if (lead >= noise.size())
        throw std::invalid_argument("delayed_difference: delay exceeds the available history");
    ArrayXd out(noise.size() - lead);
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        const Eigen::Index i = lead + j;
        const double u = static_cast<double>(i) - d;
        const auto i0 = static_cast<Eigen::Index>(std::floor(u));
        const double fr = u - static_cast<double>(i0);
        const double past = fr == 0.0 ? noise[i0] : noise[i0] * (1.0 - fr) + noise[i0 + 1] * fr;
        out[j] = noise[i] - past;
    }
    return out;
}

ArrayXd chirp_noise_stream(const RadarScene& scene, const FrequencyPlan& plan, int chirp_index,
                           Eigen::Index count) {
    PhaseNoiseModel per_chirp = scene.noise;
    per_chirp.seed = mix_seed(scene.noise.seed, kPhaseSalt, static_cast<std::uint64_t>(chirp_index));
    return synthesize_phase_noise(per_chirp, count, plan.oversampled_fs);
}

IfSampleBlock synthesize_if_block(const RadarScene& scene, const FrequencyPlan& plan,
                                  int chirp_index) {
    if (chirp_index < 0) throw std::invalid_argument("chirp_index must be >= 0");
    validate_scene(scene);
    const double nfs = plan.oversampled_fs;
    if (!(nfs > 0.0)) throw std::invalid_argument("plan has no oversampled rate");

    const auto n = static_cast<Eigen::Index>(std::llround(scene.chirp.sweep_period * nfs));
    if (n < 2) throw std::invalid_argument("sweep too short for the oversampled rate");
    const double slope = sweep_slope(scene.chirp);
    const double carrier = scene_carrier(scene.chirp);

    double tau_max = 0.0;
    for (const auto& p : scene.paths) {
        tau_max = std::max(tau_max, p.delay);
        const double tone = carrier + slope * p.delay;
        if (tone >= nfs / 2.0)
            throw std::invalid_argument("path tone " + std::to_string(tone) +
                                        " Hz would alias at the oversampled rate");
    }

    const bool noisy = noise_enabled(scene.noise);
    const auto hist = static_cast<Eigen::Index>(std::ceil(tau_max * nfs)) + 2;
    ArrayXd phi;
    if (noisy) phi = chirp_noise_stream(scene, plan, chirp_index, n + hist);

    ArrayXd x = ArrayXd::Zero(n);
    for (const auto& p : scene.paths) {
        const double f_tone = carrier + slope * p.delay;
        const double w = 2.0 * std::numbers::pi * f_tone / nfs;
        const double theta = scene.chirp.const_phase +
                             2.0 * std::numbers::pi * scene.chirp.f_rx * p.delay -
                             std::numbers::pi * slope * p.delay * p.delay - p.const_phase;
        const double amp = scene.chirp.amplitude * p.amplitude / 2.0;
        if (noisy) {
            const ArrayXd dd = delayed_difference(phi, nfs, p.delay);
            const Eigen::Index off = dd.size() - n;
            for (Eigen::Index j = 0; j < n; ++j)
                x[j] += amp * std::cos(w * static_cast<double>(j) + theta + dd[off + j]);
        } else {
            for (Eigen::Index j = 0; j < n; ++j)
                x[j] += amp * std::cos(w * static_cast<double>(j) + theta);
        }
    }

    if (scene.thermal_noise_dbfs > -1e299 && std::isfinite(scene.thermal_noise_dbfs)) {
        const double ref = scene.chirp.amplitude * dominant_leakage(scene).amplitude / 2.0;
        const double sigma = ref * std::pow(10.0, scene.thermal_noise_dbfs / 20.0);
        Gaussian gauss(mix_seed(scene.noise.seed, kThermalSalt,
                                static_cast<std::uint64_t>(chirp_index)));
        for (Eigen::Index j = 0; j < n; ++j) x[j] += sigma * gauss();
    }

    IfSampleBlock block;
    block.samples = std::move(x);
    block.chirp_index = chirp_index;
    block.meaningful_count = Eigen::Index{1} << (std::bit_width(static_cast<std::uint64_t>(n)) - 1);
    return block;
}

}  // namespace fmcw
