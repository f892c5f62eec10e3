#include "fmcw/planning.hpp"

#include "fmcw/waveform.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fmcw {

double sweep_slope(const ChirpParams& chirp) {
    return chirp.bandwidth / chirp.sweep_period;
}

double scene_carrier(const ChirpParams& chirp) { return chirp.f_tx - chirp.f_rx; }

double fold_frequency(double f, double fs) {
    double r = std::fmod(f, fs);
    if (r < 0.0) r += fs;
    if (r > fs / 2.0) r = fs - r;
    return r;
}

FrequencyPlan make_plan(double base_fs, int n_factor, int band_index, int nfft,
                        std::vector<std::string>* warnings) {
    if (!(base_fs > 0.0)) throw std::invalid_argument("make_plan: base_fs must be positive");
    if (band_index < 0) throw std::invalid_argument("make_plan: band_index must be >= 0");
    if (n_factor <= 2)
        throw std::invalid_argument(
            "make_plan: n_factor must be > 2 (a factor of 2 folds the mixing sum-terms onto the "
            "desired band)");
    if (nfft < 1 || (nfft & (nfft - 1)) != 0)
        throw std::invalid_argument("make_plan: nfft must be a power of two");
    if (n_factor == 3 && warnings)
        warnings->push_back(
            "n_factor = 3 leaves little stopband margin for the mixing sum-terms; 4 is the "
            "recommended factor");

    FrequencyPlan plan;
    plan.base_fs = base_fs;
    plan.n_factor = n_factor;
    plan.band_index = band_index;
    plan.oversampled_fs = n_factor * base_fs;
    plan.if_carrier =
        fold_frequency(plan.oversampled_fs * (4.0 * band_index + 1.0) / 4.0, plan.oversampled_fs);
    plan.nfft = nfft;
    return plan;
}

double range_of_beat(double f_beat, const ChirpParams& chirp) {
    return kSpeedOfLight * chirp.sweep_period * f_beat / (2.0 * chirp.bandwidth);
}

double beat_of_range(double r, const ChirpParams& chirp) {
    return 2.0 * r * chirp.bandwidth / (kSpeedOfLight * chirp.sweep_period);
}

ValidationReport validate_plan(const FrequencyPlan& plan, const RadarScene& scene,
                               const FilterSpec& lpf) {
    ValidationReport rep;
    rep.fold_rule =
        "alias(f) = fold of f into [0, oversampled_fs/2]: reduce modulo oversampled_fs, then "
        "reflect at oversampled_fs/2";
    rep.plan_carrier = plan.if_carrier;
    rep.scene_carrier = scene_carrier(scene.chirp);

    const double nfs = plan.oversampled_fs;
    const double transition = lpf.stopband_edge - lpf.passband_edge;
    const double slope = sweep_slope(scene.chirp);

    rep.carrier_ok = std::abs(rep.scene_carrier - rep.plan_carrier) <= transition;
    if (!rep.carrier_ok) {
        std::ostringstream os;
        os << "IF carrier " << rep.scene_carrier << " Hz is off the plan's quarter point "
           << rep.plan_carrier << " Hz by more than the LPF transition width " << transition
           << " Hz";
        rep.failures.push_back(os.str());
    }

    const ScatteringPath* dom = nullptr;
    for (const auto& p : scene.paths)
        if (p.kind == PathKind::leakage && (!dom || p.amplitude > dom->amplitude)) dom = &p;

    rep.collision_limit = nfs / 4.0 - lpf.passband_edge;
    rep.collision_ok = true;
    if (dom) {
        const double leak_beat = slope * dom->delay;
        rep.collision_ok = leak_beat <= rep.collision_limit + 1e-9;
        if (!rep.collision_ok) {
            std::ostringstream os;
            os << "desired-domain collision: leakage beat " << leak_beat
               << " Hz pushes the desired difference band into the LPF transition band (limit "
               << rep.collision_limit << " Hz)";
            rep.failures.push_back(os.str());
        }
    }

    // Worst-case mixer tone: the leakage-locked NCO sits on the dominant
    // leakage tone, the common NCO on the plan carrier; the higher of the two
    // folds its sum-terms closer to the desired band.
    double mixer = rep.plan_carrier;
    if (dom) mixer = std::max(mixer, rep.scene_carrier + slope * dom->delay);

    bool all_paths_ok = true;
    for (const auto& p : scene.paths) {
        PathCheck c;
        c.kind = p.kind;
        c.delay = p.delay;
        c.beat_freq = slope * p.delay;
        c.tone_freq = rep.scene_carrier + c.beat_freq;
        c.sum_term_raw = c.tone_freq + mixer;
        c.sum_term_folded = fold_frequency(c.sum_term_raw, nfs);
        c.sum_ok = c.sum_term_folded >= lpf.stopband_edge - 1e-9;
        if (!c.sum_ok) {
            std::ostringstream os;
            os << (p.kind == PathKind::leakage ? "leakage" : "target") << " path (delay "
               << p.delay << " s): mixing sum-term at " << c.sum_term_raw << " Hz folds to "
               << c.sum_term_folded << " Hz, inside the LPF stopband edge " << lpf.stopband_edge
               << " Hz";
            rep.failures.push_back(os.str());
            all_paths_ok = false;
        }
        c.diff_term = std::abs(c.tone_freq - rep.plan_carrier);
        c.diff_ok = !(c.diff_term > lpf.passband_edge && c.diff_term < lpf.stopband_edge);
        if (!c.diff_ok) {
            std::ostringstream os;
            os << (p.kind == PathKind::leakage ? "leakage" : "target")
               << " path: desired difference-term at " << c.diff_term
               << " Hz lands inside the LPF transition band (" << lpf.passband_edge << ", "
               << lpf.stopband_edge << ") Hz";
            rep.failures.push_back(os.str());
            all_paths_ok = false;
        }
        rep.paths.push_back(c);
    }

    if (dom) {
        const double tone = rep.scene_carrier + slope * dom->delay;
        if (!(tone > nfs / 4.0 && tone < nfs / 2.0))
            rep.warnings.push_back(
                "dominant leakage tone sits outside the default estimation window "
                "(oversampled_fs/4, oversampled_fs/2); pass explicit window bounds");
    } else {
        rep.warnings.push_back("scene has no leakage path; leakage-locked mixing has no anchor");
    }

    const double rms = noise_phi_rms(scene.noise, 1.0 / scene.chirp.sweep_period, nfs / 2.0);
    if (rms > 0.3) {
        std::ostringstream os;
        os << "phase-noise model rms " << rms
           << " rad breaks the small-angle regime the skirt analysis assumes";
        rep.warnings.push_back(os.str());
    }

    rep.pass = rep.carrier_ok && rep.collision_ok && all_paths_ok && dom != nullptr;
    if (!dom) rep.failures.push_back("scene has no leakage path to lock onto");
    return rep;
}

}  // namespace fmcw
