#include "fmcw/scenario.hpp"

#include "fmcw/analysis.hpp"
#include "fmcw/downconvert.hpp"
#include "fmcw/dsp.hpp"
#include "fmcw/planning.hpp"
#include "fmcw/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace fmcw {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct Ctx {
    std::vector<std::string> errors;
};

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed,
                Ctx& ctx) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) ctx.errors.push_back(path + ": unknown key '" + it.key() + "'");
    }
}

const json* need_obj(const json& j, const std::string& path, const char* key, Ctx& ctx) {
    if (!j.contains(key)) {
        ctx.errors.push_back(path + "." + key + ": missing required object");
        return nullptr;
    }
    if (!j.at(key).is_object()) {
        ctx.errors.push_back(path + "." + key + ": expected an object");
        return nullptr;
    }
    return &j.at(key);
}

double get_num(const json& j, const std::string& path, const char* key, Ctx& ctx,
               std::optional<double> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        ctx.errors.push_back(path + "." + key + ": missing required number");
        return 0.0;
    }
    if (!j.at(key).is_number()) {
        ctx.errors.push_back(path + "." + key + ": expected a number");
        return def.value_or(0.0);
    }
    return j.at(key).get<double>();
}

long long get_int(const json& j, const std::string& path, const char* key, Ctx& ctx,
                  std::optional<long long> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        ctx.errors.push_back(path + "." + key + ": missing required integer");
        return 0;
    }
    if (!j.at(key).is_number_integer()) {
        ctx.errors.push_back(path + "." + key + ": expected an integer");
        return def.value_or(0);
    }
    return j.at(key).get<long long>();
}

std::uint64_t get_u64(const json& j, const std::string& path, const char* key, Ctx& ctx,
                      std::uint64_t def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_number_integer() || (j.at(key).is_number_integer() &&
                                           !j.at(key).is_number_unsigned() &&
                                           j.at(key).get<long long>() < 0)) {
        ctx.errors.push_back(path + "." + key + ": expected a non-negative integer");
        return def;
    }
    return j.at(key).get<std::uint64_t>();
}

std::string get_str(const json& j, const std::string& path, const char* key, Ctx& ctx,
                    std::optional<std::string> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        ctx.errors.push_back(path + "." + key + ": missing required string");
        return {};
    }
    if (!j.at(key).is_string()) {
        ctx.errors.push_back(path + "." + key + ": expected a string");
        return def.value_or(std::string{});
    }
    return j.at(key).get<std::string>();
}

bool get_bool(const json& j, const std::string& path, const char* key, Ctx& ctx, bool def) {
    if (!j.contains(key)) return def;
    if (!j.at(key).is_boolean()) {
        ctx.errors.push_back(path + "." + key + ": expected a boolean");
        return def;
    }
    return j.at(key).get<bool>();
}

std::string join_errors(const std::vector<std::string>& errs) {
    std::string s = "configuration is invalid:";
    for (const auto& e : errs) s += "\n  - " + e;
    return s;
}

std::string format_sig9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::string csv_text(const RangeSpectrum& spec) {
    std::string out = "range_m,power_db\n";
    for (Eigen::Index k = 0; k < spec.power_db.size(); ++k) {
        out += format_sig9(spec.range_axis[k]);
        out += ',';
        out += format_sig9(spec.power_db[k]);
        out += '\n';
    }
    return out;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + p.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw std::runtime_error("short write to " + p.string());
}

ordered_json validation_json(const ValidationReport& r) {
    ordered_json j;
    j["pass"] = r.pass;
    j["scene_carrier_hz"] = r.scene_carrier;
    j["plan_carrier_hz"] = r.plan_carrier;
    j["carrier_ok"] = r.carrier_ok;
    j["collision_ok"] = r.collision_ok;
    j["collision_limit_hz"] = r.collision_limit;
    j["fold_rule"] = r.fold_rule;
    ordered_json rows = ordered_json::array();
    for (const auto& p : r.paths) {
        ordered_json row;
        row["kind"] = p.kind == PathKind::leakage ? "leakage" : "target";
        row["delay_s"] = p.delay;
        row["beat_freq_hz"] = p.beat_freq;
        row["tone_freq_hz"] = p.tone_freq;
        row["sum_term_raw_hz"] = p.sum_term_raw;
        row["sum_term_folded_hz"] = p.sum_term_folded;
        row["sum_ok"] = p.sum_ok;
        row["diff_term_hz"] = p.diff_term;
        row["diff_ok"] = p.diff_ok;
        rows.push_back(row);
    }
    j["paths"] = rows;
    j["failures"] = r.failures;
    j["warnings"] = r.warnings;
    return j;
}

ordered_json peaks_json(const std::vector<Peak>& peaks) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : peaks) {
        ordered_json j;
        j["range_m"] = p.range_m;
        j["power_db"] = p.power_db;
        j["refined_range_m"] = p.refined_range_m;
        j["refined_power_db"] = p.refined_power_db;
        arr.push_back(j);
    }
    return arr;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errs)
    : std::runtime_error(join_errors(errs)), errors(std::move(errs)) {}

ScenarioConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }
    if (!root.is_object()) throw ConfigError({"top level must be a JSON object"});

    Ctx ctx;
    ScenarioConfig cfg;
    check_keys(root, "$",
               {"scene", "plan", "filter", "n_chirps", "techniques", "seed", "output_dir",
                "freeze_estimate", "estimation_window_hz", "exclusion_zone_m"},
               ctx);

    if (const json* scene = need_obj(root, "$", "scene", ctx)) {
        check_keys(*scene, "$.scene", {"chirp", "paths", "noise", "thermal_noise_dbfs"}, ctx);
        if (const json* chirp = need_obj(*scene, "$.scene", "chirp", ctx)) {
            check_keys(*chirp, "$.scene.chirp",
                       {"f_tx_hz", "f_rx_hz", "bandwidth_hz", "sweep_period_s", "amplitude",
                        "const_phase_rad"},
                       ctx);
            cfg.scene.chirp.f_tx = get_num(*chirp, "$.scene.chirp", "f_tx_hz", ctx);
            cfg.scene.chirp.f_rx = get_num(*chirp, "$.scene.chirp", "f_rx_hz", ctx);
            cfg.scene.chirp.bandwidth = get_num(*chirp, "$.scene.chirp", "bandwidth_hz", ctx);
            cfg.scene.chirp.sweep_period = get_num(*chirp, "$.scene.chirp", "sweep_period_s", ctx);
            cfg.scene.chirp.amplitude = get_num(*chirp, "$.scene.chirp", "amplitude", ctx, 1.0);
            cfg.scene.chirp.const_phase =
                get_num(*chirp, "$.scene.chirp", "const_phase_rad", ctx, 0.0);
        }
        if (!scene->contains("paths")) {
            ctx.errors.push_back("$.scene.paths: missing required array");
        } else if (!scene->at("paths").is_array() || scene->at("paths").empty()) {
            ctx.errors.push_back("$.scene.paths: expected a non-empty array");
        } else {
            int i = 0;
            for (const auto& pj : scene->at("paths")) {
                const std::string path = "$.scene.paths[" + std::to_string(i++) + "]";
                if (!pj.is_object()) {
                    ctx.errors.push_back(path + ": expected an object");
                    continue;
                }
                check_keys(pj, path, {"kind", "delay_s", "amplitude_db", "const_phase_rad"}, ctx);
                ScatteringPath p;
                const std::string kind = get_str(pj, path, "kind", ctx);
                if (kind == "leakage")
                    p.kind = PathKind::leakage;
                else if (kind == "target")
                    p.kind = PathKind::target;
                else if (!kind.empty())
                    ctx.errors.push_back(path + ".kind: must be 'leakage' or 'target'");
                p.delay = get_num(pj, path, "delay_s", ctx);
                p.amplitude = std::pow(10.0, get_num(pj, path, "amplitude_db", ctx, 0.0) / 20.0);
                p.const_phase = get_num(pj, path, "const_phase_rad", ctx, 0.0);
                cfg.scene.paths.push_back(p);
            }
        }
        if (scene->contains("noise")) {
            if (!scene->at("noise").is_object()) {
                ctx.errors.push_back("$.scene.noise: expected an object");
            } else {
                const json& nj = scene->at("noise");
                check_keys(nj, "$.scene.noise",
                           {"psd_anchor_dbc_hz", "anchor_offset_hz", "slope_db_per_decade",
                            "cutoff_hz", "seed"},
                           ctx);
                cfg.scene.noise.psd_anchor_dbc_hz =
                    get_num(nj, "$.scene.noise", "psd_anchor_dbc_hz", ctx);
                cfg.scene.noise.anchor_offset =
                    get_num(nj, "$.scene.noise", "anchor_offset_hz", ctx, 1e4);
                cfg.scene.noise.slope =
                    get_num(nj, "$.scene.noise", "slope_db_per_decade", ctx, -20.0);
                cfg.scene.noise.cutoff = get_num(nj, "$.scene.noise", "cutoff_hz", ctx, 1e6);
                cfg.scene.noise.seed = get_u64(nj, "$.scene.noise", "seed", ctx, 0);
            }
        }
        cfg.scene.thermal_noise_dbfs =
            get_num(*scene, "$.scene", "thermal_noise_dbfs", ctx, -1e300);
    }

    if (const json* plan = need_obj(root, "$", "plan", ctx)) {
        check_keys(*plan, "$.plan", {"base_fs_hz", "n_factor", "band_index", "nfft"}, ctx);
        cfg.plan.base_fs = get_num(*plan, "$.plan", "base_fs_hz", ctx);
        cfg.plan.n_factor = static_cast<int>(get_int(*plan, "$.plan", "n_factor", ctx));
        cfg.plan.band_index = static_cast<int>(get_int(*plan, "$.plan", "band_index", ctx));
        cfg.plan.nfft = static_cast<int>(get_int(*plan, "$.plan", "nfft", ctx));
    }

    if (const json* filt = need_obj(root, "$", "filter", ctx)) {
        check_keys(*filt, "$.filter",
                   {"order", "passband_edge_hz", "stopband_edge_hz", "passband_atten_db",
                    "stopband_atten_db", "attenuation_convention"},
                   ctx);
        cfg.filter.order = static_cast<int>(get_int(*filt, "$.filter", "order", ctx));
        cfg.filter.passband_edge = get_num(*filt, "$.filter", "passband_edge_hz", ctx);
        cfg.filter.stopband_edge = get_num(*filt, "$.filter", "stopband_edge_hz", ctx);
        cfg.filter.passband_atten_db = get_num(*filt, "$.filter", "passband_atten_db", ctx);
        cfg.filter.stopband_atten_db = get_num(*filt, "$.filter", "stopband_atten_db", ctx);
        cfg.attenuation_convention =
            get_str(*filt, "$.filter", "attenuation_convention", ctx, "single_pass");
        if (cfg.attenuation_convention != "single_pass" &&
            cfg.attenuation_convention != "combined")
            ctx.errors.push_back(
                "$.filter.attenuation_convention: must be 'single_pass' or 'combined'");
    }

    cfg.n_chirps = static_cast<int>(get_int(root, "$", "n_chirps", ctx));
    if (root.contains("n_chirps") && cfg.n_chirps < 1)
        ctx.errors.push_back("$.n_chirps: must be >= 1");

    if (root.contains("techniques")) {
        cfg.techniques.clear();
        if (!root.at("techniques").is_array()) {
            ctx.errors.push_back("$.techniques: expected an array");
        } else {
            for (const auto& t : root.at("techniques")) {
                if (!t.is_string() ||
                    (t.get<std::string>() != "common" && t.get<std::string>() != "proposed")) {
                    ctx.errors.push_back("$.techniques: entries must be 'common' or 'proposed'");
                    continue;
                }
                const auto s = t.get<std::string>();
                if (std::find(cfg.techniques.begin(), cfg.techniques.end(), s) ==
                    cfg.techniques.end())
                    cfg.techniques.push_back(s);
            }
            if (cfg.techniques.empty())
                ctx.errors.push_back("$.techniques: at least one technique required");
        }
    }

    cfg.seed = get_u64(root, "$", "seed", ctx, 0);
    cfg.output_dir = get_str(root, "$", "output_dir", ctx, std::string("out"));
    cfg.freeze_estimate = get_bool(root, "$", "freeze_estimate", ctx, false);

    if (root.contains("estimation_window_hz")) {
        const auto& w = root.at("estimation_window_hz");
        if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number() ||
            !(w[0].get<double>() >= 0.0) || !(w[0].get<double>() < w[1].get<double>())) {
            ctx.errors.push_back("$.estimation_window_hz: expected [lo, hi] with 0 <= lo < hi");
        } else {
            cfg.estimation_window_hz = {w[0].get<double>(), w[1].get<double>()};
        }
    }
    if (root.contains("exclusion_zone_m")) {
        if (!root.at("exclusion_zone_m").is_number() ||
            !(root.at("exclusion_zone_m").get<double>() >= 0.0))
            ctx.errors.push_back("$.exclusion_zone_m: expected a non-negative number");
        else
            cfg.exclusion_zone_m = root.at("exclusion_zone_m").get<double>();
    }

    if (ctx.errors.empty()) {
        try {
            validate_scene(cfg.scene);
        } catch (const std::exception& e) {
            ctx.errors.push_back(std::string("$.scene: ") + e.what());
        }
        try {
            make_plan(cfg.plan.base_fs, cfg.plan.n_factor, cfg.plan.band_index, cfg.plan.nfft);
        } catch (const std::exception& e) {
            ctx.errors.push_back(std::string("$.plan: ") + e.what());
        }
        FilterSpec probe = cfg.filter;
        probe.rate = cfg.plan.base_fs * cfg.plan.n_factor;
        if (probe.rate > 0.0) {
            try {
                design_butterworth_lowpass(probe);
            } catch (const std::exception& e) {
                ctx.errors.push_back(std::string("$.filter: ") + e.what());
            }
        }
    }

    if (!ctx.errors.empty()) throw ConfigError(std::move(ctx.errors));
    return cfg;
}

namespace {

constexpr const char* kExperimentA = R"json({
  "scene": {
    "chirp": {
      "f_tx_hz": 14352500000.0,
      "f_rx_hz": 14350000000.0,
      "bandwidth_hz": 150000000.0,
      "sweep_period_s": 0.00086,
      "amplitude": 1.0,
      "const_phase_rad": 0.0
    },
    "paths": [
      { "kind": "leakage", "delay_s": 8.593e-08, "amplitude_db": 0.0, "const_phase_rad": 0.0 }
    ],
    "noise": {
      "psd_anchor_dbc_hz": -75.4,
      "anchor_offset_hz": 10000.0,
      "slope_db_per_decade": -20.0,
      "cutoff_hz": 1000000.0,
      "seed": 1234
    },
    "thermal_noise_dbfs": -160.0
  },
  "plan": { "base_fs_hz": 2500000.0, "n_factor": 4, "band_index": 0, "nfft": 65536 },
  "filter": {
    "order": 11,
    "passband_edge_hz": 1875000.0,
    "stopband_edge_hz": 2500000.0,
    "passband_atten_db": 1.0,
    "stopband_atten_db": 30.0
  },
  "n_chirps": 100,
  "techniques": ["common", "proposed"],
  "seed": 42,
  "output_dir": "out_experiment_a"
}
)json";

constexpr const char* kExperimentB = R"json({
  "scene": {
    "chirp": {
      "f_tx_hz": 14350500000.0,
      "f_rx_hz": 14350000000.0,
      "bandwidth_hz": 150000000.0,
      "sweep_period_s": 0.0003,
      "amplitude": 1.0,
      "const_phase_rad": 0.0
    },
    "paths": [
      { "kind": "leakage", "delay_s": 8.593e-08, "amplitude_db": 0.0, "const_phase_rad": 0.0 },
      { "kind": "target", "delay_s": 5.72933578989302e-07, "amplitude_db": -30.0, "const_phase_rad": 0.0 }
    ],
    "noise": {
      "psd_anchor_dbc_hz": -75.4,
      "anchor_offset_hz": 10000.0,
      "slope_db_per_decade": -20.0,
      "cutoff_hz": 1000000.0,
      "seed": 1234
    },
    "thermal_noise_dbfs": -160.0
  },
  "plan": { "base_fs_hz": 500000.0, "n_factor": 4, "band_index": 0, "nfft": 4096 },
  "filter": {
    "order": 11,
    "passband_edge_hz": 375000.0,
    "stopband_edge_hz": 500000.0,
    "passband_atten_db": 1.0,
    "stopband_atten_db": 30.0
  },
  "n_chirps": 10,
  "techniques": ["common", "proposed"],
  "seed": 42,
  "output_dir": "out_experiment_b"
}
)json";

}  // namespace

std::string preset_json(const std::string& name) {
    if (name == "experiment_a") return kExperimentA;
    if (name == "experiment_b") return kExperimentB;
    throw ConfigError({"unknown preset '" + name + "' (available: experiment_a, experiment_b)"});
}

ScenarioConfig preset_config(const std::string& name) { return parse_config(preset_json(name)); }

RunResult run_scenario(const ScenarioConfig& config) {
    RunResult res;

    res.plan = make_plan(config.plan.base_fs, config.plan.n_factor, config.plan.band_index,
                         config.plan.nfft, &res.warnings);

    FilterSpec fspec = config.filter;
    fspec.rate = res.plan.oversampled_fs;
    if (config.attenuation_convention == "combined") {
        fspec.passband_atten_db /= 2.0;
        fspec.stopband_atten_db /= 2.0;
    }
    const FilterCoefficients lpf = design_butterworth_lowpass(fspec);

    RadarScene scene = config.scene;
    validate_scene(scene, &res.warnings);
    res.validation = validate_plan(res.plan, scene, fspec);
    if (!res.validation.pass) {
        std::string msg = "frequency plan failed validation:";
        for (const auto& f : res.validation.failures) msg += "\n  - " + f;
        throw std::runtime_error(msg);
    }

    // Fold the run seed into the noise seed so --seed alone changes the run.
    scene.noise.seed ^= (config.seed + 0x9E3779B97F4A7C15ull) * 0xBF58476D1CE4E5B9ull;

    const double tau_int = dominant_leakage(scene).delay;
    res.r_internal = kSpeedOfLight * tau_int / 2.0;
    res.r_max = range_of_beat(res.plan.base_fs / 2.0, scene.chirp);
    res.phi_rms = noise_phi_rms(scene.noise, 1.0 / scene.chirp.sweep_period,
                                res.plan.oversampled_fs / 2.0);

    const bool want_common = std::find(config.techniques.begin(), config.techniques.end(),
                                       "common") != config.techniques.end();
    const bool want_proposed = std::find(config.techniques.begin(), config.techniques.end(),
                                         "proposed") != config.techniques.end();
    const double win_lo = config.estimation_window_hz ? config.estimation_window_hz->first : -1.0;
    const double win_hi = config.estimation_window_hz ? config.estimation_window_hz->second : -1.0;

    std::vector<BasebandBlock> common_blocks, proposed_blocks;
    std::optional<LeakageEstimate> frozen;
    for (int ci = 0; ci < config.n_chirps; ++ci) {
        const IfSampleBlock block = synthesize_if_block(scene, res.plan, ci);
        if (want_common) common_blocks.push_back(common_downconvert(block, res.plan, lpf));
        if (want_proposed) {
            if (config.freeze_estimate) {
                if (!frozen) frozen = estimate_leakage_tone(block, res.plan, win_lo, win_hi);
                proposed_blocks.push_back(proposed_downconvert(block, res.plan, lpf, *frozen));
            } else {
                proposed_blocks.push_back(
                    proposed_downconvert(block, res.plan, lpf, win_lo, win_hi));
            }
            res.estimates.push_back(*proposed_blocks.back().applied_estimate);
        }
    }

    if (want_common)
        res.spectra["common"] = averaged_power_spectrum(common_blocks, scene.chirp);
    if (want_proposed)
        res.spectra["proposed"] = averaged_power_spectrum(proposed_blocks, scene.chirp);
    for (const auto& [tech, spec] : res.spectra) res.peaks[tech] = detect_peaks(spec);

    if (want_common && want_proposed) {
        const double excl = config.exclusion_zone_m
                                ? *config.exclusion_zone_m
                                : default_exclusion_zone(res.spectra.at("common"));
        const double upper = res.r_max - res.r_internal;
        res.noise_floor = noise_floor_difference(res.spectra.at("common"),
                                                 res.spectra.at("proposed"), excl, upper);
    }

    for (const auto& p : scene.paths) {
        if (p.kind != PathKind::target) continue;
        const double r_target = kSpeedOfLight * (p.delay - tau_int) / 2.0;
        try {
            res.alias_predictions.push_back(predict_alias(r_target, res.r_internal, res.r_max));
        } catch (const std::exception& e) {
            res.warnings.push_back("alias prediction for target at " + std::to_string(r_target) +
                                   " m: " + e.what());
        }
    }

    ordered_json j;
    j["schema_version"] = 1;
    j["seed"] = config.seed;
    j["n_chirps"] = config.n_chirps;
    j["techniques"] = config.techniques;
    j["freeze_estimate"] = config.freeze_estimate;
    {
        ordered_json pj;
        pj["base_fs_hz"] = res.plan.base_fs;
        pj["n_factor"] = res.plan.n_factor;
        pj["band_index"] = res.plan.band_index;
        pj["oversampled_fs_hz"] = res.plan.oversampled_fs;
        pj["if_carrier_hz"] = res.plan.if_carrier;
        pj["nfft"] = res.plan.nfft;
        j["plan"] = pj;
    }
    {
        ordered_json fj;
        fj["order"] = fspec.order;
        fj["rate_hz"] = fspec.rate;
        fj["passband_edge_hz"] = fspec.passband_edge;
        fj["stopband_edge_hz"] = fspec.stopband_edge;
        fj["passband_atten_db"] = fspec.passband_atten_db;
        fj["stopband_atten_db"] = fspec.stopband_atten_db;
        fj["attenuation_convention"] = config.attenuation_convention;
        fj["dc_gain"] = lpf.dc_gain;
        fj["max_pole_radius"] = lpf.max_pole_radius;
        fj["single_pass_passband_db"] =
            filter_response_db(lpf, fspec.passband_edge, fspec.rate);
        fj["single_pass_stopband_db"] =
            filter_response_db(lpf, fspec.stopband_edge, fspec.rate);
        j["filter"] = fj;
    }
    j["noise_model"] = {{"enabled", noise_enabled(config.scene.noise)},
                        {"phi_rms_rad", res.phi_rms}};
    j["range_bin_m"] = res.spectra.empty()
                           ? 0.0
                           : res.spectra.begin()->second.range_axis[1] -
                                 res.spectra.begin()->second.range_axis[0];
    j["r_max_m"] = res.r_max;
    j["r_internal_m"] = res.r_internal;
    j["validation"] = validation_json(res.validation);
    j["warnings"] = res.warnings;

    if (want_proposed) {
        ordered_json arr = ordered_json::array();
        for (std::size_t i = 0; i < res.estimates.size(); ++i) {
            ordered_json e;
            e["chirp"] = i;
            e["bin_index"] = res.estimates[i].bin_index;
            e["if_beat_freq_hz"] = res.estimates[i].if_beat_freq;
            e["const_phase_rad"] = res.estimates[i].const_phase;
            arr.push_back(e);
        }
        j["estimates"] = arr;
    } else {
        j["estimates"] = nullptr;
    }

    {
        ordered_json pk;
        for (const auto& [tech, peaks] : res.peaks) pk[tech] = peaks_json(peaks);
        j["peaks"] = pk;
    }

    if (res.noise_floor) {
        const auto& nf = *res.noise_floor;
        ordered_json nj;
        nj["exclusion_zone_m"] = nf.exclusion_zone;
        nj["support_start_m"] = nf.support_range_m[0];
        nj["support_end_m"] = nf.support_range_m[nf.support_range_m.size() - 1];
        nj["n_support_bins"] = nf.support_range_m.size();
        nj["fit_coeffs"] = std::vector<double>(nf.fit_coeffs.data(), nf.fit_coeffs.data() + 9);
        nj["max_improvement_db"] = nf.max_improvement_db;
        nj["min_improvement_db"] = nf.min_improvement_db;
        nj["fit_near_db"] = nf.fit_near_db;
        nj["fit_far_db"] = nf.fit_far_db;
        nj["diff_db"] = std::vector<double>(nf.diff_db.data(), nf.diff_db.data() + nf.diff_db.size());
        j["noise_floor"] = nj;
    } else {
        j["noise_floor"] = nullptr;
    }

    {
        ordered_json arr = ordered_json::array();
        for (const auto& a : res.alias_predictions) {
            ordered_json e;
            e["target_range_m"] = a.apparent - res.r_internal;
            e["apparent_m"] = a.apparent;
            e["observed_m"] = a.observed;
            e["aliased"] = a.aliased;
            e["usable_max_m"] = a.usable_max;
            arr.push_back(e);
        }
        j["alias_predictions"] = arr;
    }

    {
        ordered_json files;
        for (const auto& [tech, spec] : res.spectra)
            files[tech] = "spectrum_" + tech + ".csv";
        j["spectra_files"] = files;
    }
    res.summary = j;

    if (!config.output_dir.empty()) {
        const std::filesystem::path dir(config.output_dir);
        std::filesystem::create_directories(dir);
        for (const auto& [tech, spec] : res.spectra) {
            const auto p = dir / ("spectrum_" + tech + ".csv");
            write_bytes(p, csv_text(spec));
            res.files_written.push_back(p.string());
        }
        const auto sp = dir / "summary.json";
        write_bytes(sp, res.summary.dump(2) + "\n");
        res.files_written.push_back(sp.string());
    }
    return res;
}

}  // namespace fmcw
