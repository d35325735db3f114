#include "fhss/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "fhss/common.hpp"
#include "json.hpp"

namespace fhss {

namespace {

using nlohmann::json;

json source_to_json(const SourceProfile& p) {
    return json{
        {"dwell_time_s", p.dwell_time_s},
        {"guard_times_s", p.guard_times_s},
        {"fundamental_period_s", p.fundamental_period_s},
        {"frequency_set_hz", p.frequency_set_hz},
        {"hop_sequence", p.hop_sequence},
        {"waveform", to_string(p.waveform)},
        {"symbol_rate_hz", p.symbol_rate_hz},
        {"rrc_beta", p.rrc_beta},
        {"tone_spacing_hz", p.tone_spacing_hz},
        {"power_db", p.power_db},
        {"start_offset_s", p.start_offset_s},
        {"randomize_phase", p.randomize_phase},
    };
}

SourceProfile source_from_json(const json& j) {
    SourceProfile p;
    p.dwell_time_s = j.at("dwell_time_s").get<double>();
    const auto guards = j.at("guard_times_s").get<std::vector<double>>();
    if (guards.size() != 3) throw ConfigError("guard_times_s must hold exactly 3 values");
    std::copy(guards.begin(), guards.end(), p.guard_times_s.begin());
    p.fundamental_period_s = j.at("fundamental_period_s").get<double>();
    p.frequency_set_hz = j.at("frequency_set_hz").get<std::vector<double>>();
    p.hop_sequence = j.at("hop_sequence").get<std::vector<int>>();
    if (j.contains("waveform")) p.waveform = waveform_from_string(j.at("waveform").get<std::string>());
    p.symbol_rate_hz = j.value("symbol_rate_hz", 0.0);
    p.rrc_beta = j.value("rrc_beta", 0.35);
    p.tone_spacing_hz = j.value("tone_spacing_hz", 0.0);
    p.power_db = j.value("power_db", 0.0);
    p.start_offset_s = j.value("start_offset_s", 0.0);
    p.randomize_phase = j.value("randomize_phase", true);
    return p;
}

json channel_to_json(const ChannelConfig& c) {
    json j{
        {"noise_power_db", c.noise_power_db},
        {"cfo_hz", c.cfo_hz},
        {"rng_seed", c.rng_seed},
    };
    if (c.snr_db) j["snr_db"] = *c.snr_db;
    json taps = json::array();
    for (const auto& t : c.multipath)
        taps.push_back({{"delay_samples", t.delay_samples},
                        {"gain", {t.gain.real(), t.gain.imag()}}});
    j["multipath"] = taps;
    json bursts = json::array();
    for (const auto& b : c.interference)
        bursts.push_back({{"center_offset_hz", b.center_offset_hz},
                          {"bandwidth_hz", b.bandwidth_hz},
                          {"power_db", b.power_db},
                          {"duty", b.duty},
                          {"period_s", b.period_s}});
    j["interference"] = bursts;
    return j;
}

ChannelConfig channel_from_json(const json& j) {
    ChannelConfig c;
    if (j.contains("snr_db") && !j.at("snr_db").is_null())
        c.snr_db = j.at("snr_db").get<double>();
    c.noise_power_db = j.value("noise_power_db", 0.0);
    c.cfo_hz = j.value("cfo_hz", 0.0);
    c.rng_seed = j.value("rng_seed", std::uint64_t{0});
    if (j.contains("multipath")) {
        for (const auto& t : j.at("multipath")) {
            MultipathTap tap;
            tap.delay_samples = t.at("delay_samples").get<std::size_t>();
            const auto g = t.at("gain").get<std::vector<double>>();
            if (g.size() != 2) throw ConfigError("multipath gain must be [re, im]");
            tap.gain = {g[0], g[1]};
            c.multipath.push_back(tap);
        }
    }
    if (j.contains("interference")) {
        for (const auto& b : j.at("interference")) {
            InterferenceBurst burst;
            burst.center_offset_hz = b.at("center_offset_hz").get<double>();
            burst.bandwidth_hz = b.at("bandwidth_hz").get<double>();
            burst.power_db = b.value("power_db", 0.0);
            burst.duty = b.value("duty", 0.5);
            burst.period_s = b.value("period_s", 1e-3);
            c.interference.push_back(burst);
        }
    }
    return c;
}

}  // namespace

void validate(const Scenario& scenario) {
    if (!(scenario.duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    if (!(scenario.sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
    if (scenario.center_frequency_hz < 0.0)
        throw ConfigError("center_frequency_hz must be >= 0");
    for (const auto& src : scenario.sources) validate(src);
    validate(scenario.channel);
}

Scenario scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad scenario JSON in " + path + ": " + e.what());
    }
    Scenario s;
    try {
        s.duration_s = j.at("duration_s").get<double>();
        s.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        s.center_frequency_hz = j.value("center_frequency_hz", 0.0);
        s.capture_id = j.value("capture_id", std::string("synthetic"));
        s.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("sources"))
            for (const auto& src : j.at("sources")) s.sources.push_back(source_from_json(src));
        if (j.contains("channel")) s.channel = channel_from_json(j.at("channel"));
    } catch (const json::exception& e) {
        throw ConfigError("bad scenario field in " + path + ": " + e.what());
    }
    for (std::size_t i = 0; i < s.sources.size(); ++i)
        s.sources[i].source_id = static_cast<int>(i);
    validate(s);
    return s;
}

void scenario_to_json_file(const Scenario& scenario, const std::string& path) {
    json j{
        {"duration_s", scenario.duration_s},
        {"sample_rate_hz", scenario.sample_rate_hz},
        {"center_frequency_hz", scenario.center_frequency_hz},
        {"capture_id", scenario.capture_id},
        {"seed", scenario.seed},
        {"channel", channel_to_json(scenario.channel)},
    };
    json sources = json::array();
    for (const auto& src : scenario.sources) sources.push_back(source_to_json(src));
    j["sources"] = sources;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create scenario file: " + path);
    out << j.dump(2) << "\n";
}

std::vector<HopPlanEntry> build_truth(const Scenario& scenario) {
    validate(scenario);
    std::vector<HopPlanEntry> truth;
    for (std::size_t i = 0; i < scenario.sources.size(); ++i) {
        SourceProfile profile = scenario.sources[i];
        profile.source_id = static_cast<int>(i);
        auto plan = build_hop_plan(profile, scenario.duration_s, profile.start_offset_s);
        if (profile.randomize_phase)
            assign_random_phases(plan, mix_seed(scenario.seed, 0x70686173));
        truth.insert(truth.end(), plan.begin(), plan.end());
    }
    std::sort(truth.begin(), truth.end(), [](const HopPlanEntry& a, const HopPlanEntry& b) {
        if (a.start_time_s != b.start_time_s) return a.start_time_s < b.start_time_s;
        return a.source_id < b.source_id;
    });
    return truth;
}

void truth_to_json_file(const Scenario& scenario, const std::vector<HopPlanEntry>& truth,
                        const std::string& path) {
    json hops = json::array();
    for (const auto& h : truth)
        hops.push_back({{"start_time_s", h.start_time_s},
                        {"dwell_time_s", h.dwell_time_s},
                        {"carrier_offset_hz", h.carrier_offset_hz},
                        {"phase_rad", h.phase_rad},
                        {"source_id", h.source_id}});
    json j{
        {"sample_rate_hz", scenario.sample_rate_hz},
        {"center_frequency_hz", scenario.center_frequency_hz},
        {"capture_id", scenario.capture_id},
        {"hops", hops},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create truth file: " + path);
    out << j.dump(2) << "\n";
}

TruthFile truth_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open truth file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad truth JSON in " + path + ": " + e.what());
    }
    TruthFile t;
    try {
        t.sample_rate_hz = j.value("sample_rate_hz", 0.0);
        t.center_frequency_hz = j.value("center_frequency_hz", 0.0);
        t.capture_id = j.value("capture_id", std::string());
        for (const auto& h : j.at("hops")) {
            HopPlanEntry e;
            e.start_time_s = h.at("start_time_s").get<double>();
            e.dwell_time_s = h.at("dwell_time_s").get<double>();
            e.carrier_offset_hz = h.at("carrier_offset_hz").get<double>();
            e.phase_rad = h.value("phase_rad", 0.0);
            e.source_id = h.value("source_id", 0);
            t.hops.push_back(e);
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad truth field in " + path + ": " + e.what());
    }
    return t;
}

IqRecording synthesize(const Scenario& scenario) {
    return synthesize(scenario, build_truth(scenario));
}

IqRecording synthesize(const Scenario& scenario, const std::vector<HopPlanEntry>& truth) {
    validate(scenario);
    std::vector<SourceProfile> profiles = scenario.sources;
    for (std::size_t i = 0; i < profiles.size(); ++i) profiles[i].source_id = static_cast<int>(i);

    IqRecording clean;
    if (profiles.empty()) {
        clean.sample_rate_hz = scenario.sample_rate_hz;
        clean.center_frequency_hz = scenario.center_frequency_hz;
        clean.samples.assign(
            static_cast<std::size_t>(std::llround(scenario.duration_s * scenario.sample_rate_hz)),
            {0.0f, 0.0f});
    } else {
        clean = render(truth, profiles, scenario.sample_rate_hz, scenario.seed,
                       scenario.duration_s, scenario.center_frequency_hz);
    }
    clean.capture_id = scenario.capture_id;

    ChannelConfig channel = scenario.channel;
    if (channel.rng_seed == 0) channel.rng_seed = mix_seed(scenario.seed, 0xc4a1);
    return apply_channel(clean, channel);
}

namespace {

// Carrier sets follow the measured controller: offsets from a 2.44 GHz band
// center, repeated entries matching the f1 f1 f2 f3 f3 f4 sequence.
SourceProfile futaba_profile(double freq_scale) {
    SourceProfile p;
    p.dwell_time_s = 1.44e-3;
    p.guard_times_s = {0.5e-3, 0.8e-3, 1.18e-3};
    p.fundamental_period_s = 6.8e-3;
    p.frequency_set_hz = {1.4e6 * freq_scale, -18.9e6 * freq_scale, -36.1e6 * freq_scale,
                          -12.9e6 * freq_scale};
    p.hop_sequence = {0, 0, 1, 2, 2, 3};
    // ~1.7 MHz occupied. The multitone payload keeps the per-cell spectrum
    // deterministic, matching the solid blocks a controller shows on an
    // analyzer; qpsk_rrc is available through scenario files.
    p.waveform = Waveform::multitone;
    p.symbol_rate_hz = 1.6e6 * freq_scale;
    p.rrc_beta = 0.0625;
    return p;
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
    Scenario s;
    s.duration_s = 0.0495;  // 22 whole hops; 50 ms would start a 23rd, clipped runt
    s.center_frequency_hz = 2.44e9;
    s.capture_id = name;

    if (name == "futaba-fidelity") {
        s.sample_rate_hz = 80e6;
        s.sources = {futaba_profile(1.0)};
        s.channel.snr_db = 5.0;
        s.channel.cfo_hz = 500.0;
    } else if (name == "futaba-desk") {
        s.sample_rate_hz = 8e6;
        s.sources = {futaba_profile(0.1)};
        s.channel.snr_db = 5.0;
        s.channel.cfo_hz = 50.0;
    } else if (name == "twin-source") {
        s.sample_rate_hz = 8e6;
        SourceProfile a = futaba_profile(0.1);
        a.waveform = Waveform::cw;  // constant-envelope hops keep the masks crisp
        a.symbol_rate_hz = 0.0;
        SourceProfile b = a;
        b.frequency_set_hz = {3.05e6, 1.02e6, 2.28e6, 3.60e6};
        b.start_offset_s = 3.4e-3;
        s.sources = {a, b};
    } else if (name == "noise") {
        s.sample_rate_hz = 8e6;
        s.channel.snr_db = 0.0;  // no signal to reference: noise_power_db applies
        s.channel.noise_power_db = 0.0;
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    for (std::size_t i = 0; i < s.sources.size(); ++i)
        s.sources[i].source_id = static_cast<int>(i);
    return s;
}

std::vector<std::string> preset_names() {
    return {"futaba-fidelity", "futaba-desk", "twin-source", "noise"};
}

}  // namespace fhss
