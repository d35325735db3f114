#include <cmath>
#include <complex>
#include <cstring>
#include <random>

#include "doctest.h"
#include "fhss/common.hpp"
#include "fhss/scenario.hpp"
#include "fhss/spectrogram.hpp"
#include "fhss/synth.hpp"

using namespace fhss;

namespace {

SourceProfile cw_profile() {
    SourceProfile p;
    p.dwell_time_s = 1.44e-3;
    p.guard_times_s = {0.5e-3, 0.8e-3, 1.18e-3};
    p.fundamental_period_s = 6.8e-3;
    p.frequency_set_hz = {0.14e6, -1.89e6, -3.61e6, -1.29e6};
    p.hop_sequence = {0, 0, 1, 2, 2, 3};
    p.symbol_rate_hz = 0.0;  // constant envelope
    return p;
}

// Straightforward enumeration of the expected hop starts, independent of the
// planner's loop structure.
std::vector<double> expected_starts(const SourceProfile& p, double duration) {
    std::vector<double> starts;
    const double d1 = p.dwell_time_s + p.guard_times_s[0];
    const double d2 = 2.0 * p.dwell_time_s + p.guard_times_s[0] + p.guard_times_s[1];
    for (int k = 0;; ++k) {
        const double base = k * p.fundamental_period_s;
        for (double off : {0.0, d1, d2}) {
            if (base + off >= duration) return starts;
            starts.push_back(base + off);
        }
    }
}

}  // namespace

TEST_CASE("a 50 ms plan carries exactly 22 whole hops") {
    const SourceProfile p = cw_profile();
    const auto plan = build_hop_plan(p, 0.050);

    const auto starts = expected_starts(p, 0.050);
    REQUIRE(plan.size() == starts.size());
    for (std::size_t i = 0; i < plan.size(); ++i)
        CHECK(plan[i].start_time_s == doctest::Approx(starts[i]).epsilon(1e-12));

    std::size_t whole = 0;
    for (const auto& h : plan)
        if (h.dwell_time_s == doctest::Approx(p.dwell_time_s).epsilon(1e-12)) ++whole;
    CHECK(whole == 22);

    // Carrier sequence follows f1 f1 f2 f3 f3 f4 cyclically.
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const int idx = p.hop_sequence[i % p.hop_sequence.size()];
        CHECK(plan[i].carrier_offset_hz == p.frequency_set_hz[static_cast<std::size_t>(idx)]);
    }
}

TEST_CASE("one fundamental period holds exactly three hops") {
    const SourceProfile p = cw_profile();
    const auto plan = build_hop_plan(p, p.fundamental_period_s);
    CHECK(plan.size() == 3);
}

TEST_CASE("a dwell crossing the end is truncated") {
    const SourceProfile p = cw_profile();
    const auto plan = build_hop_plan(p, 0.5 * p.dwell_time_s);
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].dwell_time_s == doctest::Approx(0.5 * p.dwell_time_s));
}

TEST_CASE("profile validation enforces the timing identities") {
    SourceProfile p = cw_profile();
    p.guard_times_s = {0.8e-3, 0.5e-3, 1.18e-3};  // out of order
    CHECK_THROWS_AS(validate(p), ConfigError);

    p = cw_profile();
    p.fundamental_period_s = 6.9e-3;  // breaks 3*dwell + guards == T1
    CHECK_THROWS_AS(validate(p), ConfigError);

    p = cw_profile();
    p.frequency_set_hz.clear();
    CHECK_THROWS_AS(build_hop_plan(p, 0.01), ConfigError);
}

TEST_CASE("pattern start differences stay congruent to the three slot offsets") {
    std::mt19937_64 gen(61);
    std::uniform_real_distribution<double> dwell_d(0.4e-3, 2.0e-3), guard_d(0.1e-3, 1.0e-3);
    for (int trial = 0; trial < 25; ++trial) {
        SourceProfile p = cw_profile();
        p.dwell_time_s = dwell_d(gen);
        double g1 = guard_d(gen), g2 = guard_d(gen), g3 = guard_d(gen);
        const double lo = std::min({g1, g2, g3}), hi = std::max({g1, g2, g3});
        const double mid = g1 + g2 + g3 - lo - hi;
        p.guard_times_s = {lo, mid + 1e-6, hi + 2e-6};
        p.fundamental_period_s = 3.0 * p.dwell_time_s + p.guard_times_s[0] +
                                 p.guard_times_s[1] + p.guard_times_s[2];
        const auto plan = build_hop_plan(p, 10.0 * p.fundamental_period_s);

        const double t1 = p.fundamental_period_s;
        const double d1 = p.dwell_time_s + p.guard_times_s[0];
        const double d2 = 2.0 * p.dwell_time_s + p.guard_times_s[0] + p.guard_times_s[1];
        for (std::size_t a = 0; a < plan.size(); ++a) {
            for (std::size_t b = a + 1; b < plan.size(); ++b) {
                double diff = std::fmod(plan[b].start_time_s - plan[a].start_time_s, t1);
                bool ok = false;
                for (double slot : {0.0, d1, d2, t1 - d1, t1 - d2, d2 - d1, t1 - (d2 - d1)}) {
                    if (std::abs(diff - slot) < 1e-9 || std::abs(diff - slot + t1) < 1e-9 ||
                        std::abs(diff - slot - t1) < 1e-9)
                        ok = true;
                }
                CHECK(ok);
            }
        }
    }
}

TEST_CASE("a constant-envelope hop renders as ones inside the dwell") {
    HopPlanEntry hop;
    hop.start_time_s = 1e-3;
    hop.dwell_time_s = 1e-3;
    hop.carrier_offset_hz = 0.0;
    hop.phase_rad = 0.0;

    SourceProfile p = cw_profile();
    const double fs = 1e6;
    const IqRecording rec = render({hop}, p, fs, 1, 3e-3);
    REQUIRE(rec.size() == 3000);
    for (std::size_t n = 0; n < rec.size(); ++n) {
        if (n >= 1000 && n < 2000) {
            CHECK(rec.samples[n].real() == doctest::Approx(1.0f));
            CHECK(rec.samples[n].imag() == doctest::Approx(0.0f).epsilon(1e-4));
        } else {
            CHECK(rec.samples[n] == std::complex<float>(0.0f, 0.0f));
        }
    }
}

TEST_CASE("a rendered tone lands in the right spectrogram bin") {
    SourceProfile p = cw_profile();
    const double fs = 8e6;
    HopPlanEntry hop;
    hop.start_time_s = 0.0;
    hop.dwell_time_s = 2e-3;
    hop.carrier_offset_hz = p.frequency_set_hz[1];  // -1.89 MHz

    const IqRecording rec = render({hop}, p, fs, 1, 2e-3);
    StftConfig cfg;
    cfg.window_size = 1024;
    cfg.overlap = 512;
    const Spectrogram spec = compute_spectrogram(rec, cfg);
    std::size_t argmax = 0;
    for (std::size_t r = 1; r < spec.rows; ++r)
        if (spec.at(r, 0) > spec.at(argmax, 0)) argmax = r;
    CHECK(std::abs(spec.bin_freqs_hz[argmax] - hop.carrier_offset_hz) <= spec.bin_width_hz());
}

TEST_CASE("rendering is additive over sources") {
    SourceProfile a = cw_profile();
    a.source_id = 0;
    SourceProfile b = cw_profile();
    b.source_id = 1;
    b.frequency_set_hz = {3.05e6, 1.02e6, 2.28e6, 3.60e6};
    b.start_offset_s = 3.4e-3;
    b.symbol_rate_hz = 125e3;  // shaped waveform on one source

    const double fs = 8e6, dur = 0.02;
    const std::vector<SourceProfile> profiles{a, b};
    auto plan_a = build_hop_plan(a, dur, a.start_offset_s);
    auto plan_b = build_hop_plan(b, dur, b.start_offset_s);
    for (auto& h : plan_b) h.source_id = 1;
    assign_random_phases(plan_a, 9);
    assign_random_phases(plan_b, 9);

    std::vector<HopPlanEntry> merged = plan_a;
    merged.insert(merged.end(), plan_b.begin(), plan_b.end());

    const IqRecording ra = render(plan_a, profiles, fs, 7, dur);
    const IqRecording rb = render(plan_b, profiles, fs, 7, dur);
    const IqRecording rm = render(merged, profiles, fs, 7, dur);
    REQUIRE(ra.size() == rm.size());
    for (std::size_t n = 0; n < rm.size(); ++n) {
        const std::complex<float> sum = ra.samples[n] + rb.samples[n];
        CHECK(std::abs(rm.samples[n] - sum) <= 1e-5f * (1.0f + std::abs(sum)));
    }
}

TEST_CASE("rendering rejects aliasing carriers") {
    SourceProfile p = cw_profile();
    HopPlanEntry hop;
    hop.dwell_time_s = 1e-3;
    hop.carrier_offset_hz = 0.6e6;
    CHECK_THROWS_AS(render({hop}, p, 1e6, 1, 1e-3), ConfigError);
}

TEST_CASE("a disabled channel is the identity") {
    std::mt19937_64 gen(71);
    IqRecording rec;
    rec.sample_rate_hz = 1e6;
    rec.samples.resize(5000);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    for (auto& s : rec.samples) s = {u(gen), u(gen)};

    ChannelConfig cfg;  // no snr -> no noise
    cfg.multipath = {{0, {1.0, 0.0}}};
    const IqRecording out = apply_channel(rec, cfg);
    REQUIRE(out.size() == rec.size());
    for (std::size_t n = 0; n < rec.size(); ++n) CHECK(out.samples[n] == rec.samples[n]);
}

TEST_CASE("noise on an empty capture hits the configured power") {
    IqRecording rec;
    rec.sample_rate_hz = 1e6;
    rec.samples.assign(200'000, {0.0f, 0.0f});

    ChannelConfig cfg;
    cfg.snr_db = 0.0;                          // no signal to reference
    cfg.noise_power_db = 10.0 * std::log10(2.0);  // per-component variance 1
    cfg.rng_seed = 5;
    const IqRecording out = apply_channel(rec, cfg);

    double power = 0.0;
    for (const auto& s : out.samples) power += std::norm(std::complex<double>(s));
    power /= static_cast<double>(out.size());
    CHECK(power == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("the same seed reproduces the channel bit for bit") {
    Scenario sc = preset_scenario("futaba-desk");
    sc.duration_s = 0.01;
    sc.seed = 33;
    const IqRecording a = synthesize(sc);
    const IqRecording b = synthesize(sc);
    REQUIRE(a.size() == b.size());
    CHECK(std::memcmp(a.samples.data(), b.samples.data(),
                      a.size() * sizeof(std::complex<float>)) == 0);
}

TEST_CASE("hop-interval SNR lands within 0.3 dB of the request") {
    Scenario sc = preset_scenario("futaba-desk");
    sc.duration_s = 0.04;  // 320k samples
    sc.seed = 3;
    sc.channel.cfo_hz = 0.0;
    sc.channel.snr_db = 7.0;

    const auto truth = build_truth(sc);
    Scenario clean_sc = sc;
    clean_sc.channel = ChannelConfig{};  // nothing applied
    const IqRecording clean = synthesize(clean_sc, truth);
    const IqRecording noisy = synthesize(sc, truth);

    double sig = 0.0, noise_est = 0.0;
    std::size_t on = 0, off = 0;
    for (std::size_t n = 0; n < clean.size(); ++n) {
        const double p = std::norm(std::complex<double>(noisy.samples[n]));
        if (std::norm(std::complex<double>(clean.samples[n])) > 0.0) {
            sig += p;
            ++on;
        } else {
            noise_est += p;
            ++off;
        }
    }
    REQUIRE(on > 100000);
    REQUIRE(off > 10000);
    sig /= static_cast<double>(on);
    noise_est /= static_cast<double>(off);
    const double snr_db = 10.0 * std::log10((sig - noise_est) / noise_est);
    CHECK(std::abs(snr_db - 7.0) < 0.3);
}

TEST_CASE("multipath taps and CFO are applied") {
    IqRecording rec;
    rec.sample_rate_hz = 1e6;
    rec.samples.assign(16, {0.0f, 0.0f});
    rec.samples[0] = {1.0f, 0.0f};

    ChannelConfig cfg;
    cfg.multipath = {{0, {1.0, 0.0}}, {3, {0.0, 0.5}}};
    const IqRecording out = apply_channel(rec, cfg);
    CHECK(out.samples[0] == std::complex<float>(1.0f, 0.0f));
    CHECK(out.samples[3] == std::complex<float>(0.0f, 0.5f));

    ChannelConfig rot;
    rot.cfo_hz = 2.5e5;  // quarter turn per sample
    IqRecording dc;
    dc.sample_rate_hz = 1e6;
    dc.samples.assign(4, {1.0f, 0.0f});
    const IqRecording spun = apply_channel(dc, rot);
    CHECK(spun.samples[1].imag() == doctest::Approx(1.0f).epsilon(1e-5));
    CHECK(spun.samples[2].real() == doctest::Approx(-1.0f).epsilon(1e-5));
}

TEST_CASE("interference bursts carry the requested power while on") {
    IqRecording rec;
    rec.sample_rate_hz = 1e6;
    rec.samples.assign(100'000, {0.0f, 0.0f});

    ChannelConfig cfg;
    InterferenceBurst burst;
    burst.center_offset_hz = 2e5;
    burst.bandwidth_hz = 5e4;
    burst.power_db = -3.0;
    burst.duty = 0.5;
    burst.period_s = 2e-3;
    cfg.interference = {burst};
    cfg.rng_seed = 9;
    const IqRecording out = apply_channel(rec, cfg);

    double on_power = 0.0;
    std::size_t on = 0;
    const std::size_t period = 2000, on_len = 1000;
    for (std::size_t n = 0; n < out.size(); ++n) {
        if (n % period < on_len) {
            on_power += std::norm(std::complex<double>(out.samples[n]));
            ++on;
        } else {
            CHECK(out.samples[n] == std::complex<float>(0.0f, 0.0f));
        }
    }
    on_power /= static_cast<double>(on);
    CHECK(std::abs(10.0 * std::log10(on_power) + 3.0) < 0.5);
}
