#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "fhss/iq_io.hpp"

namespace fhss {

// One planned transmission burst.
struct HopPlanEntry {
    double start_time_s = 0.0;
    double dwell_time_s = 0.0;
    double carrier_offset_hz = 0.0;  // relative to band center
    double phase_rad = 0.0;
    int source_id = 0;
};

// Per-hop payload model.
//   qpsk_rrc  - random QPSK symbols, root-raised-cosine shaped. Spectrogram
//               cells fluctuate exponentially (random data), so masks come
//               out ragged at low SNR.
//   multitone - phase-randomized tone comb with a flat, deterministic
//               magnitude spectrum. Produces the solid spectrogram blocks a
//               frequency-hopping controller shows on a real analyzer.
//   cw        - constant envelope s(t) = 1.
enum class Waveform { qpsk_rrc, multitone, cw };

Waveform waveform_from_string(const std::string& name);
std::string to_string(Waveform w);

// Timing and waveform model of one hopping controller. The pattern repeats
// every fundamental period: three dwells separated by the three guard times.
struct SourceProfile {
    double dwell_time_s = 1.44e-3;
    std::array<double, 3> guard_times_s{0.5e-3, 0.8e-3, 1.18e-3};  // strictly increasing
    double fundamental_period_s = 6.8e-3;  // == 3*dwell + sum(guards)
    std::vector<double> frequency_set_hz;  // carrier offsets from band center
    std::vector<int> hop_sequence;         // indices into frequency_set, e.g. f1 f1 f2 f3 f3 f4
    Waveform waveform = Waveform::qpsk_rrc;
    double symbol_rate_hz = 0.0;           // 0 -> constant-envelope s(t) = 1
    double rrc_beta = 0.35;                // rolloff; also pads the multitone comb width
    double tone_spacing_hz = 0.0;          // multitone comb pitch; 0 -> sample_rate / 2048
    double power_db = 0.0;                 // per-hop mean power, dB full scale
    double start_offset_s = 0.0;           // phase of the pattern within the capture
    int source_id = 0;
    bool randomize_phase = true;

    double occupied_bandwidth_hz() const {
        return symbol_rate_hz > 0.0 ? symbol_rate_hz * (1.0 + rrc_beta) : 0.0;
    }
};

void validate(const SourceProfile& profile);

// Tiles [start_offset_s, duration_s) with the periodic pattern. A hop whose
// dwell would cross duration_s is emitted truncated; hops starting at or
// beyond duration_s are not emitted. Carrier phases are left at zero.
std::vector<HopPlanEntry> build_hop_plan(const SourceProfile& profile, double duration_s,
                                         double start_offset_s = 0.0);

// Draws a uniform carrier phase per hop. Streams are keyed by source id and
// start time, so rendering a merged plan equals summing per-source renders.
void assign_random_phases(std::vector<HopPlanEntry>& plan, std::uint64_t seed);

// Sums s(t) * exp(j(2*pi*f_c*t + theta)) over all hops, gated to each dwell
// and zero elsewhere. s(t) is a unit-power RRC-shaped random-QPSK waveform
// regenerated per hop from the seed (or the constant 1 when symbol_rate is 0).
// profiles must be indexable by HopPlanEntry::source_id.
IqRecording render(const std::vector<HopPlanEntry>& plan,
                   const std::vector<SourceProfile>& profiles, double sample_rate_hz,
                   std::uint64_t seed, double duration_s, double center_frequency_hz = 0.0);

IqRecording render(const std::vector<HopPlanEntry>& plan, const SourceProfile& profile,
                   double sample_rate_hz, std::uint64_t seed, double duration_s,
                   double center_frequency_hz = 0.0);

struct MultipathTap {
    std::size_t delay_samples = 0;
    std::complex<double> gain{1.0, 0.0};
};

struct InterferenceBurst {
    double center_offset_hz = 0.0;
    double bandwidth_hz = 1e5;
    double power_db = 0.0;   // mean power while on, dB full scale
    double duty = 0.5;       // on fraction of each gating period
    double period_s = 1e-3;  // gating period
};

struct ChannelConfig {
    // Signal-to-noise ratio measured over the union of hop-active samples.
    // Unset or +inf disables noise.
    std::optional<double> snr_db;
    // Total complex noise power (dB) when snr_db has no signal to reference,
    // i.e. for pure-noise captures.
    double noise_power_db = 0.0;
    double cfo_hz = 0.0;
    std::vector<MultipathTap> multipath;
    std::vector<InterferenceBurst> interference;
    std::uint64_t rng_seed = 1;
};

void validate(const ChannelConfig& cfg);

// Multipath convolution, carrier-frequency-offset rotation, gated band-limited
// interference bursts, then circular complex AWGN sized so the hop-interval
// SNR equals cfg.snr_db. Deterministic for a fixed rng_seed.
IqRecording apply_channel(const IqRecording& clean, const ChannelConfig& cfg);

}  // namespace fhss
