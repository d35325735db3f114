#include "fhss/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fft_util.hpp"
#include "fhss/common.hpp"

namespace fhss {

namespace {

// Root-raised-cosine magnitude response at frequency f in symbol-rate units.
double rrc_response(double f, double beta) {
    const double af = std::abs(f);
    const double lo = 0.5 * (1.0 - beta);
    const double hi = 0.5 * (1.0 + beta);
    if (af <= lo) return 1.0;
    if (af >= hi || beta <= 0.0) return 0.0;
    return std::sqrt(0.5 * (1.0 + std::cos(M_PI / beta * (af - lo))));
}

// RNG stream key that identifies a hop independently of plan composition.
std::uint64_t hop_stream(std::uint64_t seed, int source_id, double start_time_s) {
    const auto start_ns = static_cast<std::uint64_t>(std::llround(start_time_s * 1e9));
    return mix_seed(seed, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(source_id)) << 48) ^
                              start_ns);
}

}  // namespace

Waveform waveform_from_string(const std::string& name) {
    if (name == "qpsk_rrc" || name == "qpsk") return Waveform::qpsk_rrc;
    if (name == "multitone") return Waveform::multitone;
    if (name == "cw") return Waveform::cw;
    throw ConfigError("unknown waveform: " + name);
}

std::string to_string(Waveform w) {
    switch (w) {
        case Waveform::qpsk_rrc: return "qpsk_rrc";
        case Waveform::multitone: return "multitone";
        case Waveform::cw: return "cw";
    }
    return "?";
}

void validate(const SourceProfile& p) {
    if (!(p.dwell_time_s > 0.0)) throw ConfigError("dwell_time_s must be > 0");
    if (!(p.guard_times_s[0] < p.guard_times_s[1] && p.guard_times_s[1] < p.guard_times_s[2]))
        throw ConfigError("guard_times_s must be strictly increasing (dt1 < dt2 < dt3)");
    for (double g : p.guard_times_s)
        if (!(g > 0.0)) throw ConfigError("guard times must be > 0");
    const double sum =
        3.0 * p.dwell_time_s + p.guard_times_s[0] + p.guard_times_s[1] + p.guard_times_s[2];
    if (std::abs(sum - p.fundamental_period_s) > 1e-12 * p.fundamental_period_s)
        throw ConfigError("3*dwell + guard sum must equal the fundamental period");
    if (p.frequency_set_hz.empty()) throw ConfigError("frequency_set_hz is empty");
    if (p.hop_sequence.empty()) throw ConfigError("hop_sequence is empty");
    for (int idx : p.hop_sequence)
        if (idx < 0 || static_cast<std::size_t>(idx) >= p.frequency_set_hz.size())
            throw ConfigError("hop_sequence index out of range");
    if (p.symbol_rate_hz < 0.0) throw ConfigError("symbol_rate_hz must be >= 0");
    if (p.rrc_beta < 0.0 || p.rrc_beta >= 1.0) throw ConfigError("rrc_beta must be in [0, 1)");
    if (p.tone_spacing_hz < 0.0) throw ConfigError("tone_spacing_hz must be >= 0");
    if (p.start_offset_s < 0.0) throw ConfigError("start_offset_s must be >= 0");
}

std::vector<HopPlanEntry> build_hop_plan(const SourceProfile& profile, double duration_s,
                                         double start_offset_s) {
    validate(profile);
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be > 0");

    const double dwell = profile.dwell_time_s;
    const double t1 = profile.fundamental_period_s;
    const std::array<double, 3> slot_offsets{
        0.0,
        dwell + profile.guard_times_s[0],
        2.0 * dwell + profile.guard_times_s[0] + profile.guard_times_s[1],
    };

    std::vector<HopPlanEntry> plan;
    std::size_t hop_index = 0;
    for (std::size_t period = 0;; ++period) {
        const double t0 = start_offset_s + static_cast<double>(period) * t1;
        if (t0 >= duration_s) break;
        for (double off : slot_offsets) {
            const double start = t0 + off;
            if (start >= duration_s) break;
            HopPlanEntry hop;
            hop.start_time_s = start;
            hop.dwell_time_s = std::min(dwell, duration_s - start);
            const int seq = profile.hop_sequence[hop_index % profile.hop_sequence.size()];
            hop.carrier_offset_hz = profile.frequency_set_hz[static_cast<std::size_t>(seq)];
            hop.source_id = profile.source_id;
            plan.push_back(hop);
            ++hop_index;
        }
    }
    return plan;
}

void assign_random_phases(std::vector<HopPlanEntry>& plan, std::uint64_t seed) {
    for (auto& hop : plan) {
        std::mt19937_64 gen(hop_stream(seed, hop.source_id, hop.start_time_s) ^
                            0xa5a5a5a5a5a5a5a5ULL);
        std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
        hop.phase_rad = uni(gen);
    }
}

namespace {

std::vector<std::complex<double>> normalize_ifft(detail::FftPlan& inv, std::size_t len) {
    double power = 0.0;
    for (std::size_t i = 0; i < len; ++i)
        power += inv.out[i][0] * inv.out[i][0] + inv.out[i][1] * inv.out[i][1];
    power /= static_cast<double>(len);
    const double scale = power > 0.0 ? 1.0 / std::sqrt(power) : 0.0;
    std::vector<std::complex<double>> s(len);
    for (std::size_t i = 0; i < len; ++i)
        s[i] = {inv.out[i][0] * scale, inv.out[i][1] * scale};
    return s;
}

// Random QPSK impulse train shaped in the frequency domain by the exact
// root-raised-cosine response (circular convolution over the hop).
std::vector<std::complex<double>> qpsk_rrc_waveform(std::size_t len, const SourceProfile& profile,
                                                    double sample_rate_hz, std::mt19937_64& gen) {
    std::uniform_int_distribution<int> qpsk(0, 3);
    static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
    static const std::complex<double> kQpsk[4] = {
        {kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}, {-kInvSqrt2, kInvSqrt2},
        {-kInvSqrt2, -kInvSqrt2}};

    const double sps = sample_rate_hz / profile.symbol_rate_hz;
    detail::FftPlan fwd(len, FFTW_FORWARD);
    detail::FftPlan inv(len, FFTW_BACKWARD);

    for (std::size_t i = 0; i < len; ++i) fwd.in[i][0] = fwd.in[i][1] = 0.0;
    for (double pos = 0.0; pos < static_cast<double>(len); pos += sps) {
        const auto n = static_cast<std::size_t>(std::llround(pos));
        if (n >= len) break;
        const std::complex<double> sym = kQpsk[qpsk(gen)];
        fwd.in[n][0] = sym.real();
        fwd.in[n][1] = sym.imag();
    }
    fftw_execute(fwd.plan);

    for (std::size_t k = 0; k < len; ++k) {
        // Signed bin frequency in cycles per sample, then in symbol units.
        double f = static_cast<double>(k) / static_cast<double>(len);
        if (f > 0.5) f -= 1.0;
        const double h = rrc_response(f * sps, profile.rrc_beta);
        inv.in[k][0] = fwd.out[k][0] * h;
        inv.in[k][1] = fwd.out[k][1] * h;
    }
    fftw_execute(inv.plan);
    return normalize_ifft(inv, len);
}

// Equal-amplitude tones across the occupied band with per-hop random phases.
// The magnitude spectrum is deterministic, so every spectrogram cell inside
// the band carries the same power regardless of the payload randomness. The
// comb is pinned to the global tone-spacing grid (absolute frequency, not
// carrier-relative) and the edge tones are boosted 6 dB: the band's spectral
// ladder then steps from in-band level directly to window-sidelobe level,
// leaving no transition row near the detection threshold.
std::vector<std::complex<double>> multitone_waveform(std::size_t len, const SourceProfile& profile,
                                                     double sample_rate_hz,
                                                     double carrier_offset_hz,
                                                     std::mt19937_64& gen) {
    const double spacing =
        profile.tone_spacing_hz > 0.0 ? profile.tone_spacing_hz : sample_rate_hz / 2048.0;
    const double half_band = 0.5 * profile.occupied_bandwidth_hz();
    detail::FftPlan inv(len, FFTW_BACKWARD);
    for (std::size_t i = 0; i < len; ++i) inv.in[i][0] = inv.in[i][1] = 0.0;

    std::uniform_real_distribution<double> uni(0.0, 2.0 * M_PI);
    const double bin_hz = sample_rate_hz / static_cast<double>(len);
    const auto k_lo = static_cast<long>(std::ceil((carrier_offset_hz - half_band) / spacing));
    const auto k_hi = static_cast<long>(std::floor((carrier_offset_hz + half_band) / spacing));
    for (long k = k_lo; k <= k_hi; ++k) {
        const double f = static_cast<double>(k) * spacing - carrier_offset_hz;  // baseband
        long bin = static_cast<long>(std::llround(f / bin_hz));
        if (bin < 0) bin += static_cast<long>(len);
        if (bin < 0 || bin >= static_cast<long>(len)) continue;
        const double amp = (k == k_lo || k == k_hi) ? 3.0 : 1.0;
        const double phase = uni(gen);
        inv.in[static_cast<std::size_t>(bin)][0] = amp * std::cos(phase);
        inv.in[static_cast<std::size_t>(bin)][1] = amp * std::sin(phase);
    }
    fftw_execute(inv.plan);
    return normalize_ifft(inv, len);
}

// Unit-power baseband payload for one hop.
std::vector<std::complex<double>> hop_waveform(std::size_t len, const SourceProfile& profile,
                                               double sample_rate_hz, double carrier_offset_hz,
                                               std::mt19937_64& gen) {
    if (profile.waveform == Waveform::cw || profile.symbol_rate_hz <= 0.0)
        return std::vector<std::complex<double>>(len, {1.0, 0.0});
    if (profile.waveform == Waveform::multitone)
        return multitone_waveform(len, profile, sample_rate_hz, carrier_offset_hz, gen);
    return qpsk_rrc_waveform(len, profile, sample_rate_hz, gen);
}

}  // namespace

IqRecording render(const std::vector<HopPlanEntry>& plan,
                   const std::vector<SourceProfile>& profiles, double sample_rate_hz,
                   std::uint64_t seed, double duration_s, double center_frequency_hz) {
    if (!(sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
    if (!(duration_s > 0.0)) throw ConfigError("duration_s must be > 0");
    for (const auto& hop : plan) {
        if (std::abs(hop.carrier_offset_hz) >= sample_rate_hz / 2.0)
            throw ConfigError("carrier offset violates anti-aliasing: |" +
                              std::to_string(hop.carrier_offset_hz) + "| >= fs/2");
        if (hop.source_id < 0 || static_cast<std::size_t>(hop.source_id) >= profiles.size())
            throw ConfigError("hop source_id has no matching profile");
    }

    const auto total = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
    std::vector<std::complex<double>> acc(total, {0.0, 0.0});

    for (const auto& hop : plan) {
        const auto n0 = static_cast<std::size_t>(std::llround(hop.start_time_s * sample_rate_hz));
        auto len = static_cast<std::size_t>(std::llround(hop.dwell_time_s * sample_rate_hz));
        if (n0 >= total || len == 0) continue;
        len = std::min(len, total - n0);

        const SourceProfile& profile = profiles[static_cast<std::size_t>(hop.source_id)];
        std::mt19937_64 gen(hop_stream(seed, hop.source_id, hop.start_time_s));
        std::vector<std::complex<double>> s =
            hop_waveform(len, profile, sample_rate_hz, hop.carrier_offset_hz, gen);

        const double amp = std::pow(10.0, profile.power_db / 20.0);
        const double phase0 =
            2.0 * M_PI * hop.carrier_offset_hz * (static_cast<double>(n0) / sample_rate_hz) +
            hop.phase_rad;
        std::complex<double> rot(std::cos(phase0), std::sin(phase0));
        const double dphi = 2.0 * M_PI * hop.carrier_offset_hz / sample_rate_hz;
        const std::complex<double> step(std::cos(dphi), std::sin(dphi));
        for (std::size_t n = 0; n < len; ++n) {
            acc[n0 + n] += amp * s[n] * rot;
            rot *= step;
            if ((n & 0xfff) == 0xfff) rot /= std::abs(rot);  // keep the phasor on the circle
        }
    }

    IqRecording rec;
    rec.sample_rate_hz = sample_rate_hz;
    rec.center_frequency_hz = center_frequency_hz;
    rec.samples.resize(total);
    for (std::size_t n = 0; n < total; ++n)
        rec.samples[n] = std::complex<float>(static_cast<float>(acc[n].real()),
                                             static_cast<float>(acc[n].imag()));
    return rec;
}

IqRecording render(const std::vector<HopPlanEntry>& plan, const SourceProfile& profile,
                   double sample_rate_hz, std::uint64_t seed, double duration_s,
                   double center_frequency_hz) {
    std::vector<SourceProfile> profiles(static_cast<std::size_t>(profile.source_id) + 1, profile);
    return render(plan, profiles, sample_rate_hz, seed, duration_s, center_frequency_hz);
}

void validate(const ChannelConfig& cfg) {
    for (const auto& tap : cfg.multipath) {
        if (!std::isfinite(tap.gain.real()) || !std::isfinite(tap.gain.imag()))
            throw ConfigError("multipath tap gain must be finite");
    }
    for (const auto& burst : cfg.interference) {
        if (!(burst.bandwidth_hz > 0.0)) throw ConfigError("interference bandwidth must be > 0");
        if (burst.duty < 0.0 || burst.duty > 1.0)
            throw ConfigError("interference duty must be in [0, 1]");
        if (!(burst.period_s > 0.0)) throw ConfigError("interference period must be > 0");
    }
    if (!std::isfinite(cfg.cfo_hz)) throw ConfigError("cfo_hz must be finite");
}

IqRecording apply_channel(const IqRecording& clean, const ChannelConfig& cfg) {
    validate(cfg);
    const std::size_t n = clean.samples.size();
    const double fs = clean.sample_rate_hz;

    std::vector<std::complex<double>> y(n, {0.0, 0.0});
    if (cfg.multipath.empty()) {
        for (std::size_t i = 0; i < n; ++i) y[i] = clean.samples[i];
    } else {
        for (const auto& tap : cfg.multipath) {
            for (std::size_t i = tap.delay_samples; i < n; ++i)
                y[i] += tap.gain * std::complex<double>(clean.samples[i - tap.delay_samples]);
        }
    }

    if (cfg.cfo_hz != 0.0) {
        std::complex<double> rot(1.0, 0.0);
        const double dphi = 2.0 * M_PI * cfg.cfo_hz / fs;
        const std::complex<double> step(std::cos(dphi), std::sin(dphi));
        for (std::size_t i = 0; i < n; ++i) {
            y[i] *= rot;
            rot *= step;
            if ((i & 0xfff) == 0xfff) rot /= std::abs(rot);
        }
    }

    // Hop-interval signal power: the clean waveform is zero outside hops, so
    // the active set is exactly the nonzero samples.
    double sig_power = 0.0;
    std::size_t active = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::norm(y[i]);
        if (p > 0.0) {
            sig_power += p;
            ++active;
        }
    }
    if (active > 0) sig_power /= static_cast<double>(active);

    for (std::size_t b = 0; b < cfg.interference.size(); ++b) {
        const auto& burst = cfg.interference[b];
        std::mt19937_64 gen(mix_seed(cfg.rng_seed, 1000 + b));
        std::normal_distribution<double> gauss(0.0, 1.0);

        // Band-limited noise: white complex Gaussian through a windowed-sinc
        // lowpass of cutoff bandwidth/2, then mixed to the burst center.
        const int taps = 129;
        const int half = taps / 2;
        const double fc = std::min(0.499, 0.5 * burst.bandwidth_hz / fs);
        std::vector<double> h(taps);
        double hsum2 = 0.0;
        for (int k = 0; k < taps; ++k) {
            const double t = static_cast<double>(k - half);
            const double sinc = t == 0.0 ? 2.0 * fc : std::sin(2.0 * M_PI * fc * t) / (M_PI * t);
            const double w = 0.54 - 0.46 * std::cos(2.0 * M_PI * k / (taps - 1));
            h[static_cast<std::size_t>(k)] = sinc * w;
            hsum2 += h[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
        }

        std::vector<std::complex<double>> white(n + taps);
        for (auto& v : white) v = {gauss(gen), gauss(gen)};  // power 2 per sample

        const double target = std::pow(10.0, burst.power_db / 10.0);
        const double scale = std::sqrt(target / (2.0 * hsum2));
        const auto period = static_cast<std::size_t>(std::llround(burst.period_s * fs));
        const auto on_len = static_cast<std::size_t>(std::llround(burst.duty * burst.period_s * fs));

        std::complex<double> rot(1.0, 0.0);
        const double dphi = 2.0 * M_PI * burst.center_offset_hz / fs;
        const std::complex<double> step(std::cos(dphi), std::sin(dphi));
        for (std::size_t i = 0; i < n; ++i) {
            const bool on = period == 0 || (i % period) < on_len;
            if (on) {
                std::complex<double> acc{0.0, 0.0};
                for (int k = 0; k < taps; ++k)
                    acc += h[static_cast<std::size_t>(k)] * white[i + static_cast<std::size_t>(k)];
                y[i] += scale * acc * rot;
            }
            rot *= step;
            if ((i & 0xfff) == 0xfff) rot /= std::abs(rot);
        }
    }

    bool add_noise = cfg.snr_db.has_value() && std::isfinite(*cfg.snr_db);
    double noise_power = 0.0;
    if (add_noise) {
        noise_power = (active > 0 && sig_power > 0.0)
                          ? sig_power / std::pow(10.0, *cfg.snr_db / 10.0)
                          : std::pow(10.0, cfg.noise_power_db / 10.0);
    }
    if (add_noise && noise_power > 0.0) {
        std::mt19937_64 gen(mix_seed(cfg.rng_seed, 0));
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
        for (std::size_t i = 0; i < n; ++i) y[i] += std::complex<double>(gauss(gen), gauss(gen));
    }

    IqRecording out;
    out.sample_rate_hz = clean.sample_rate_hz;
    out.center_frequency_hz = clean.center_frequency_hz;
    out.capture_id = clean.capture_id;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = std::complex<float>(static_cast<float>(y[i].real()),
                                             static_cast<float>(y[i].imag()));
    return out;
}

}  // namespace fhss
