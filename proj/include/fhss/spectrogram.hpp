#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fhss/iq_io.hpp"

namespace fhss {

enum class WindowKind { rectangular, hann, hamming };

WindowKind window_kind_from_string(const std::string& name);
std::string to_string(WindowKind kind);

struct StftConfig {
    std::size_t window_size = 2048;   // M
    std::size_t overlap = 1024;       // L, frame shift R = M - L
    WindowKind window = WindowKind::hann;
    std::size_t fft_size = 0;         // 0 -> window_size
    double floor_db = -120.0;         // clamp applied before the log

    std::size_t shift() const { return window_size - overlap; }
    std::size_t transform_size() const { return fft_size == 0 ? window_size : fft_size; }
};

// Throws ConfigError unless 0 <= L < M, R >= 1 and fft_size >= M.
void validate(const StftConfig& cfg);

// Frame count for a signal of signal_len samples: floor((N - L) / (M - L)).
// Throws ConfigError when signal_len < M.
std::size_t num_frames(std::size_t signal_len, const StftConfig& cfg);

// Power spectrogram in relative dB (dBFS). Rows are frequency bins in
// ascending absolute frequency, columns are time frames.
struct Spectrogram {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> power_db;       // row-major [rows x cols]
    std::vector<double> frame_times_s;  // per-column frame-center time
    std::vector<double> bin_freqs_hz;   // per-row absolute frequency
    StftConfig config;
    double sample_rate_hz = 0.0;
    double window_energy = 0.0;         // sum of w[n]^2, the dB reference

    double at(std::size_t r, std::size_t c) const { return power_db[r * cols + c]; }
    double& at(std::size_t r, std::size_t c) { return power_db[r * cols + c]; }
    double frame_duration_s() const {
        return static_cast<double>(config.shift()) / sample_rate_hz;
    }
    double bin_width_hz() const {
        return sample_rate_hz / static_cast<double>(config.transform_size());
    }
    // Inverts the dB mapping: per-bin linear power such that the per-frame sum
    // over bins equals the windowed time-domain frame energy.
    double linear_power(std::size_t r, std::size_t c) const;
};

Spectrogram compute_spectrogram(const IqRecording& rec, const StftConfig& cfg);

struct WindowChoice {
    std::size_t window_size = 0;
    std::string rationale;
};

// Picks the default analysis window from a candidate list: 2048 when offered,
// otherwise the candidate closest to 2048 on a log2 scale (ties go small).
WindowChoice auto_window(std::size_t signal_len, const std::vector<std::size_t>& candidates);

// Binary float32 grid with a JSON header sidecar (<path>.json), plus an
// optional 8-bit grayscale PGM rendering.
void dump_spectrogram(const Spectrogram& spec, const std::string& path,
                      const std::string& image_path = "");

}  // namespace fhss
