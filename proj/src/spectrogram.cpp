#include "fhss/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "fft_util.hpp"
#include "fhss/common.hpp"
#include "json.hpp"

namespace fhss {

namespace {

std::vector<double> make_window(WindowKind kind, std::size_t m) {
    std::vector<double> w(m, 1.0);
    if (m == 1) return w;
    const double denom = static_cast<double>(m - 1);
    switch (kind) {
        case WindowKind::rectangular:
            break;
        case WindowKind::hann:
            for (std::size_t n = 0; n < m; ++n)
                w[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(n) / denom);
            break;
        case WindowKind::hamming:
            for (std::size_t n = 0; n < m; ++n)
                w[n] = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(n) / denom);
            break;
    }
    return w;
}

}  // namespace

WindowKind window_kind_from_string(const std::string& name) {
    if (name == "rectangular" || name == "rect") return WindowKind::rectangular;
    if (name == "hann") return WindowKind::hann;
    if (name == "hamming") return WindowKind::hamming;
    throw ConfigError("unknown window kind: " + name);
}

std::string to_string(WindowKind kind) {
    switch (kind) {
        case WindowKind::rectangular: return "rectangular";
        case WindowKind::hann: return "hann";
        case WindowKind::hamming: return "hamming";
    }
    return "?";
}

void validate(const StftConfig& cfg) {
    if (cfg.window_size < 1) throw ConfigError("window_size must be >= 1");
    if (cfg.overlap >= cfg.window_size)
        throw ConfigError("overlap must be < window_size");
    if (cfg.fft_size != 0 && cfg.fft_size < cfg.window_size)
        throw ConfigError("fft_size must be >= window_size");
    if (!std::isfinite(cfg.floor_db)) throw ConfigError("floor_db must be finite");
}

std::size_t num_frames(std::size_t signal_len, const StftConfig& cfg) {
    validate(cfg);
    if (signal_len < cfg.window_size)
        throw ConfigError("signal too short for analysis window: " + std::to_string(signal_len) +
                          " < " + std::to_string(cfg.window_size));
    return (signal_len - cfg.overlap) / (cfg.window_size - cfg.overlap);
}

double Spectrogram::linear_power(std::size_t r, std::size_t c) const {
    return std::pow(10.0, at(r, c) / 10.0) * window_energy;
}

Spectrogram compute_spectrogram(const IqRecording& rec, const StftConfig& cfg) {
    validate(cfg);
    const std::size_t m = cfg.window_size;
    const std::size_t r_shift = cfg.shift();
    const std::size_t f = cfg.transform_size();
    const std::size_t frames = num_frames(rec.samples.size(), cfg);

    const std::vector<double> w = make_window(cfg.window, m);
    double wenergy = 0.0;
    for (double v : w) wenergy += v * v;

    Spectrogram spec;
    spec.rows = f;
    spec.cols = frames;
    spec.config = cfg;
    spec.sample_rate_hz = rec.sample_rate_hz;
    spec.window_energy = wenergy;
    spec.power_db.assign(f * frames, 0.0);

    spec.frame_times_s.resize(frames);
    for (std::size_t i = 0; i < frames; ++i) {
        spec.frame_times_s[i] =
            (static_cast<double>(i * r_shift) + 0.5 * static_cast<double>(m)) / rec.sample_rate_hz;
    }
    spec.bin_freqs_hz.resize(f);
    const double bin_w = rec.sample_rate_hz / static_cast<double>(f);
    const std::size_t half = f / 2;
    for (std::size_t row = 0; row < f; ++row) {
        spec.bin_freqs_hz[row] =
            rec.center_frequency_hz +
            (static_cast<double>(row) - static_cast<double>(half)) * bin_w;
    }

    const double floor_lin = std::pow(10.0, cfg.floor_db / 10.0);
    detail::FftPlan fft(f, FFTW_FORWARD);

    for (std::size_t i = 0; i < frames; ++i) {
        const std::complex<float>* frame = rec.samples.data() + i * r_shift;
        for (std::size_t n = 0; n < m; ++n) {
            fft.in[n][0] = static_cast<double>(frame[n].real()) * w[n];
            fft.in[n][1] = static_cast<double>(frame[n].imag()) * w[n];
        }
        for (std::size_t n = m; n < f; ++n) {
            fft.in[n][0] = 0.0;
            fft.in[n][1] = 0.0;
        }
        fftw_execute(fft.plan);

        // Row order: ascending frequency, i.e. DFT bins fft-shifted.
        // |X_k|^2 / F makes the per-frame bin sum equal the windowed frame
        // energy; dividing by the window energy sets the dB reference.
        for (std::size_t row = 0; row < f; ++row) {
            const std::size_t k = (row + (f + 1) / 2) % f;
            const double p =
                (fft.out[k][0] * fft.out[k][0] + fft.out[k][1] * fft.out[k][1]) /
                (static_cast<double>(f) * wenergy);
            spec.power_db[row * frames + i] = 10.0 * std::log10(std::max(p, floor_lin));
        }
    }
    return spec;
}

WindowChoice auto_window(std::size_t signal_len, const std::vector<std::size_t>& candidates) {
    if (candidates.empty()) throw ConfigError("auto_window needs at least one candidate");

    // Prefer windows that fit the signal; fall back to the full list if none do.
    std::vector<std::size_t> pool;
    for (std::size_t c : candidates)
        if (c >= 1 && c <= signal_len) pool.push_back(c);
    if (pool.empty()) pool = candidates;

    constexpr std::size_t kPreferred = 2048;
    WindowChoice choice;
    if (std::find(pool.begin(), pool.end(), kPreferred) != pool.end()) {
        choice.window_size = kPreferred;
        choice.rationale = "2048 available: the empirically best analysis window";
        return choice;
    }
    const double target = std::log2(static_cast<double>(kPreferred));
    std::size_t best = pool.front();
    double best_dist = std::abs(std::log2(static_cast<double>(best)) - target);
    for (std::size_t c : pool) {
        const double d = std::abs(std::log2(static_cast<double>(c)) - target);
        if (d < best_dist - 1e-12 || (std::abs(d - best_dist) <= 1e-12 && c < best)) {
            best = c;
            best_dist = d;
        }
    }
    choice.window_size = best;
    choice.rationale = "2048 not offered; " + std::to_string(best) +
                       " is nearest on a log2 scale (ties resolved toward smaller)";
    return choice;
}

void dump_spectrogram(const Spectrogram& spec, const std::string& path,
                      const std::string& image_path) {
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create spectrogram dump: " + path);
        std::vector<float> row(spec.cols);
        for (std::size_t r = 0; r < spec.rows; ++r) {
            for (std::size_t c = 0; c < spec.cols; ++c)
                row[c] = static_cast<float>(spec.at(r, c));
            out.write(reinterpret_cast<const char*>(row.data()),
                      static_cast<std::streamsize>(row.size() * sizeof(float)));
        }
        if (!out) throw IoError("write failed: " + path);
    }

    nlohmann::json j{
        {"rows", spec.rows},
        {"cols", spec.cols},
        {"dtype", "f32_le"},
        {"layout", "row-major, rows are frequency bins ascending"},
        {"unit", "dB relative full scale"},
        {"sample_rate_hz", spec.sample_rate_hz},
        {"window_size", spec.config.window_size},
        {"overlap", spec.config.overlap},
        {"window", to_string(spec.config.window)},
        {"frame_times_s", spec.frame_times_s},
        {"bin_freqs_hz", spec.bin_freqs_hz},
    };
    std::ofstream hdr(path + ".json", std::ios::trunc);
    if (!hdr) throw IoError("cannot create spectrogram header: " + path + ".json");
    hdr << j.dump(2) << "\n";

    if (!image_path.empty()) {
        double lo = spec.power_db.empty() ? 0.0 : spec.power_db[0];
        double hi = lo;
        for (double v : spec.power_db) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double span = (hi > lo) ? (hi - lo) : 1.0;
        std::ofstream img(image_path, std::ios::binary | std::ios::trunc);
        if (!img) throw IoError("cannot create image: " + image_path);
        img << "P5\n" << spec.cols << " " << spec.rows << "\n255\n";
        std::vector<unsigned char> line(spec.cols);
        // Top image row = highest frequency.
        for (std::size_t r = spec.rows; r-- > 0;) {
            for (std::size_t c = 0; c < spec.cols; ++c) {
                const double v = (spec.at(r, c) - lo) / span;
                line[c] = static_cast<unsigned char>(std::lround(v * 255.0));
            }
            img.write(reinterpret_cast<const char*>(line.data()),
                      static_cast<std::streamsize>(line.size()));
        }
    }
}

}  // namespace fhss
