#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace fhss {

// One complex-baseband capture. Samples are dimensionless amplitudes stored
// as cf32; absolute power calibration is not needed anywhere downstream.
struct IqRecording {
    std::vector<std::complex<float>> samples;
    double sample_rate_hz = 0.0;
    double center_frequency_hz = 0.0;
    std::string capture_id;

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

// Sidecar metadata for a raw IQ file.
struct RecordingMeta {
    double sample_rate_hz = 0.0;
    double center_frequency_hz = 0.0;
    std::uint64_t sample_count = 0;
    std::string datatype = "cf32_le";
    std::string capture_id;
};

// Throws ConfigError if the recording violates its invariants
// (empty, non-positive rate, or non-finite sample — reported with its index).
void validate(const IqRecording& rec);

// Raw file: little-endian float32 interleaved I/Q pairs. Meta file: JSON with
// keys sample_rate_hz, center_frequency_hz, sample_count, datatype, capture_id.
IqRecording load_recording(const std::string& raw_path, const std::string& meta_path);
void save_recording(const IqRecording& rec, const std::string& raw_path,
                    const std::string& meta_path);

RecordingMeta load_meta(const std::string& meta_path);

// Consecutive non-overlapping pieces of segment_len samples; a shorter tail is
// dropped. segment_len > rec.size() yields an empty sequence.
std::vector<IqRecording> segment(const IqRecording& rec, std::size_t segment_len);

}  // namespace fhss
