#include "fhss/iq_io.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fhss/common.hpp"
#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw IQ files are little-endian; big-endian hosts need byte swaps");
static_assert(sizeof(std::complex<float>) == 8);

namespace fhss {

void validate(const IqRecording& rec) {
    if (rec.samples.empty()) throw ConfigError("recording has no samples");
    if (!(rec.sample_rate_hz > 0.0)) throw ConfigError("sample_rate_hz must be > 0");
    if (rec.center_frequency_hz < 0.0) throw ConfigError("center_frequency_hz must be >= 0");
    for (std::size_t i = 0; i < rec.samples.size(); ++i) {
        const auto& s = rec.samples[i];
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw ConfigError("non-finite sample at index " + std::to_string(i));
        }
    }
}

RecordingMeta load_meta(const std::string& meta_path) {
    std::ifstream in(meta_path);
    if (!in) throw IoError("cannot open meta file: " + meta_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad meta JSON in " + meta_path + ": " + e.what());
    }
    RecordingMeta m;
    try {
        m.sample_rate_hz = j.at("sample_rate_hz").get<double>();
        m.center_frequency_hz = j.at("center_frequency_hz").get<double>();
        m.sample_count = j.at("sample_count").get<std::uint64_t>();
        m.datatype = j.value("datatype", std::string("cf32_le"));
        m.capture_id = j.value("capture_id", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("missing meta field in " + meta_path + ": " + e.what());
    }
    if (m.datatype != "cf32_le") {
        throw ConfigError("unsupported datatype '" + m.datatype + "' (expected cf32_le)");
    }
    return m;
}

IqRecording load_recording(const std::string& raw_path, const std::string& meta_path) {
    RecordingMeta meta = load_meta(meta_path);

    std::error_code ec;
    const auto bytes = std::filesystem::file_size(raw_path, ec);
    if (ec) throw IoError("cannot stat raw file: " + raw_path);
    if (bytes % sizeof(std::complex<float>) != 0) {
        throw IoError("truncated raw file " + raw_path + ": " + std::to_string(bytes) +
                      " bytes is not a whole number of I/Q float pairs");
    }
    const std::uint64_t count = bytes / sizeof(std::complex<float>);
    if (count != meta.sample_count) {
        throw ConfigError("meta/payload mismatch for " + raw_path + ": meta says " +
                          std::to_string(meta.sample_count) + " samples, file holds " +
                          std::to_string(count));
    }

    IqRecording rec;
    rec.sample_rate_hz = meta.sample_rate_hz;
    rec.center_frequency_hz = meta.center_frequency_hz;
    rec.capture_id = meta.capture_id;
    rec.samples.resize(count);

    std::ifstream in(raw_path, std::ios::binary);
    if (!in) throw IoError("cannot open raw file: " + raw_path);
    in.read(reinterpret_cast<char*>(rec.samples.data()),
            static_cast<std::streamsize>(bytes));
    if (!in) throw IoError("short read on raw file: " + raw_path);

    validate(rec);
    return rec;
}

void save_recording(const IqRecording& rec, const std::string& raw_path,
                    const std::string& meta_path) {
    validate(rec);

    {
        std::ofstream out(raw_path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot create raw file: " + raw_path);
        out.write(reinterpret_cast<const char*>(rec.samples.data()),
                  static_cast<std::streamsize>(rec.samples.size() * sizeof(std::complex<float>)));
        if (!out) throw IoError("write failed: " + raw_path);
    }

    nlohmann::json j{
        {"sample_rate_hz", rec.sample_rate_hz},
        {"center_frequency_hz", rec.center_frequency_hz},
        {"sample_count", rec.samples.size()},
        {"datatype", "cf32_le"},
        {"capture_id", rec.capture_id},
    };
    std::ofstream out(meta_path, std::ios::trunc);
    if (!out) throw IoError("cannot create meta file: " + meta_path);
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + meta_path);
}

std::vector<IqRecording> segment(const IqRecording& rec, std::size_t segment_len) {
    if (segment_len == 0) throw ConfigError("segment_len must be >= 1");
    std::vector<IqRecording> pieces;
    const std::size_t n = rec.samples.size() / segment_len;
    pieces.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        IqRecording piece;
        piece.sample_rate_hz = rec.sample_rate_hz;
        piece.center_frequency_hz = rec.center_frequency_hz;
        piece.capture_id = rec.capture_id.empty()
                               ? ("segment_" + std::to_string(k))
                               : (rec.capture_id + "_seg" + std::to_string(k));
        piece.samples.assign(rec.samples.begin() + static_cast<std::ptrdiff_t>(k * segment_len),
                             rec.samples.begin() + static_cast<std::ptrdiff_t>((k + 1) * segment_len));
        pieces.push_back(std::move(piece));
    }
    return pieces;
}

}  // namespace fhss
