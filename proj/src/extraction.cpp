#include "fhss/extraction.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fhss/common.hpp"

namespace fhss {

std::vector<HopRecord> extract_hops(const BinaryMask& mask) {
    std::vector<HopRecord> hops;
    if (mask.bits.empty()) return hops;

    std::vector<std::uint8_t> work = mask.bits;
    const std::size_t rows = mask.rows;
    const std::size_t cols = mask.cols;

    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            if (!work[i * cols + j]) continue;

            // Time extent along row i.
            std::size_t j2 = j;
            while (j2 < cols && work[i * cols + j2]) ++j2;
            const std::size_t stop_col = j2 - 1;

            // Frequency extent down the final column.
            std::size_t i2 = i;
            while (i2 < rows && work[i2 * cols + stop_col]) ++i2;
            const std::size_t stop_row = i2 - 1;

            for (std::size_t r = i; r <= stop_row; ++r)
                std::fill(work.begin() + static_cast<std::ptrdiff_t>(r * cols + j),
                          work.begin() + static_cast<std::ptrdiff_t>(r * cols + stop_col + 1),
                          static_cast<std::uint8_t>(0));

            HopRecord hop;
            hop.start_frame = j;
            hop.stop_frame = stop_col;
            hop.start_bin = i;
            hop.stop_bin = stop_row;
            hop.start_time_s = mask.frame_times_s.empty() ? static_cast<double>(j)
                                                          : mask.frame_times_s[j];
            hop.dwell_time_s =
                static_cast<double>(stop_col - j + 1) *
                (mask.frame_duration_s > 0.0 ? mask.frame_duration_s : 1.0);
            hop.stop_time_s = hop.start_time_s + hop.dwell_time_s;
            if (!mask.bin_freqs_hz.empty()) {
                hop.center_frequency_hz =
                    0.5 * (mask.bin_freqs_hz[i] + mask.bin_freqs_hz[stop_row]);
            } else {
                hop.center_frequency_hz = 0.5 * static_cast<double>(i + stop_row);
            }
            hop.bandwidth_hz = static_cast<double>(stop_row - i + 1) *
                               (mask.bin_width_hz > 0.0 ? mask.bin_width_hz : 1.0);
            hops.push_back(hop);
        }
    }

    std::sort(hops.begin(), hops.end(), [](const HopRecord& a, const HopRecord& b) {
        if (a.start_frame != b.start_frame) return a.start_frame < b.start_frame;
        return a.start_bin < b.start_bin;
    });
    return hops;
}

std::vector<HopRecord> filter_hops(std::vector<HopRecord> hops, std::size_t min_dwell_frames,
                                   std::size_t min_bandwidth_bins) {
    std::erase_if(hops, [&](const HopRecord& h) {
        const std::size_t frames = h.stop_frame - h.start_frame + 1;
        const std::size_t bins = h.stop_bin - h.start_bin + 1;
        return frames < min_dwell_frames || bins < min_bandwidth_bins;
    });
    return hops;
}

std::string hops_to_csv(const std::vector<HopRecord>& hops) {
    std::string out = "start_ms,stop_ms,dwell_ms,center_ghz,bandwidth_mhz,source_id\n";
    char line[192];
    for (const auto& h : hops) {
        std::snprintf(line, sizeof(line), "%.6f,%.6f,%.6f,%.9f,%.6f,%d\n",
                      h.start_time_s * 1e3, h.stop_time_s * 1e3, h.dwell_time_s * 1e3,
                      h.center_frequency_hz * 1e-9, h.bandwidth_hz * 1e-6, h.source_id);
        out += line;
    }
    return out;
}

std::vector<HopRecord> hops_from_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open hops CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty hops CSV: " + path);

    std::vector<HopRecord> hops;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        HopRecord h;
        double start_ms, stop_ms, dwell_ms, center_ghz, bw_mhz;
        int src;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%d", &start_ms, &stop_ms, &dwell_ms,
                        &center_ghz, &bw_mhz, &src) != 6) {
            throw IoError("bad hops CSV line " + std::to_string(lineno) + " in " + path);
        }
        h.start_time_s = start_ms * 1e-3;
        h.stop_time_s = stop_ms * 1e-3;
        h.dwell_time_s = dwell_ms * 1e-3;
        h.center_frequency_hz = center_ghz * 1e9;
        h.bandwidth_hz = bw_mhz * 1e6;
        h.source_id = src;
        hops.push_back(h);
    }
    return hops;
}

}  // namespace fhss
