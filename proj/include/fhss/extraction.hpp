#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fhss/detection.hpp"

namespace fhss {

// One extracted transmission.
struct HopRecord {
    double start_time_s = 0.0;
    double stop_time_s = 0.0;
    double dwell_time_s = 0.0;
    double center_frequency_hz = 0.0;
    double bandwidth_hz = 0.0;
    std::size_t start_frame = 0;
    std::size_t stop_frame = 0;  // inclusive
    std::size_t start_bin = 0;
    std::size_t stop_bin = 0;    // inclusive
    int source_id = -1;          // -1 until classification
};

// Rectangle scan over the mask: on the first unvisited 1 the time extent is
// walked along the row, the frequency extent down the final column, and the
// found rectangle is zeroed in the working copy before the scan continues.
// Non-rectangular components therefore come out as several rectangles.
// Rectangles touching the matrix border are clipped, not discarded.
std::vector<HopRecord> extract_hops(const BinaryMask& mask);

// Drops speckle rectangles below the given extents.
std::vector<HopRecord> filter_hops(std::vector<HopRecord> hops, std::size_t min_dwell_frames,
                                   std::size_t min_bandwidth_bins);

// CSV with header start_ms,stop_ms,dwell_ms,center_ghz,bandwidth_mhz,source_id.
std::string hops_to_csv(const std::vector<HopRecord>& hops);
std::vector<HopRecord> hops_from_csv_file(const std::string& path);

}  // namespace fhss
