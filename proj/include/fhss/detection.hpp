#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fhss/spectrogram.hpp"

namespace fhss {

// Boolean occupancy matrix, same shape and axes as the source spectrogram.
struct BinaryMask {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> bits;     // row-major 0/1
    std::vector<double> frame_times_s;  // per column
    std::vector<double> bin_freqs_hz;   // per row
    double frame_duration_s = 0.0;
    double bin_width_hz = 0.0;

    std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * cols + c]; }
    void set(std::size_t r, std::size_t c, bool v) { bits[r * cols + c] = v ? 1 : 0; }
    std::size_t popcount() const;
};

struct ThresholdReport {
    double s_max = 0.0;        // matrix maximum, dB
    double sigma_top = 0.0;    // mean of the top fraction of sorted entries, dB
    double mu = 0.0;           // (s_max + sigma_top) / 2
    double top_fraction = 0.2;
    double occupancy_fraction = 0.0;  // share of entries >= mu
};

// Sorts all entries ascending and averages the highest ceil(top_fraction * K).
ThresholdReport estimate_threshold(const Spectrogram& spec, double top_fraction = 0.2);

// Bit set iff entry >= mu (boundary equality maps to 1).
BinaryMask binarize(const Spectrogram& spec, double mu);

// Dilation then erosion with an all-ones kernel_rows x kernel_cols element
// (both odd). Dilation reads out-of-bounds cells as 0; erosion clips the
// element at the border, which keeps closing extensive on finite masks.
BinaryMask morph_close(const BinaryMask& mask, std::size_t kernel_rows, std::size_t kernel_cols);

// Erosion then dilation with the same element and border rules. Removes
// anything the element cannot fit inside: speckle and ragged band edges.
// Anti-extensive (output is a subset of the input) and idempotent.
BinaryMask morph_open(const BinaryMask& mask, std::size_t kernel_rows, std::size_t kernel_cols);

// PBM bitmap (P1) plus a JSON sidecar (<path>.json) carrying the threshold
// report and the mask axes.
void dump_mask(const BinaryMask& mask, const ThresholdReport& report, const std::string& path);
BinaryMask load_mask(const std::string& path);

}  // namespace fhss
