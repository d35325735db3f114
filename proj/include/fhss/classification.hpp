#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fhss/detection.hpp"
#include "fhss/extraction.hpp"

namespace fhss {

// Per-column count of set bits, mean-removed. Hop timing is purely temporal,
// so summing over frequency keeps the periodicity the autocorrelation needs.
std::vector<double> occupancy_series(const BinaryMask& mask);

struct PeriodEstimate {
    double t1_s = 0.0;                 // fundamental period
    std::size_t t1_frames = 0;
    std::vector<double> peak_lags_s;   // ascending; last element equals t1_s
    std::vector<double> acf;           // biased sample ACF by lag in frames
    double frame_duration_s = 0.0;
};

// Biased sample ACF over positive lags. t1 is the lag of the global maximum
// inside [min_lag_s, max_lag_s]; the peak set collects every local maximum in
// (0, t1] whose ACF value reaches peak_ratio * acf(t1).
PeriodEstimate estimate_period(const std::vector<double>& series, double frame_duration_s,
                               double min_lag_s, double max_lag_s, double peak_ratio = 0.25);

struct SourceAssignment {
    std::vector<int> source_of;  // group id per hop index, numbered by earliest start
    int num_sources = 0;
};

// Two hops are co-sourced when their start-time difference is congruent
// (mod t1, within tol_s) to some recovered peak lag; the pairwise relation is
// closed transitively with union-find. Peak lags include t1 itself, i.e. the
// zero residue, so hops a whole period apart always group together.
SourceAssignment group_hops(const std::vector<HopRecord>& hops, const PeriodEstimate& period,
                            double tol_s);

// lag_ms,correlation rows for plotting.
void dump_acf(const PeriodEstimate& period, const std::string& path);

}  // namespace fhss
