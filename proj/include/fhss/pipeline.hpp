#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fhss/classification.hpp"
#include "fhss/detection.hpp"
#include "fhss/extraction.hpp"
#include "fhss/iq_io.hpp"
#include "fhss/spectrogram.hpp"

namespace fhss {

struct DetectionParams {
    double top_fraction = 0.2;
    std::size_t kernel_rows = 3;  // frequency extent of the closing element
    std::size_t kernel_cols = 5;  // time extent
    // Opening pass after the closing: shaves ragged band edges and speckle so
    // the rectangle scan sees solid blocks. 0 disables the pass.
    std::size_t open_rows = 7;
    std::size_t open_cols = 7;
};

struct ExtractionParams {
    std::size_t min_dwell_frames = 3;
    std::size_t min_bandwidth_bins = 2;
};

struct ClassificationParams {
    bool enabled = true;
    double tol_frames = 2.0;            // congruence tolerance in frame durations
    std::optional<double> tol_s;        // explicit override
    double peak_ratio = 0.25;
    double min_lag_s = 1e-3;
    double max_lag_s = 15e-3;
};

struct PipelineConfig {
    StftConfig stft;
    DetectionParams detection;
    ExtractionParams extraction;
    ClassificationParams classification;
};

PipelineConfig pipeline_config_from_json_file(const std::string& path);
void pipeline_config_to_json_file(const PipelineConfig& cfg, const std::string& path);

struct PipelineResult {
    Spectrogram spectrogram;  // empty when the run started from a mask
    ThresholdReport threshold;
    BinaryMask mask;
    std::vector<HopRecord> hops;  // filtered; source_id filled when classified
    std::optional<PeriodEstimate> period;
    SourceAssignment assignment;
};

// spectrogram -> threshold -> binarize -> closing -> extraction ->
// classification, per the detection flow.
PipelineResult run_pipeline(const IqRecording& rec, const PipelineConfig& cfg);

// Resumes after the detection stage from a dumped mask.
PipelineResult run_pipeline_from_mask(BinaryMask mask, const PipelineConfig& cfg);

}  // namespace fhss
