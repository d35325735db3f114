#include "fhss/pipeline.hpp"

#include <fstream>

#include "fhss/common.hpp"
#include "json.hpp"

namespace fhss {

namespace {

using nlohmann::json;

}  // namespace

PipelineConfig pipeline_config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open pipeline config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("bad pipeline config JSON in " + path + ": " + e.what());
    }

    PipelineConfig cfg;
    try {
        if (j.contains("stft")) {
            const auto& s = j.at("stft");
            cfg.stft.window_size = s.value("window_size", cfg.stft.window_size);
            cfg.stft.overlap = s.value("overlap", cfg.stft.window_size / 2);
            if (s.contains("window"))
                cfg.stft.window = window_kind_from_string(s.at("window").get<std::string>());
            cfg.stft.fft_size = s.value("fft_size", std::size_t{0});
            cfg.stft.floor_db = s.value("floor_db", cfg.stft.floor_db);
        }
        if (j.contains("detection")) {
            const auto& d = j.at("detection");
            cfg.detection.top_fraction = d.value("top_fraction", cfg.detection.top_fraction);
            cfg.detection.kernel_rows = d.value("kernel_rows", cfg.detection.kernel_rows);
            cfg.detection.kernel_cols = d.value("kernel_cols", cfg.detection.kernel_cols);
            cfg.detection.open_rows = d.value("open_rows", cfg.detection.open_rows);
            cfg.detection.open_cols = d.value("open_cols", cfg.detection.open_cols);
        }
        if (j.contains("extraction")) {
            const auto& e = j.at("extraction");
            cfg.extraction.min_dwell_frames =
                e.value("min_dwell_frames", cfg.extraction.min_dwell_frames);
            cfg.extraction.min_bandwidth_bins =
                e.value("min_bandwidth_bins", cfg.extraction.min_bandwidth_bins);
        }
        if (j.contains("classification")) {
            const auto& c = j.at("classification");
            cfg.classification.enabled = c.value("enabled", cfg.classification.enabled);
            cfg.classification.tol_frames = c.value("tol_frames", cfg.classification.tol_frames);
            if (c.contains("tol_s")) cfg.classification.tol_s = c.at("tol_s").get<double>();
            cfg.classification.peak_ratio = c.value("peak_ratio", cfg.classification.peak_ratio);
            cfg.classification.min_lag_s = c.value("min_lag_s", cfg.classification.min_lag_s);
            cfg.classification.max_lag_s = c.value("max_lag_s", cfg.classification.max_lag_s);
        }
    } catch (const json::exception& e) {
        throw ConfigError("bad pipeline config field in " + path + ": " + e.what());
    }
    validate(cfg.stft);
    return cfg;
}

void pipeline_config_to_json_file(const PipelineConfig& cfg, const std::string& path) {
    json j{
        {"stft",
         {{"window_size", cfg.stft.window_size},
          {"overlap", cfg.stft.overlap},
          {"window", to_string(cfg.stft.window)},
          {"fft_size", cfg.stft.fft_size},
          {"floor_db", cfg.stft.floor_db}}},
        {"detection",
         {{"top_fraction", cfg.detection.top_fraction},
          {"kernel_rows", cfg.detection.kernel_rows},
          {"kernel_cols", cfg.detection.kernel_cols},
          {"open_rows", cfg.detection.open_rows},
          {"open_cols", cfg.detection.open_cols}}},
        {"extraction",
         {{"min_dwell_frames", cfg.extraction.min_dwell_frames},
          {"min_bandwidth_bins", cfg.extraction.min_bandwidth_bins}}},
        {"classification",
         {{"enabled", cfg.classification.enabled},
          {"tol_frames", cfg.classification.tol_frames},
          {"peak_ratio", cfg.classification.peak_ratio},
          {"min_lag_s", cfg.classification.min_lag_s},
          {"max_lag_s", cfg.classification.max_lag_s}}},
    };
    if (cfg.classification.tol_s) j["classification"]["tol_s"] = *cfg.classification.tol_s;
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create pipeline config: " + path);
    out << j.dump(2) << "\n";
}

namespace {

void classify_stage(PipelineResult& result, const PipelineConfig& cfg) {
    result.assignment.source_of.assign(result.hops.size(), -1);
    result.assignment.num_sources = 0;
    if (!cfg.classification.enabled || result.hops.empty()) return;

    const double frame = result.mask.frame_duration_s;
    const auto series = occupancy_series(result.mask);
    const double max_lag = std::min(cfg.classification.max_lag_s,
                                    frame * static_cast<double>(series.size() / 2 + 1) - 2 * frame);
    if (max_lag <= cfg.classification.min_lag_s) return;  // capture too short to classify

    PeriodEstimate period = estimate_period(series, frame, cfg.classification.min_lag_s, max_lag,
                                            cfg.classification.peak_ratio);
    const double tol =
        cfg.classification.tol_s.value_or(cfg.classification.tol_frames * frame);
    result.assignment = group_hops(result.hops, period, tol);
    for (std::size_t i = 0; i < result.hops.size(); ++i)
        result.hops[i].source_id = result.assignment.source_of[i];
    result.period = std::move(period);
}

}  // namespace

PipelineResult run_pipeline(const IqRecording& rec, const PipelineConfig& cfg) {
    PipelineResult result;
    result.spectrogram = compute_spectrogram(rec, cfg.stft);
    result.threshold = estimate_threshold(result.spectrogram, cfg.detection.top_fraction);
    BinaryMask raw = binarize(result.spectrogram, result.threshold.mu);
    result.mask = morph_close(raw, cfg.detection.kernel_rows, cfg.detection.kernel_cols);
    if (cfg.detection.open_rows > 0 && cfg.detection.open_cols > 0)
        result.mask = morph_open(result.mask, cfg.detection.open_rows, cfg.detection.open_cols);
    result.hops = filter_hops(extract_hops(result.mask), cfg.extraction.min_dwell_frames,
                              cfg.extraction.min_bandwidth_bins);
    classify_stage(result, cfg);
    return result;
}

PipelineResult run_pipeline_from_mask(BinaryMask mask, const PipelineConfig& cfg) {
    PipelineResult result;
    result.mask = std::move(mask);
    result.hops = filter_hops(extract_hops(result.mask), cfg.extraction.min_dwell_frames,
                              cfg.extraction.min_bandwidth_bins);
    classify_stage(result, cfg);
    return result;
}

}  // namespace fhss
