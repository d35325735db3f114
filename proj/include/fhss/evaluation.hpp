#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fhss/extraction.hpp"
#include "fhss/pipeline.hpp"
#include "fhss/scenario.hpp"
#include "fhss/synth.hpp"

namespace fhss {

struct EvalParams {
    double gate_s = 0.0;        // start-time matching gate; 0 -> half the median true dwell
    double freq_gate_hz = 0.0;  // center-frequency gate; 0 -> from source bandwidth
};

struct MatchResult {
    struct Pair {
        std::size_t truth_idx;
        std::size_t est_idx;
    };
    std::vector<Pair> matches;
    std::vector<std::size_t> missed_truth;
    std::vector<std::size_t> false_alarms;  // estimate indices
};

// Greedy nearest-start pairing inside the time gate and frequency gate.
// Leftover truth entries are misses, leftover estimates false alarms.
MatchResult match_hops(const std::vector<HopPlanEntry>& truth, double center_frequency_hz,
                       const std::vector<HopRecord>& est, double gate_s, double freq_gate_hz);

// Mean of squared relative errors with zero-fill: a missed hop contributes an
// estimate of 0, i.e. a full unit term.
double nmse_zero_fill(const std::vector<double>& true_vals,
                      const std::vector<std::optional<double>>& est_vals);

struct EvalReport {
    std::size_t n_expected = 0;
    std::size_t n_matched = 0;
    std::size_t n_missed = 0;
    std::size_t n_false = 0;
    double nmse_dwell = 0.0;  // primary metric: per-hop dwell time
    double nmse_start = 0.0;  // secondary: start times (zero-start hops skipped)
    double detect_rate = 0.0;

    struct Row {
        double true_start_s, true_dwell_s, true_freq_hz;
        std::optional<double> est_start_s, est_dwell_s, est_freq_hz;
    };
    std::vector<Row> table;
};

EvalReport evaluate(const std::vector<HopPlanEntry>& truth, double center_frequency_hz,
                    const std::vector<HopRecord>& est, const EvalParams& params = {});

void report_to_json_file(const EvalReport& report, const std::string& path);

enum class SweepAxis { snr_db, window, distance_m };
SweepAxis sweep_axis_from_string(const std::string& name);

// Synthetic stand-in for a range sweep: snr(d) = ref_snr - 10 n log10(d / ref_d).
struct DistanceModel {
    double ref_snr_db = 20.0;
    double ref_distance_m = 5.0;
    double path_loss_exponent = 2.7;
    double snr_at(double distance_m) const;
};

struct SweepPoint {
    double axis_value = 0.0;
    double mean_nmse = 0.0;
    double std_nmse = 0.0;
    double detect_rate = 0.0;
    double false_alarms = 0.0;  // mean per trial
};

// Runs `trials` seeded synth+detect+eval passes per axis value. Trial t uses
// the same derived seed at every axis point, so curves are paired.
std::vector<SweepPoint> run_sweep(const Scenario& base, const PipelineConfig& base_cfg,
                                  SweepAxis axis, const std::vector<double>& values,
                                  std::size_t trials, const EvalParams& eval_params = {},
                                  std::size_t jobs = 1, const DistanceModel& distance = {});

std::string sweep_to_csv(const std::vector<SweepPoint>& points);

}  // namespace fhss
