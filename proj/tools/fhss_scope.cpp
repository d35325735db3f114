// fhss-scope: synthesize, detect, and score frequency-hopping controller
// signals in wideband IQ recordings.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fhss/classification.hpp"
#include "fhss/common.hpp"
#include "fhss/detection.hpp"
#include "fhss/evaluation.hpp"
#include "fhss/extraction.hpp"
#include "fhss/iq_io.hpp"
#include "fhss/pipeline.hpp"
#include "fhss/scenario.hpp"
#include "fhss/spectrogram.hpp"
#include "fhss/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

bool g_verbose = false;

void vlog(const std::string& msg) {
    if (g_verbose) std::cerr << "[fhss-scope] " << msg << "\n";
}

struct SynthArgs {
    std::string scenario_file, preset, out_raw, out_meta, out_truth, save_scenario;
    std::optional<std::uint64_t> seed;
    std::optional<double> snr_db;
};

struct DetectArgs {
    std::string raw, meta, config_file, out_csv;
    std::string dump_spectrogram, dump_image, dump_mask, dump_acf;
    std::string from_mask;
    std::optional<std::size_t> window, overlap;
    std::optional<double> top_frac;
    std::optional<std::size_t> kernel_rows, kernel_cols;
    std::optional<std::size_t> open_rows, open_cols;
    std::optional<std::size_t> min_dwell_frames, min_bw_bins;
    bool no_classify = false;
    bool auto_win = false;
};

struct EvalArgs {
    std::string truth_file, hops_file, meta_file, report_file;
    double gate_ms = 0.0;
    double freq_gate_mhz = 0.0;
};

struct SweepArgs {
    std::string scenario_file, preset = "futaba-desk", config_file, out_csv, axis = "snr";
    std::vector<double> values;
    std::size_t trials = 20;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    double ref_snr_db = 20.0, ref_distance_m = 5.0, path_loss_exp = 2.7;
    double gate_ms = 0.0, freq_gate_mhz = 0.0;
};

fhss::Scenario load_scenario(const std::string& file, const std::string& preset) {
    if (!file.empty() && !preset.empty())
        throw fhss::ConfigError("give either --scenario or --preset, not both");
    if (!file.empty()) return fhss::scenario_from_json_file(file);
    if (!preset.empty()) return fhss::preset_scenario(preset);
    throw fhss::ConfigError("a scenario is required (--scenario <file> or --preset <name>)");
}

int cmd_synth(const SynthArgs& args) {
    fhss::Scenario scenario = load_scenario(args.scenario_file, args.preset);
    if (args.seed) scenario.seed = *args.seed;
    if (args.snr_db) scenario.channel.snr_db = *args.snr_db;

    const auto truth = fhss::build_truth(scenario);
    vlog("plan holds " + std::to_string(truth.size()) + " hops over " +
         std::to_string(scenario.duration_s * 1e3) + " ms");
    const fhss::IqRecording rec = fhss::synthesize(scenario, truth);
    fhss::save_recording(rec, args.out_raw, args.out_meta);
    if (!args.out_truth.empty()) fhss::truth_to_json_file(scenario, truth, args.out_truth);
    if (!args.save_scenario.empty()) fhss::scenario_to_json_file(scenario, args.save_scenario);
    vlog("wrote " + std::to_string(rec.size()) + " samples to " + args.out_raw);
    return kExitOk;
}

fhss::PipelineConfig detect_config(const DetectArgs& args, std::size_t signal_len) {
    fhss::PipelineConfig cfg;
    if (!args.config_file.empty()) cfg = fhss::pipeline_config_from_json_file(args.config_file);
    if (args.auto_win) {
        const auto choice = fhss::auto_window(signal_len, {512, 1024, 2048, 4096});
        cfg.stft.window_size = choice.window_size;
        cfg.stft.overlap = choice.window_size / 2;
        vlog("auto window: " + choice.rationale);
    }
    if (args.window) {
        cfg.stft.window_size = *args.window;
        cfg.stft.overlap = *args.window / 2;
    }
    if (args.overlap) cfg.stft.overlap = *args.overlap;
    if (args.top_frac) cfg.detection.top_fraction = *args.top_frac;
    if (args.kernel_rows) cfg.detection.kernel_rows = *args.kernel_rows;
    if (args.kernel_cols) cfg.detection.kernel_cols = *args.kernel_cols;
    if (args.open_rows) cfg.detection.open_rows = *args.open_rows;
    if (args.open_cols) cfg.detection.open_cols = *args.open_cols;
    if (args.min_dwell_frames) cfg.extraction.min_dwell_frames = *args.min_dwell_frames;
    if (args.min_bw_bins) cfg.extraction.min_bandwidth_bins = *args.min_bw_bins;
    if (args.no_classify) cfg.classification.enabled = false;
    fhss::validate(cfg.stft);
    return cfg;
}

int cmd_detect(const DetectArgs& args) {
    fhss::PipelineResult result;
    if (!args.from_mask.empty()) {
        fhss::BinaryMask mask = fhss::load_mask(args.from_mask);
        const fhss::PipelineConfig cfg = detect_config(args, mask.cols * 2);
        result = fhss::run_pipeline_from_mask(std::move(mask), cfg);
    } else {
        if (args.raw.empty() || args.meta.empty())
            throw fhss::ConfigError("detect needs --raw and --meta (or --from-mask)");
        const fhss::IqRecording rec = fhss::load_recording(args.raw, args.meta);
        const fhss::PipelineConfig cfg = detect_config(args, rec.size());
        vlog("analyzing " + std::to_string(rec.size()) + " samples at " +
             std::to_string(rec.sample_rate_hz / 1e6) + " MS/s");
        result = fhss::run_pipeline(rec, cfg);
        if (!args.dump_spectrogram.empty())
            fhss::dump_spectrogram(result.spectrogram, args.dump_spectrogram, args.dump_image);
        else if (!args.dump_image.empty())
            fhss::dump_spectrogram(result.spectrogram, args.dump_image + ".f32", args.dump_image);
    }

    if (!args.dump_mask.empty()) fhss::dump_mask(result.mask, result.threshold, args.dump_mask);
    if (!args.dump_acf.empty()) {
        if (result.period)
            fhss::dump_acf(*result.period, args.dump_acf);
        else
            vlog("no ACF to dump (classification disabled or capture too short)");
    }

    const std::string csv = fhss::hops_to_csv(result.hops);
    if (args.out_csv.empty() || args.out_csv == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(args.out_csv, std::ios::trunc);
        if (!out) throw fhss::IoError("cannot create " + args.out_csv);
        out << csv;
    }
    vlog("extracted " + std::to_string(result.hops.size()) + " hops, " +
         std::to_string(result.assignment.num_sources) + " sources");
    return kExitOk;
}

int cmd_eval(const EvalArgs& args) {
    const fhss::TruthFile truth = fhss::truth_from_json_file(args.truth_file);
    if (truth.hops.empty()) throw fhss::ConfigError("truth file lists no hops");
    if (!args.meta_file.empty()) {
        const fhss::RecordingMeta meta = fhss::load_meta(args.meta_file);
        if (!truth.capture_id.empty() && meta.capture_id != truth.capture_id)
            throw fhss::ConfigError("capture_id mismatch: truth '" + truth.capture_id +
                                    "' vs meta '" + meta.capture_id + "'");
    }
    const auto est = fhss::hops_from_csv_file(args.hops_file);

    fhss::EvalParams params;
    params.gate_s = args.gate_ms * 1e-3;
    params.freq_gate_hz = args.freq_gate_mhz * 1e6;
    const fhss::EvalReport rep =
        fhss::evaluate(truth.hops, truth.center_frequency_hz, est, params);

    if (!args.report_file.empty()) fhss::report_to_json_file(rep, args.report_file);
    std::printf("expected %zu  matched %zu  missed %zu  false %zu\n", rep.n_expected,
                rep.n_matched, rep.n_missed, rep.n_false);
    std::printf("nmse_dwell %.6g  nmse_start %.6g  detect_rate %.3f\n", rep.nmse_dwell,
                rep.nmse_start, rep.detect_rate);
    return kExitOk;
}

int cmd_sweep(const SweepArgs& args) {
    fhss::Scenario scenario = load_scenario(args.scenario_file, args.preset);
    if (args.seed) scenario.seed = *args.seed;
    fhss::PipelineConfig cfg;
    if (!args.config_file.empty()) cfg = fhss::pipeline_config_from_json_file(args.config_file);

    fhss::EvalParams eval_params;
    eval_params.gate_s = args.gate_ms * 1e-3;
    eval_params.freq_gate_hz = args.freq_gate_mhz * 1e6;

    fhss::DistanceModel distance;
    distance.ref_snr_db = args.ref_snr_db;
    distance.ref_distance_m = args.ref_distance_m;
    distance.path_loss_exponent = args.path_loss_exp;

    const auto axis = fhss::sweep_axis_from_string(args.axis);
    const auto points = fhss::run_sweep(scenario, cfg, axis, args.values, args.trials,
                                        eval_params, args.jobs, distance);
    const std::string csv = fhss::sweep_to_csv(points);
    if (args.out_csv.empty() || args.out_csv == "-") {
        std::cout << csv;
    } else {
        std::ofstream out(args.out_csv, std::ios::trunc);
        if (!out) throw fhss::IoError("cannot create " + args.out_csv);
        out << csv;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FH drone-controller signal synthesizer and detector"};
    app.require_subcommand(1);
    app.add_flag("--verbose", g_verbose, "log progress to stderr");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "generate a synthetic capture");
    s->add_option("--scenario", synth.scenario_file, "scenario JSON file");
    s->add_option("--preset", synth.preset, "built-in scenario name");
    s->add_option("--seed", synth.seed, "override the scenario seed");
    s->add_option("--snr-db", synth.snr_db, "override the channel SNR");
    s->add_option("--out", synth.out_raw, "output raw IQ file")->required();
    s->add_option("--meta", synth.out_meta, "output meta JSON file")->required();
    s->add_option("--truth", synth.out_truth, "output ground-truth hop list");
    s->add_option("--save-scenario", synth.save_scenario, "write the effective scenario JSON");

    DetectArgs detect;
    auto* d = app.add_subcommand("detect", "run the detection pipeline on a capture");
    d->add_option("--raw", detect.raw, "input raw IQ file");
    d->add_option("--meta", detect.meta, "input meta JSON file");
    d->add_option("--from-mask", detect.from_mask, "resume from a dumped mask (PBM + sidecar)");
    d->add_option("--config", detect.config_file, "pipeline config JSON");
    d->add_option("--out", detect.out_csv, "hops CSV output ('-' for stdout)");
    d->add_option("--window", detect.window, "STFT window size (overlap defaults to half)");
    d->add_option("--overlap", detect.overlap, "STFT overlap");
    d->add_flag("--auto-window", detect.auto_win, "pick the window from {512,1024,2048,4096}");
    d->add_option("--top-frac", detect.top_frac, "threshold top fraction (default 0.2)");
    d->add_option("--kernel-rows", detect.kernel_rows, "closing kernel rows (frequency)");
    d->add_option("--kernel-cols", detect.kernel_cols, "closing kernel cols (time)");
    d->add_option("--open-rows", detect.open_rows, "opening kernel rows (0 disables)");
    d->add_option("--open-cols", detect.open_cols, "opening kernel cols (0 disables)");
    d->add_option("--min-dwell-frames", detect.min_dwell_frames, "extraction dwell filter");
    d->add_option("--min-bw-bins", detect.min_bw_bins, "extraction bandwidth filter");
    d->add_flag("--no-classify", detect.no_classify, "skip source classification");
    d->add_option("--dump-spectrogram", detect.dump_spectrogram, "write f32 grid + JSON header");
    d->add_option("--dump-image", detect.dump_image, "write grayscale PGM rendering");
    d->add_option("--dump-mask", detect.dump_mask, "write PBM mask + JSON threshold report");
    d->add_option("--dump-acf", detect.dump_acf, "write lag/correlation CSV");

    EvalArgs eval;
    auto* e = app.add_subcommand("eval", "score a hops CSV against ground truth");
    e->add_option("--truth", eval.truth_file, "ground-truth JSON")->required();
    e->add_option("--hops", eval.hops_file, "hops CSV from detect")->required();
    e->add_option("--meta", eval.meta_file, "meta JSON for capture_id cross-check");
    e->add_option("--report", eval.report_file, "write the full JSON report");
    e->add_option("--gate-ms", eval.gate_ms, "start-time matching gate (0 = half dwell)");
    e->add_option("--freq-gate-mhz", eval.freq_gate_mhz, "center-frequency gate (0 = off)");

    SweepArgs sweep;
    auto* w = app.add_subcommand("sweep", "NMSE sweeps over SNR, window size, or distance");
    w->add_option("--scenario", sweep.scenario_file, "scenario JSON file");
    w->add_option("--preset", sweep.preset, "built-in scenario name (default futaba-desk)");
    w->add_option("--config", sweep.config_file, "pipeline config JSON");
    w->add_option("--seed", sweep.seed, "override the scenario seed");
    w->add_option("--axis", sweep.axis, "snr | window | distance");
    w->add_option("--values", sweep.values, "axis values")->required()->delimiter(',');
    w->add_option("--trials", sweep.trials, "independent seeds per point");
    w->add_option("--jobs", sweep.jobs, "worker threads");
    w->add_option("--out", sweep.out_csv, "sweep CSV output ('-' for stdout)");
    w->add_option("--ref-snr-db", sweep.ref_snr_db, "distance model: SNR at reference distance");
    w->add_option("--ref-distance-m", sweep.ref_distance_m, "distance model: reference distance");
    w->add_option("--path-loss-exp", sweep.path_loss_exp, "distance model: path loss exponent");
    w->add_option("--gate-ms", sweep.gate_ms, "matching gate (0 = half dwell)");
    w->add_option("--freq-gate-mhz", sweep.freq_gate_mhz, "frequency gate (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (s->parsed()) return cmd_synth(synth);
        if (d->parsed()) return cmd_detect(detect);
        if (e->parsed()) return cmd_eval(eval);
        if (w->parsed()) return cmd_sweep(sweep);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const fhss::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfig;
    } catch (const fhss::IoError& err) {
        std::cerr << "io error: " << err.what() << "\n";
        return kExitIo;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return kExitInternal;
    }
}
