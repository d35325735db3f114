#include "fhss/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "fhss/common.hpp"
#include "json.hpp"

namespace fhss {

MatchResult match_hops(const std::vector<HopPlanEntry>& truth, double center_frequency_hz,
                       const std::vector<HopRecord>& est, double gate_s, double freq_gate_hz) {
    if (!(gate_s > 0.0)) throw ConfigError("matching gate must be > 0");

    struct Cand {
        double dt;
        std::size_t ti, ei;
    };
    std::vector<Cand> cands;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        const double tf = center_frequency_hz + truth[t].carrier_offset_hz;
        for (std::size_t e = 0; e < est.size(); ++e) {
            const double dt = std::abs(truth[t].start_time_s - est[e].start_time_s);
            if (dt > gate_s) continue;
            if (freq_gate_hz > 0.0 &&
                std::abs(tf - est[e].center_frequency_hz) > freq_gate_hz)
                continue;
            cands.push_back({dt, t, e});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.dt != b.dt) return a.dt < b.dt;
        if (a.ti != b.ti) return a.ti < b.ti;
        return a.ei < b.ei;
    });

    MatchResult result;
    std::vector<char> t_used(truth.size(), 0), e_used(est.size(), 0);
    for (const auto& c : cands) {
        if (t_used[c.ti] || e_used[c.ei]) continue;
        t_used[c.ti] = e_used[c.ei] = 1;
        result.matches.push_back({c.ti, c.ei});
    }
    for (std::size_t t = 0; t < truth.size(); ++t)
        if (!t_used[t]) result.missed_truth.push_back(t);
    for (std::size_t e = 0; e < est.size(); ++e)
        if (!e_used[e]) result.false_alarms.push_back(e);
    return result;
}

double nmse_zero_fill(const std::vector<double>& true_vals,
                      const std::vector<std::optional<double>>& est_vals) {
    if (true_vals.empty()) throw ConfigError("NMSE needs at least one true value");
    if (true_vals.size() != est_vals.size())
        throw ConfigError("NMSE input lengths differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < true_vals.size(); ++i) {
        const double t = true_vals[i];
        if (!(t > 0.0)) throw ConfigError("true value must be > 0");
        const double e = est_vals[i].value_or(0.0);
        const double rel = (e - t) / t;
        acc += rel * rel;
    }
    return acc / static_cast<double>(true_vals.size());
}

namespace {

double auto_gate(const std::vector<HopPlanEntry>& truth) {
    if (truth.empty()) return 1e-3;
    std::vector<double> dwells;
    dwells.reserve(truth.size());
    for (const auto& h : truth) dwells.push_back(h.dwell_time_s);
    std::nth_element(dwells.begin(), dwells.begin() + static_cast<std::ptrdiff_t>(dwells.size() / 2),
                     dwells.end());
    return 0.5 * dwells[dwells.size() / 2];
}

}  // namespace

EvalReport evaluate(const std::vector<HopPlanEntry>& truth, double center_frequency_hz,
                    const std::vector<HopRecord>& est, const EvalParams& params) {
    if (truth.empty()) throw ConfigError("evaluation needs at least one expected hop");

    const double gate = params.gate_s > 0.0 ? params.gate_s : auto_gate(truth);
    MatchResult m = match_hops(truth, center_frequency_hz, est, gate, params.freq_gate_hz);

    EvalReport rep;
    rep.n_expected = truth.size();
    rep.n_matched = m.matches.size();
    rep.n_missed = m.missed_truth.size();
    rep.n_false = m.false_alarms.size();
    rep.detect_rate = static_cast<double>(rep.n_matched) / static_cast<double>(rep.n_expected);

    std::vector<std::optional<double>> est_dwell(truth.size());
    std::vector<double> true_dwell(truth.size());
    rep.table.resize(truth.size());
    for (std::size_t t = 0; t < truth.size(); ++t) {
        true_dwell[t] = truth[t].dwell_time_s;
        rep.table[t].true_start_s = truth[t].start_time_s;
        rep.table[t].true_dwell_s = truth[t].dwell_time_s;
        rep.table[t].true_freq_hz = center_frequency_hz + truth[t].carrier_offset_hz;
    }
    for (const auto& pair : m.matches) {
        est_dwell[pair.truth_idx] = est[pair.est_idx].dwell_time_s;
        rep.table[pair.truth_idx].est_start_s = est[pair.est_idx].start_time_s;
        rep.table[pair.truth_idx].est_dwell_s = est[pair.est_idx].dwell_time_s;
        rep.table[pair.truth_idx].est_freq_hz = est[pair.est_idx].center_frequency_hz;
    }
    rep.nmse_dwell = nmse_zero_fill(true_dwell, est_dwell);

    // Start-time NMSE, skipping hops whose true start is exactly zero.
    std::vector<double> ts;
    std::vector<std::optional<double>> es;
    for (std::size_t t = 0; t < truth.size(); ++t) {
        if (!(truth[t].start_time_s > 0.0)) continue;
        ts.push_back(truth[t].start_time_s);
        es.push_back(rep.table[t].est_start_s);
    }
    rep.nmse_start = ts.empty() ? 0.0 : nmse_zero_fill(ts, es);
    return rep;
}

void report_to_json_file(const EvalReport& report, const std::string& path) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.table) {
        nlohmann::json row{
            {"true_start_s", r.true_start_s},
            {"true_dwell_s", r.true_dwell_s},
            {"true_freq_hz", r.true_freq_hz},
        };
        if (r.est_start_s) {
            row["est_start_s"] = *r.est_start_s;
            row["est_dwell_s"] = *r.est_dwell_s;
            row["est_freq_hz"] = *r.est_freq_hz;
        }
        rows.push_back(row);
    }
    nlohmann::json j{
        {"n_expected", report.n_expected}, {"n_matched", report.n_matched},
        {"n_missed", report.n_missed},     {"n_false", report.n_false},
        {"nmse_dwell", report.nmse_dwell}, {"nmse_start", report.nmse_start},
        {"detect_rate", report.detect_rate}, {"hops", rows},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create report: " + path);
    out << j.dump(2) << "\n";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "snr" || name == "snr_db") return SweepAxis::snr_db;
    if (name == "window" || name == "window_size") return SweepAxis::window;
    if (name == "distance" || name == "distance_m") return SweepAxis::distance_m;
    throw ConfigError("unknown sweep axis: " + name);
}

double DistanceModel::snr_at(double distance_m) const {
    if (!(distance_m > 0.0)) throw ConfigError("distance must be > 0");
    return ref_snr_db - 10.0 * path_loss_exponent * std::log10(distance_m / ref_distance_m);
}

namespace {

struct TrialOutcome {
    double nmse = 0.0;
    double detect_rate = 0.0;
    double false_alarms = 0.0;
};

TrialOutcome run_trial(const Scenario& base, const PipelineConfig& base_cfg, SweepAxis axis,
                       double value, std::size_t trial, const EvalParams& eval_params,
                       const DistanceModel& distance) {
    Scenario scenario = base;
    PipelineConfig cfg = base_cfg;
    scenario.seed = mix_seed(base.seed, 1 + trial);
    scenario.channel.rng_seed = 0;  // re-derive from the trial seed

    switch (axis) {
        case SweepAxis::snr_db:
            scenario.channel.snr_db = value;
            break;
        case SweepAxis::window: {
            const auto m = static_cast<std::size_t>(std::llround(value));
            if (m < 2) throw ConfigError("window axis value too small");
            cfg.stft.window_size = m;
            cfg.stft.overlap = m / 2;
            cfg.stft.fft_size = 0;
            break;
        }
        case SweepAxis::distance_m:
            scenario.channel.snr_db = distance.snr_at(value);
            break;
    }

    EvalParams ep = eval_params;
    if (ep.freq_gate_hz <= 0.0 && !scenario.sources.empty()) {
        const double bw = scenario.sources.front().occupied_bandwidth_hz();
        const double bin = scenario.sample_rate_hz /
                           static_cast<double>(cfg.stft.fft_size ? cfg.stft.fft_size
                                                                 : cfg.stft.window_size);
        ep.freq_gate_hz = std::max(0.6 * bw, 4.0 * bin);
    }

    const auto truth = build_truth(scenario);
    const IqRecording rec = synthesize(scenario, truth);
    const PipelineResult result = run_pipeline(rec, cfg);
    const EvalReport rep = evaluate(truth, scenario.center_frequency_hz, result.hops, ep);
    return {rep.nmse_dwell, rep.detect_rate, static_cast<double>(rep.n_false)};
}

}  // namespace

std::vector<SweepPoint> run_sweep(const Scenario& base, const PipelineConfig& base_cfg,
                                  SweepAxis axis, const std::vector<double>& values,
                                  std::size_t trials, const EvalParams& eval_params,
                                  std::size_t jobs, const DistanceModel& distance) {
    if (values.empty()) throw ConfigError("sweep needs at least one axis value");
    if (trials < 1) throw ConfigError("sweep needs at least one trial");

    const std::size_t total = values.size() * trials;
    std::vector<TrialOutcome> outcomes(total);
    std::vector<std::string> errors(total);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            const std::size_t vi = k / trials;
            const std::size_t trial = k % trials;
            try {
                outcomes[k] =
                    run_trial(base, base_cfg, axis, values[vi], trial, eval_params, distance);
            } catch (const std::exception& e) {
                errors[k] = e.what();
            }
        }
    };

    const std::size_t n_threads = std::max<std::size_t>(1, std::min(jobs, total));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& err : errors)
        if (!err.empty()) throw ConfigError("sweep trial failed: " + err);

    std::vector<SweepPoint> points(values.size());
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        SweepPoint& p = points[vi];
        p.axis_value = values[vi];
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const TrialOutcome& o = outcomes[vi * trials + t];
            sum += o.nmse;
            sum2 += o.nmse * o.nmse;
            p.detect_rate += o.detect_rate;
            p.false_alarms += o.false_alarms;
        }
        const double n = static_cast<double>(trials);
        p.mean_nmse = sum / n;
        p.std_nmse = trials > 1 ? std::sqrt(std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0)))
                                : 0.0;
        p.detect_rate /= n;
        p.false_alarms /= n;
    }
    return points;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
    std::string out = "axis,mean_nmse,std_nmse,detect_rate,false_alarms\n";
    char line[160];
    for (const auto& p : points) {
        std::snprintf(line, sizeof(line), "%.6g,%.9g,%.9g,%.6f,%.3f\n", p.axis_value, p.mean_nmse,
                      p.std_nmse, p.detect_rate, p.false_alarms);
        out += line;
    }
    return out;
}

}  // namespace fhss
