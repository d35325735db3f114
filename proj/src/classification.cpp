#include "fhss/classification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "fhss/common.hpp"

namespace fhss {

std::vector<double> occupancy_series(const BinaryMask& mask) {
    std::vector<double> series(mask.cols, 0.0);
    for (std::size_t r = 0; r < mask.rows; ++r) {
        const std::uint8_t* row = mask.bits.data() + r * mask.cols;
        for (std::size_t c = 0; c < mask.cols; ++c) series[c] += row[c];
    }
    if (!series.empty()) {
        const double mean =
            std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
        for (double& v : series) v -= mean;
    }
    return series;
}

PeriodEstimate estimate_period(const std::vector<double>& series, double frame_duration_s,
                               double min_lag_s, double max_lag_s, double peak_ratio) {
    if (!(frame_duration_s > 0.0)) throw ConfigError("frame duration must be > 0");
    if (!(min_lag_s >= 0.0) || !(max_lag_s > min_lag_s))
        throw ConfigError("period search window is empty");

    const auto max_lag =
        static_cast<std::size_t>(std::llround(max_lag_s / frame_duration_s));
    std::size_t min_lag =
        static_cast<std::size_t>(std::llround(min_lag_s / frame_duration_s));
    min_lag = std::max<std::size_t>(min_lag, 1);
    if (max_lag < min_lag) throw ConfigError("period search window is empty");
    if (series.size() <= 2 * max_lag)
        throw ConfigError("series too short for requested lag window: " +
                          std::to_string(series.size()) + " frames vs max lag " +
                          std::to_string(max_lag));

    const std::size_t n = series.size();
    std::vector<double> acf(max_lag + 1, 0.0);
    for (std::size_t lag = 0; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) s += series[i] * series[i + lag];
        acf[lag] = s / static_cast<double>(n);
    }

    std::size_t t1 = min_lag;
    for (std::size_t lag = min_lag; lag <= max_lag; ++lag)
        if (acf[lag] > acf[t1]) t1 = lag;

    PeriodEstimate est;
    est.acf = std::move(acf);
    est.frame_duration_s = frame_duration_s;
    est.t1_frames = t1;
    est.t1_s = static_cast<double>(t1) * frame_duration_s;

    const double gate = peak_ratio * est.acf[t1];
    for (std::size_t lag = 1; lag < t1; ++lag) {
        const bool local_max = est.acf[lag] >= est.acf[lag - 1] && est.acf[lag] >= est.acf[lag + 1];
        if (local_max && est.acf[lag] >= gate && est.acf[lag] > 0.0)
            est.peak_lags_s.push_back(static_cast<double>(lag) * frame_duration_s);
    }
    est.peak_lags_s.push_back(est.t1_s);
    return est;
}

namespace {

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

SourceAssignment group_hops(const std::vector<HopRecord>& hops, const PeriodEstimate& period,
                            double tol_s) {
    if (period.peak_lags_s.empty()) throw ConfigError("empty peak set");
    if (!(period.t1_s > 0.0)) throw ConfigError("fundamental period must be > 0");
    if (period.frame_duration_s > 0.0 && tol_s < period.frame_duration_s)
        throw ConfigError("tolerance below one frame duration");

    SourceAssignment out;
    out.source_of.assign(hops.size(), -1);
    if (hops.empty()) return out;

    const double t1 = period.t1_s;
    std::vector<double> residues;
    residues.reserve(period.peak_lags_s.size());
    for (double lag : period.peak_lags_s) {
        double r = std::fmod(lag, t1);
        if (r < 0.0) r += t1;
        residues.push_back(r);  // t1 itself lands on residue 0
    }

    UnionFind uf(hops.size());
    for (std::size_t a = 0; a < hops.size(); ++a) {
        for (std::size_t b = a + 1; b < hops.size(); ++b) {
            double d = std::fmod(std::abs(hops[a].start_time_s - hops[b].start_time_s), t1);
            bool linked = false;
            for (double res : residues) {
                const double gap = std::abs(d - res);
                if (std::min(gap, t1 - gap) <= tol_s) {
                    linked = true;
                    break;
                }
            }
            if (linked) uf.unite(a, b);
        }
    }

    // Number groups by earliest member start time.
    std::vector<std::size_t> root(hops.size());
    std::vector<std::pair<double, std::size_t>> group_start;  // (earliest start, root)
    for (std::size_t i = 0; i < hops.size(); ++i) {
        root[i] = uf.find(i);
        auto it = std::find_if(group_start.begin(), group_start.end(),
                               [&](const auto& g) { return g.second == root[i]; });
        if (it == group_start.end())
            group_start.emplace_back(hops[i].start_time_s, root[i]);
        else
            it->first = std::min(it->first, hops[i].start_time_s);
    }
    std::sort(group_start.begin(), group_start.end());
    for (std::size_t i = 0; i < hops.size(); ++i) {
        for (std::size_t g = 0; g < group_start.size(); ++g) {
            if (group_start[g].second == root[i]) {
                out.source_of[i] = static_cast<int>(g);
                break;
            }
        }
    }
    out.num_sources = static_cast<int>(group_start.size());
    return out;
}

void dump_acf(const PeriodEstimate& period, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot create ACF dump: " + path);
    out << "lag_ms,correlation\n";
    const double norm = period.acf.empty() || period.acf[0] <= 0.0 ? 1.0 : period.acf[0];
    char line[64];
    for (std::size_t lag = 0; lag < period.acf.size(); ++lag) {
        std::snprintf(line, sizeof(line), "%.6f,%.9f\n",
                      static_cast<double>(lag) * period.frame_duration_s * 1e3,
                      period.acf[lag] / norm);
        out << line;
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace fhss
