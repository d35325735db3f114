#include "fhss/detection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "fhss/common.hpp"
#include "json.hpp"

namespace fhss {

std::size_t BinaryMask::popcount() const {
    return static_cast<std::size_t>(
        std::count(bits.begin(), bits.end(), static_cast<std::uint8_t>(1)));
}

ThresholdReport estimate_threshold(const Spectrogram& spec, double top_fraction) {
    if (spec.power_db.empty()) throw ConfigError("empty spectrogram");
    if (!(top_fraction > 0.0) || top_fraction > 1.0)
        throw ConfigError("top_fraction must be in (0, 1]");

    const std::size_t k = spec.power_db.size();
    const auto top_count =
        static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(k)));

    // Equivalent to a full ascending sort followed by averaging the tail;
    // nth_element finds the same top multiset in linear time.
    std::vector<double> vals = spec.power_db;
    std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k - top_count),
                     vals.end());
    double sum = 0.0;
    double vmax = vals[k - top_count];
    for (std::size_t i = k - top_count; i < k; ++i) {
        sum += vals[i];
        vmax = std::max(vmax, vals[i]);
    }

    ThresholdReport rep;
    rep.top_fraction = top_fraction;
    rep.s_max = vmax;
    rep.sigma_top = sum / static_cast<double>(top_count);
    rep.mu = 0.5 * (rep.s_max + rep.sigma_top);
    std::size_t above = 0;
    for (double v : spec.power_db)
        if (v >= rep.mu) ++above;
    rep.occupancy_fraction = static_cast<double>(above) / static_cast<double>(k);
    return rep;
}

BinaryMask binarize(const Spectrogram& spec, double mu) {
    BinaryMask mask;
    mask.rows = spec.rows;
    mask.cols = spec.cols;
    mask.bits.resize(spec.power_db.size());
    for (std::size_t i = 0; i < spec.power_db.size(); ++i)
        mask.bits[i] = spec.power_db[i] >= mu ? 1 : 0;
    mask.frame_times_s = spec.frame_times_s;
    mask.bin_freqs_hz = spec.bin_freqs_hz;
    mask.frame_duration_s = spec.frame_duration_s();
    mask.bin_width_hz = spec.bin_width_hz();
    return mask;
}

namespace {

enum class Op { dilate, erode };

// One separable pass along rows or columns. Dilation ORs the clipped window
// (outside cells contribute 0); erosion ANDs the clipped window.
void window_pass(const std::vector<std::uint8_t>& in, std::vector<std::uint8_t>& out,
                 std::size_t rows, std::size_t cols, std::size_t half, bool along_cols, Op op) {
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const std::size_t pos = along_cols ? c : r;
            const std::size_t limit = along_cols ? cols : rows;
            const std::size_t lo = pos > half ? pos - half : 0;
            const std::size_t hi = std::min(pos + half, limit - 1);
            std::uint8_t acc = (op == Op::dilate) ? 0 : 1;
            for (std::size_t p = lo; p <= hi; ++p) {
                const std::uint8_t v = along_cols ? in[r * cols + p] : in[p * cols + c];
                if (op == Op::dilate) {
                    if (v) { acc = 1; break; }
                } else {
                    if (!v) { acc = 0; break; }
                }
            }
            out[r * cols + c] = acc;
        }
    }
}

}  // namespace

namespace {

void check_kernel(std::size_t kernel_rows, std::size_t kernel_cols) {
    if (kernel_rows % 2 == 0 || kernel_cols % 2 == 0 || kernel_rows == 0 || kernel_cols == 0)
        throw ConfigError("morphology kernel dimensions must be odd and >= 1");
}

}  // namespace

BinaryMask morph_close(const BinaryMask& mask, std::size_t kernel_rows, std::size_t kernel_cols) {
    check_kernel(kernel_rows, kernel_cols);
    const std::size_t hr = kernel_rows / 2;
    const std::size_t hc = kernel_cols / 2;

    BinaryMask out = mask;
    if (mask.bits.empty() || (hr == 0 && hc == 0)) return out;

    std::vector<std::uint8_t> tmp(mask.bits.size());
    // Dilate.
    window_pass(mask.bits, tmp, mask.rows, mask.cols, hc, true, Op::dilate);
    window_pass(tmp, out.bits, mask.rows, mask.cols, hr, false, Op::dilate);
    // Erode.
    window_pass(out.bits, tmp, mask.rows, mask.cols, hc, true, Op::erode);
    window_pass(tmp, out.bits, mask.rows, mask.cols, hr, false, Op::erode);
    return out;
}

BinaryMask morph_open(const BinaryMask& mask, std::size_t kernel_rows, std::size_t kernel_cols) {
    check_kernel(kernel_rows, kernel_cols);
    const std::size_t hr = kernel_rows / 2;
    const std::size_t hc = kernel_cols / 2;

    BinaryMask out = mask;
    if (mask.bits.empty() || (hr == 0 && hc == 0)) return out;

    std::vector<std::uint8_t> tmp(mask.bits.size());
    // Erode.
    window_pass(mask.bits, tmp, mask.rows, mask.cols, hc, true, Op::erode);
    window_pass(tmp, out.bits, mask.rows, mask.cols, hr, false, Op::erode);
    // Dilate.
    window_pass(out.bits, tmp, mask.rows, mask.cols, hc, true, Op::dilate);
    window_pass(tmp, out.bits, mask.rows, mask.cols, hr, false, Op::dilate);
    return out;
}

void dump_mask(const BinaryMask& mask, const ThresholdReport& report, const std::string& path) {
    {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw IoError("cannot create mask dump: " + path);
        out << "P1\n" << mask.cols << " " << mask.rows << "\n";
        std::string line(mask.cols, '0');
        for (std::size_t r = 0; r < mask.rows; ++r) {
            for (std::size_t c = 0; c < mask.cols; ++c) line[c] = mask.at(r, c) ? '1' : '0';
            out << line << "\n";
        }
        if (!out) throw IoError("write failed: " + path);
    }
    nlohmann::json j{
        {"s_max_db", report.s_max},
        {"sigma_top_db", report.sigma_top},
        {"mu_db", report.mu},
        {"top_fraction", report.top_fraction},
        {"occupancy_fraction", report.occupancy_fraction},
        {"frame_times_s", mask.frame_times_s},
        {"bin_freqs_hz", mask.bin_freqs_hz},
        {"frame_duration_s", mask.frame_duration_s},
        {"bin_width_hz", mask.bin_width_hz},
    };
    std::ofstream hdr(path + ".json", std::ios::trunc);
    if (!hdr) throw IoError("cannot create mask header: " + path + ".json");
    hdr << j.dump(2) << "\n";
}

BinaryMask load_mask(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mask: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P1") throw IoError("mask is not a P1 bitmap: " + path);
    std::size_t cols = 0, rows = 0;
    in >> cols >> rows;
    if (!in || cols == 0 || rows == 0) throw IoError("bad mask header: " + path);

    BinaryMask mask;
    mask.rows = rows;
    mask.cols = cols;
    mask.bits.reserve(rows * cols);
    char ch;
    while (mask.bits.size() < rows * cols && in.get(ch)) {
        if (ch == '0') mask.bits.push_back(0);
        else if (ch == '1') mask.bits.push_back(1);
    }
    if (mask.bits.size() != rows * cols) throw IoError("mask payload too short: " + path);

    std::ifstream hdr(path + ".json");
    if (!hdr) throw IoError("missing mask sidecar: " + path + ".json");
    nlohmann::json j;
    try {
        hdr >> j;
        mask.frame_times_s = j.at("frame_times_s").get<std::vector<double>>();
        mask.bin_freqs_hz = j.at("bin_freqs_hz").get<std::vector<double>>();
        mask.frame_duration_s = j.at("frame_duration_s").get<double>();
        mask.bin_width_hz = j.at("bin_width_hz").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad mask sidecar " + path + ".json: " + e.what());
    }
    if (mask.frame_times_s.size() != cols || mask.bin_freqs_hz.size() != rows)
        throw IoError("mask sidecar axes do not match bitmap shape: " + path);
    return mask;
}

}  // namespace fhss
