#include <random>

#include "doctest.h"
#include "fhss/common.hpp"
#include "fhss/detection.hpp"
#include "fhss/scenario.hpp"
#include "fhss/spectrogram.hpp"
#include "oracles.hpp"

using namespace fhss;

namespace {

Spectrogram spec_from(const std::vector<double>& vals, std::size_t rows, std::size_t cols) {
    REQUIRE(vals.size() == rows * cols);
    Spectrogram s;
    s.rows = rows;
    s.cols = cols;
    s.power_db = vals;
    s.frame_times_s.resize(cols, 0.0);
    s.bin_freqs_hz.resize(rows, 0.0);
    s.sample_rate_hz = 1.0;
    s.window_energy = 1.0;
    s.config.window_size = 2;
    s.config.overlap = 1;
    return s;
}

}  // namespace

TEST_CASE("threshold of a constant matrix degenerates to that constant") {
    const auto spec = spec_from(std::vector<double>(12, -37.5), 3, 4);
    const ThresholdReport rep = estimate_threshold(spec);
    CHECK(rep.s_max == -37.5);
    CHECK(rep.sigma_top == -37.5);
    CHECK(rep.mu == -37.5);
    CHECK(rep.occupancy_fraction == 1.0);
}

TEST_CASE("hand-enumerated ten-entry threshold") {
    std::vector<double> vals(10, -100.0);
    vals[3] = -20.0;
    vals[7] = 0.0;
    const auto spec = spec_from(vals, 2, 5);
    const ThresholdReport rep = estimate_threshold(spec, 0.2);
    CHECK(rep.s_max == 0.0);
    CHECK(rep.sigma_top == doctest::Approx(-10.0));  // top 20% = {-20, 0}
    CHECK(rep.mu == doctest::Approx(-5.0));
}

TEST_CASE("hop-over-floor matrix matches the sort oracle exactly") {
    // 95% of cells at the noise floor, 5% carrying hops ~60 dB above it.
    std::mt19937_64 gen(3);
    std::vector<double> vals(40 * 50, -100.0);
    std::uniform_int_distribution<std::size_t> pick(0, vals.size() - 1);
    for (int i = 0; i < 100; ++i) vals[pick(gen)] = -40.0;
    const auto spec = spec_from(vals, 40, 50);

    const auto oracle = oracles::threshold_by_sort(vals, 0.2);
    const ThresholdReport rep = estimate_threshold(spec, 0.2);
    CHECK(rep.s_max == oracle.s_max);
    CHECK(rep.sigma_top == oracle.sigma_top);
    CHECK(rep.mu == oracle.mu);
}

TEST_CASE("threshold equals the sort oracle on random matrices") {
    std::mt19937_64 gen(17);
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    std::uniform_real_distribution<double> val(-120.0, 0.0);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    for (int i = 0; i < 100; ++i) {
        const std::size_t r = dim(gen), c = dim(gen);
        std::vector<double> vals(r * c);
        for (auto& v : vals) v = val(gen);
        const double f = frac(gen);
        const auto spec = spec_from(vals, r, c);
        const auto oracle = oracles::threshold_by_sort(vals, f);
        const ThresholdReport rep = estimate_threshold(spec, f);
        CHECK(rep.s_max == oracle.s_max);
        CHECK(rep.sigma_top == doctest::Approx(oracle.sigma_top).epsilon(1e-12));
        CHECK(rep.mu == doctest::Approx(oracle.mu).epsilon(1e-12));
    }
}

TEST_CASE("binarize boundary and extremes") {
    const auto spec = spec_from({-10.0, -5.0, 0.0, -7.5}, 2, 2);

    BinaryMask eq = binarize(spec, -5.0);
    CHECK(eq.at(0, 1) == 1);  // exact equality maps to 1
    CHECK(eq.at(0, 0) == 0);

    BinaryMask ones = binarize(spec, -50.0);
    CHECK(ones.popcount() == 4);
    BinaryMask zeros = binarize(spec, 1.0);
    CHECK(zeros.popcount() == 0);
}

TEST_CASE("raising the threshold never adds a set bit") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> val(-100.0, 0.0);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> vals(30 * 20);
        for (auto& v : vals) v = val(gen);
        const auto spec = spec_from(vals, 30, 20);
        const double mu1 = val(gen);
        const double mu2 = mu1 + std::abs(val(gen)) * 0.1;
        const BinaryMask lo = binarize(spec, mu1);
        const BinaryMask hi = binarize(spec, mu2);
        for (std::size_t k = 0; k < lo.bits.size(); ++k)
            CHECK(hi.bits[k] <= lo.bits[k]);
    }
}

TEST_CASE("closing with a 1x1 element is the identity") {
    std::mt19937_64 gen(5);
    const BinaryMask m = oracles::random_mask(gen, 12, 17, 0.3);
    const BinaryMask c = morph_close(m, 1, 1);
    CHECK(c.bits == m.bits);
}

TEST_CASE("closing fills an interior hole") {
    auto m = oracles::make_mask(7, 7);
    for (std::size_t r = 1; r <= 5; ++r)
        for (std::size_t c = 1; c <= 5; ++c) m.set(r, c, true);
    m.set(3, 3, false);
    const BinaryMask closed = morph_close(m, 3, 3);
    CHECK(closed.at(3, 3) == 1);
    for (std::size_t r = 1; r <= 5; ++r)
        for (std::size_t c = 1; c <= 5; ++c) CHECK(closed.at(r, c) == 1);
}

TEST_CASE("closing bridges a one-column gap in a row") {
    // Interior placement: ones at columns 2 and 4 of a 7-wide row.
    auto m = oracles::make_mask(3, 7);
    m.set(1, 2, true);
    m.set(1, 4, true);
    const BinaryMask closed = morph_close(m, 1, 3);

    // Hand-evaluated: dilation covers cols 1..5, erosion trims back to 2..4.
    for (std::size_t c = 0; c < 7; ++c)
        CHECK(closed.at(1, c) == ((c >= 2 && c <= 4) ? 1 : 0));
    CHECK(closed.popcount() == 3);
}

TEST_CASE("closing matches the brute-force reference") {
    std::mt19937_64 gen(29);
    std::uniform_int_distribution<int> ks(0, 2);
    for (int i = 0; i < 40; ++i) {
        const BinaryMask m = oracles::random_mask(gen, 15, 21, 0.25);
        const std::size_t kr = 2 * static_cast<std::size_t>(ks(gen)) + 1;
        const std::size_t kc = 2 * static_cast<std::size_t>(ks(gen)) + 1;
        const BinaryMask a = morph_close(m, kr, kc);
        const BinaryMask b = oracles::close_reference(m, kr, kc);
        CHECK(a.bits == b.bits);
    }
}

TEST_CASE("closing is idempotent and extensive") {
    std::mt19937_64 gen(31);
    for (int i = 0; i < 100; ++i) {
        const BinaryMask m = oracles::random_mask(gen, 14, 19, 0.2);
        const BinaryMask once = morph_close(m, 3, 5);
        const BinaryMask twice = morph_close(once, 3, 5);
        CHECK(once.bits == twice.bits);
        for (std::size_t k = 0; k < m.bits.size(); ++k) CHECK(once.bits[k] >= m.bits[k]);
    }
}

TEST_CASE("even kernel dimensions are rejected") {
    const auto m = oracles::make_mask(4, 4);
    CHECK_THROWS_AS(morph_close(m, 2, 3), ConfigError);
    CHECK_THROWS_AS(morph_close(m, 3, 4), ConfigError);
}

TEST_CASE("pure-noise masks stay nearly empty after closing") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Scenario sc = preset_scenario("noise");
        sc.duration_s = 0.0125;  // 100k samples
        sc.seed = seed;
        const IqRecording rec = synthesize(sc);

        StftConfig cfg;  // defaults: 2048/1024 hann
        const Spectrogram spec = compute_spectrogram(rec, cfg);
        const ThresholdReport rep = estimate_threshold(spec);
        const BinaryMask closed = morph_close(binarize(spec, rep.mu), 3, 5);
        const double occupancy =
            static_cast<double>(closed.popcount()) / static_cast<double>(closed.bits.size());
        CHECK(occupancy < 0.02);
    }
}
