#include <fstream>
#include <random>

#include "doctest.h"
#include "fhss/extraction.hpp"
#include "oracles.hpp"

using namespace fhss;

TEST_CASE("an empty mask yields no hops") {
    CHECK(extract_hops(oracles::make_mask(8, 8)).empty());
}

TEST_CASE("a single solid rectangle is read off exactly") {
    auto m = oracles::make_mask(8, 8);
    for (std::size_t r = 2; r <= 4; ++r)
        for (std::size_t c = 1; c <= 2; ++c) m.set(r, c, true);

    const auto hops = extract_hops(m);
    REQUIRE(hops.size() == 1);
    const HopRecord& h = hops[0];
    CHECK(h.start_frame == 1);
    CHECK(h.stop_frame == 2);
    CHECK(h.start_bin == 2);
    CHECK(h.stop_bin == 4);
    CHECK(h.dwell_time_s == doctest::Approx(2.0));       // two frames at unit duration
    CHECK(h.center_frequency_hz == doctest::Approx(3.0));  // (bin 2 + bin 4) / 2
    CHECK(h.bandwidth_hz == doctest::Approx(3.0));
    CHECK(h.stop_time_s - h.start_time_s == doctest::Approx(h.dwell_time_s));
    CHECK(h.source_id == -1);
}

TEST_CASE("a single cell registers as a 1x1 hop") {
    auto m = oracles::make_mask(5, 5);
    m.set(3, 2, true);
    const auto hops = extract_hops(m);
    REQUIRE(hops.size() == 1);
    CHECK(hops[0].start_frame == hops[0].stop_frame);
    CHECK(hops[0].start_bin == hops[0].stop_bin);
    CHECK(hops[0].dwell_time_s == doctest::Approx(1.0));
    CHECK(hops[0].bandwidth_hz == doctest::Approx(1.0));
}

TEST_CASE("rectangles touching the border are clipped, not dropped") {
    auto m = oracles::make_mask(6, 6);
    for (std::size_t r = 0; r <= 2; ++r)
        for (std::size_t c = 3; c <= 5; ++c) m.set(r, c, true);
    const auto hops = extract_hops(m);
    REQUIRE(hops.size() == 1);
    CHECK(hops[0].start_bin == 0);
    CHECK(hops[0].stop_frame == 5);
}

TEST_CASE("disjoint solid rectangles match the component-box oracle") {
    std::mt19937_64 gen(41);
    for (int i = 0; i < 60; ++i) {
        const BinaryMask m = oracles::random_rect_mask(gen, 24, 32, 5);
        const auto expected = oracles::component_boxes(m);
        const auto got = oracles::boxes_from_hops(extract_hops(m));
        CHECK(got == expected);
    }
}

TEST_CASE("an L-shaped component fragments inside its bounding box") {
    auto m = oracles::make_mask(8, 8);
    for (std::size_t r = 1; r <= 5; ++r) m.set(r, 1, true);   // vertical bar
    for (std::size_t c = 1; c <= 4; ++c) m.set(5, c, true);   // horizontal foot

    const auto boxes = oracles::component_boxes(m);
    REQUIRE(boxes.size() == 1);  // one connected component
    const auto hops = extract_hops(m);
    CHECK(hops.size() > 1);  // the scan fragments it
    for (const auto& h : hops) {
        CHECK(h.start_bin >= boxes[0].r0);
        CHECK(h.stop_bin <= boxes[0].r1);
        CHECK(h.start_frame >= boxes[0].c0);
        CHECK(h.stop_frame <= boxes[0].c1);
    }
}

TEST_CASE("extraction covers every set bit and terminates") {
    std::mt19937_64 gen(43);
    for (int i = 0; i < 40; ++i) {
        const BinaryMask m = oracles::random_mask(gen, 16, 16, 0.35);
        const auto hops = extract_hops(m);
        CHECK(hops.size() <= m.popcount());

        auto covered = oracles::make_mask(m.rows, m.cols);
        for (const auto& h : hops)
            for (std::size_t r = h.start_bin; r <= h.stop_bin; ++r)
                for (std::size_t c = h.start_frame; c <= h.stop_frame; ++c)
                    covered.set(r, c, true);
        for (std::size_t k = 0; k < m.bits.size(); ++k)
            if (m.bits[k]) CHECK(covered.bits[k] == 1);
    }
}

TEST_CASE("the records come out sorted by start frame") {
    std::mt19937_64 gen(47);
    const BinaryMask m = oracles::random_rect_mask(gen, 30, 40, 5);
    const auto hops = extract_hops(m);
    for (std::size_t i = 1; i < hops.size(); ++i)
        CHECK(hops[i - 1].start_frame <= hops[i].start_frame);
}

TEST_CASE("the minimum-size filter drops speckle") {
    auto m = oracles::make_mask(10, 10);
    m.set(1, 1, true);  // 1x1 speckle
    for (std::size_t r = 4; r <= 6; ++r)
        for (std::size_t c = 3; c <= 7; ++c) m.set(r, c, true);  // 3 bins x 5 frames

    auto hops = filter_hops(extract_hops(m), 3, 2);
    REQUIRE(hops.size() == 1);
    CHECK(hops[0].start_bin == 4);

    // With the filter off both survive.
    CHECK(filter_hops(extract_hops(m), 1, 1).size() == 2);
}

TEST_CASE("hops CSV round-trips through the file format") {
    std::mt19937_64 gen(53);
    const BinaryMask m = oracles::random_rect_mask(gen, 20, 30, 4);
    auto hops = extract_hops(m);
    const std::string csv = hops_to_csv(hops);
    CHECK(csv.rfind("start_ms,stop_ms,dwell_ms,center_ghz,bandwidth_mhz,source_id\n", 0) == 0);

    oracles::TempDir dir("hops_csv");
    {
        std::ofstream out(dir.file("h.csv"));
        out << csv;
    }
    const auto parsed = hops_from_csv_file(dir.file("h.csv"));
    REQUIRE(parsed.size() == hops.size());
    for (std::size_t i = 0; i < hops.size(); ++i) {
        CHECK(parsed[i].start_time_s == doctest::Approx(hops[i].start_time_s).epsilon(1e-6));
        CHECK(parsed[i].dwell_time_s == doctest::Approx(hops[i].dwell_time_s).epsilon(1e-6));
        CHECK(parsed[i].source_id == hops[i].source_id);
    }
}
