// Internal FFTW helpers shared by the spectrogram and synthesizer.
#pragma once

#include <fftw3.h>

#include <cstddef>
#include <mutex>

namespace fhss::detail {

// FFTW's planner is not thread-safe; execution on private buffers is.
std::mutex& planner_mutex();

struct FftPlan {
    fftw_plan plan = nullptr;
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    std::size_t n = 0;

    FftPlan(std::size_t size, int sign);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

}  // namespace fhss::detail
