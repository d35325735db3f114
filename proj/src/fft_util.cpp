#include "fft_util.hpp"

namespace fhss::detail {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

FftPlan::FftPlan(std::size_t size, int sign) : n(size) {
    in = fftw_alloc_complex(size);
    out = fftw_alloc_complex(size);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(size), in, out, sign, FFTW_ESTIMATE);
}

FftPlan::~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
}

}  // namespace fhss::detail
