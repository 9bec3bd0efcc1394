#include "ael/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace ael::fft {
namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

enum class Kind { complex_forward, real_forward, real_inverse };

// One cached plan together with the buffers it was planned on.
struct Plan {
    fftw_plan plan = nullptr;
    fftw_complex* cbuf = nullptr;
    double* rbuf = nullptr;

    Plan(Kind kind, std::size_t n) {
        std::lock_guard lock(planner_mutex());
        const int len = static_cast<int>(n);
        switch (kind) {
            case Kind::complex_forward:
                cbuf = fftw_alloc_complex(n);
                plan = fftw_plan_dft_1d(len, cbuf, cbuf, FFTW_FORWARD, FFTW_ESTIMATE);
                break;
            case Kind::real_forward:
                rbuf = fftw_alloc_real(n);
                cbuf = fftw_alloc_complex(n / 2 + 1);
                plan = fftw_plan_dft_r2c_1d(len, rbuf, cbuf, FFTW_ESTIMATE);
                break;
            case Kind::real_inverse:
                rbuf = fftw_alloc_real(n);
                cbuf = fftw_alloc_complex(n / 2 + 1);
                plan = fftw_plan_dft_c2r_1d(len, cbuf, rbuf, FFTW_ESTIMATE);
                break;
        }
    }
    ~Plan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
        if (cbuf) fftw_free(cbuf);
        if (rbuf) fftw_free(rbuf);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;
};

Plan& cached_plan(Kind kind, std::size_t n) {
    thread_local std::map<std::pair<Kind, std::size_t>, std::unique_ptr<Plan>> cache;
    auto& slot = cache[{kind, n}];
    if (!slot) slot = std::make_unique<Plan>(kind, n);
    return *slot;
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const std::complex<double>> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    Plan& p = cached_plan(Kind::complex_forward, n);
    std::memcpy(p.cbuf, x.data(), n * sizeof(fftw_complex));
    fftw_execute(p.plan);
    const auto* res = reinterpret_cast<const std::complex<double>*>(p.cbuf);
    return {res, res + n};
}

std::vector<std::complex<double>> forward_real(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    Plan& p = cached_plan(Kind::real_forward, n);
    std::copy(x.begin(), x.end(), p.rbuf);
    fftw_execute(p.plan);
    const auto* res = reinterpret_cast<const std::complex<double>*>(p.cbuf);
    return {res, res + n / 2 + 1};
}

std::vector<double> inverse_real(std::span<const std::complex<double>> half, std::size_t n) {
    if (n == 0) return {};
    Plan& p = cached_plan(Kind::real_inverse, n);
    const std::size_t bins = n / 2 + 1;
    std::memset(p.cbuf, 0, bins * sizeof(fftw_complex));
    std::memcpy(p.cbuf, half.data(), std::min(bins, half.size()) * sizeof(fftw_complex));
    fftw_execute(p.plan);  // c2r overwrites its input; the buffer is refilled on every call
    return std::vector<double>(p.rbuf, p.rbuf + n);
}

}  // namespace ael::fft
