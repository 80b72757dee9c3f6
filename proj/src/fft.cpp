#include "sievelab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace sievelab::fft {

namespace {

// Plans are created once per (size, direction) with FFTW_UNALIGNED so a
// cached plan applies to any buffer.  Plan creation is serialized (FFTW
// requires it); fftw_execute_dft on distinct arrays is thread-safe.
std::mutex g_plan_mutex;

fftw_plan plan_for(size_t n, int sign) {
    static std::map<std::pair<size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(g_plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> scratch(n);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fft: plan creation failed");
    cache.emplace(key, plan);
    return plan;
}

void execute(std::vector<std::complex<double>>& data, int sign) {
    if (data.empty()) throw std::invalid_argument("fft: empty input");
    fftw_plan plan = plan_for(data.size(), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void forward(std::vector<std::complex<double>>& data) { execute(data, FFTW_FORWARD); }
void backward(std::vector<std::complex<double>>& data) { execute(data, FFTW_BACKWARD); }

}  // namespace sievelab::fft
