#include "halfflow/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace halfflow {

namespace {

// One forward/backward plan pair per transform length, planned with
// FFTW_ESTIMATE so the planning stage is deterministic.  Plans are
// created under a lock (the FFTW planner is not thread safe) and
// executed on private buffers via the new-array interface.
struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

std::mutex plan_mutex;
std::map<int, PlanPair>& plan_cache() {
    static std::map<int, PlanPair> cache;
    return cache;
}

PlanPair& plans_for(int M) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto& cache = plan_cache();
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;

    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(M));
    PlanPair pair;
    pair.fwd = fftw_plan_dft_1d(M, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    pair.bwd = fftw_plan_dft_1d(M, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!pair.fwd || !pair.bwd) throw std::runtime_error("fft: planning failed");
    return cache.emplace(M, pair).first->second;
}

std::vector<std::complex<double>> execute(const std::vector<std::complex<double>>& in,
                                          bool forward) {
    const int M = static_cast<int>(in.size());
    if (M == 0) throw std::invalid_argument("fft: empty input");
    PlanPair& pair = plans_for(M);
    std::vector<std::complex<double>> out(in);
    auto* data = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(forward ? pair.fwd : pair.bwd, data, data);
    if (forward) {
        const double scale = 1.0 / M;
        for (auto& z : out) z *= scale;
    }
    return out;
}

} // namespace

std::vector<std::complex<double>> forward_dft(const std::vector<std::complex<double>>& in) {
    return execute(in, true);
}

std::vector<std::complex<double>> backward_dft(const std::vector<std::complex<double>>& in) {
    return execute(in, false);
}

int index_to_wavenumber(int i, int M) { return i < M / 2 ? i : i - M; }

} // namespace halfflow
