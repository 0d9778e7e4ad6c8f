#include "halfflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace halfflow {

int worker_count() {
    static const int workers = [] {
        const char* env = std::getenv("HALFFLOW_THREADS");
        if (!env) return 1;
        int w = std::atoi(env);
        return w < 1 ? 1 : w;
    }();
    return workers;
}

void parallel_for(int count, const std::function<void(int, int)>& fn) {
    const int workers = std::min(worker_count(), count);
    if (workers <= 1 || count <= 1) {
        fn(0, count);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(fn, begin, end);
    }
    for (auto& t : pool) t.join();
}

} // namespace halfflow
