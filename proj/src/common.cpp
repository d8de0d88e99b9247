#include "thermoplate/common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <thread>
#include <vector>

namespace thermoplate {

namespace {
int g_threads = 1;
}

void set_thread_count(int n) { g_threads = std::max(1, n); }

int thread_count() { return g_threads; }

void parallel_for_chunked(std::size_t n, std::size_t grain,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) {
        return;
    }
    grain = std::max<std::size_t>(1, grain);
    const std::size_t n_chunks = (n + grain - 1) / grain;
    // Thread spawn cost outweighs tiny splits; stay serial below 4 chunks.
    const int workers = n_chunks < 4 ? 1 : std::min<int>(g_threads, static_cast<int>(n_chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) {
            fn(c * grain, std::min(n, (c + 1) * grain));
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= n_chunks) {
                return;
            }
            fn(c * grain, std::min(n, (c + 1) * grain));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace thermoplate
