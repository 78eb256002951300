#include "ceos/core.hpp"

#include <atomic>
#include <thread>

namespace ceos {

namespace {
std::atomic<int> g_num_threads{1};
}

void set_num_threads(int n) {
    if (n < 1) n = 1;
    g_num_threads.store(n);
}

int num_threads() { return g_num_threads.load(); }

void parallel_for(int64_t count, const std::function<void(int64_t)>& fn) {
    const int workers = std::min<int64_t>(num_threads(), count);
    if (workers <= 1) {
        for (int64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int64_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace ceos
