#include "riesz_ep/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace riesz_ep {

int worker_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("RIESZ_EP_THREADS")) {
        try {
            const int cap = std::stoi(env);
            if (cap > 0) return cap;
        } catch (...) {
        }
    }
    return hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(worker_count());
    // below this size thread start-up dominates
    if (workers <= 1 || count < 4096) {
        body(0, count);
        return;
    }
    const std::size_t chunks = std::min(workers, count);
    const std::size_t per = (count + chunks - 1) / chunks;
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t begin = c * per;
        const std::size_t end = std::min(count, begin + per);
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace riesz_ep
