#include "cq/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace cq {

namespace {
std::atomic<unsigned> g_workers{1};
}

void set_worker_count(unsigned count) { g_workers.store(std::max(1u, count)); }

unsigned worker_count() { return g_workers.load(); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, bool sequential) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), n);
    if (sequential || workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    // Static contiguous chunks; each worker stops at its own first failure.
    struct Failure {
        std::size_t index = static_cast<std::size_t>(-1);
        std::exception_ptr error;
    };
    std::vector<Failure> failures(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n, begin + chunk);
        threads.emplace_back([&, w, begin, end] {
            for (std::size_t i = begin; i < end; ++i) {
                try {
                    body(i);
                } catch (...) {
                    failures[w] = {i, std::current_exception()};
                    return;
                }
            }
        });
    }
    for (auto& t : threads) t.join();

    const auto first = std::min_element(failures.begin(), failures.end(),
                                        [](const Failure& a, const Failure& b) { return a.index < b.index; });
    if (first->error) std::rethrow_exception(first->error);
}

}  // namespace cq
