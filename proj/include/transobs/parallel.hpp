#ifndef TRANSOBS_PARALLEL_HPP
#define TRANSOBS_PARALLEL_HPP

#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace transobs {

/// Static contiguous split of [0, n) across `workers` threads. Chunks are
/// disjoint, so per-index results land in disjoint slots and the caller
/// can reduce them in index order afterwards; results do not depend on
/// the worker count. The first worker exception is rethrown on the
/// calling thread.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t, std::size_t)>& chunk) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        chunk(0, n);
        return;
    }
    std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> threads;
    threads.reserve(nw);
    std::exception_ptr first_error;
    std::mutex error_mtx;
    std::size_t base = n / nw, rem = n % nw, start = 0;
    for (std::size_t w = 0; w < nw; ++w) {
        std::size_t len = base + (w < rem ? 1 : 0);
        threads.emplace_back([&, start, len] {
            try {
                chunk(start, start + len);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!first_error) first_error = std::current_exception();
            }
        });
        start += len;
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace transobs

#endif
