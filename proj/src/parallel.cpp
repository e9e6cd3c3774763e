#include "sscope/parallel.hpp"

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sscope {

void parallel_for(long long n, const std::function<void(long long)>& fn) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    long long n_threads = std::min<long long>(hw == 0 ? 1 : hw, n);
    if (n_threads <= 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }

    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&](long long lo, long long hi) {
        try {
            for (long long i = lo; i < hi; ++i) fn(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    std::vector<std::thread> pool;
    long long chunk = (n + n_threads - 1) / n_threads;
    for (long long t = 0; t < n_threads; ++t) {
        long long lo = t * chunk;
        long long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace sscope
