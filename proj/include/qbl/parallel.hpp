/**
 *  @file qbl/parallel.hpp
 *  @brief Index-ordered fan-out over a fixed number of worker threads.
 *
 *  Work items are identified by index and write their results into
 *  index-addressed slots, so the outcome does not depend on the thread count.
 */

#ifndef QBL_PARALLEL_HPP
#define QBL_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qbl {

/// Calls f(i) for i in [0, count). threads <= 1 runs inline.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F &&f) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            f(i);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, count);
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += workers)
                    f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
            }
        });
    for (std::thread &th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace qbl

#endif // QBL_PARALLEL_HPP
