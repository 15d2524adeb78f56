#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ordstat::detail {

// Splits [0, count) into contiguous chunks, one per thread. Each chunk
// writes a disjoint output range, so the result is independent of the
// thread count.
template <typename Fn>
void parallel_chunks(std::size_t count, unsigned threads, Fn&& fn, std::size_t min_chunk = 1024) {
    const std::size_t workers =
        std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, count / min_chunk));
    if (workers <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace ordstat::detail
