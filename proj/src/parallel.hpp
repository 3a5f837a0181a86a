#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace lqp::detail {

// Splits [0, total) into `threads` contiguous chunks and runs fn(chunk, begin,
// end) on each. Chunk order is the range order, so callers can reduce to a
// deterministic result. The first exception (by chunk index) is rethrown.
template <class Fn>
void for_chunks(std::uint64_t total, unsigned threads, Fn&& fn) {
    threads = std::max(1U, threads);
    if (threads == 1 || total < 1024) {
        fn(0U, std::uint64_t{0}, total);
        return;
    }
    const std::uint64_t step = (total + threads - 1) / threads;
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        const auto b = std::min(total, t * step);
        const auto e = std::min(total, b + step);
        pool.emplace_back([&, t, b, e] {
            try {
                fn(t, b, e);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace lqp::detail
