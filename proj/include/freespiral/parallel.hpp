#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace freespiral {

/// Splits [0, n) into `threads` contiguous chunks and calls body(chunk, begin, end)
/// for each, one std::jthread per chunk. Chunk boundaries depend only on
/// (n, threads); callers reduce per-chunk results in chunk order. The first
/// exception thrown by any chunk is rethrown after all threads join.
template <class Body>
void parallel_chunks(std::size_t n, unsigned threads, Body&& body) {
    const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
    if (chunks == 1) {
        body(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(chunks);
    {
        std::vector<std::jthread> pool;
        pool.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c) {
            const std::size_t begin = n * c / chunks;
            const std::size_t end = n * (c + 1) / chunks;
            pool.emplace_back([&, c, begin, end] {
                try {
                    body(c, begin, end);
                } catch (...) {
                    errors[c] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

/// Number of chunks parallel_chunks will use.
inline std::size_t chunk_count(std::size_t n, unsigned threads) {
    return std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
}

}  // namespace freespiral
