#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace sievelab::par {

// Worker count for parallel reductions.  Defaults to the hardware count,
// overridable via set_thread_count() or the SIEVELAB_THREADS environment
// variable (read once at startup).
int thread_count();
void set_thread_count(int n);

// Deterministic parallel reduction over the index range [lo, hi).
//
// The range is cut into fixed-size chunks, each chunk's partial result is
// computed sequentially by chunk_fn(a, b), and the partials are combined
// left to right.  The chunk grid depends only on (lo, hi, chunk), never on
// the worker count, so the floating-point result is bit-identical for any
// number of threads.
template <class T, class ChunkFn>
T reduce_chunked(int64_t lo, int64_t hi, int64_t chunk, ChunkFn chunk_fn, T zero) {
    if (hi <= lo) return zero;
    if (chunk < 1) chunk = 1;
    int64_t n_chunks = (hi - lo + chunk - 1) / chunk;
    std::vector<T> partials(static_cast<size_t>(n_chunks), zero);

    auto run_chunk = [&](int64_t c) {
        int64_t a = lo + c * chunk;
        int64_t b = a + chunk < hi ? a + chunk : hi;
        partials[static_cast<size_t>(c)] = chunk_fn(a, b);
    };

    int workers = thread_count();
    if (workers > n_chunks) workers = static_cast<int>(n_chunks);
    if (workers <= 1) {
        for (int64_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        std::atomic<int64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    int64_t c = next.fetch_add(1);
                    if (c >= n_chunks) break;
                    run_chunk(c);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    T acc = zero;
    for (auto& p : partials) acc = acc + p;
    return acc;
}

// Same chunking scheme for side-effecting loops whose chunks touch
// disjoint state (e.g. disjoint output slices).
template <class ChunkFn>
void for_each_chunk(int64_t lo, int64_t hi, int64_t chunk, ChunkFn chunk_fn) {
    struct Unit {
        Unit operator+(Unit) const { return {}; }
    };
    reduce_chunked(
        lo, hi, chunk,
        [&](int64_t a, int64_t b) {
            chunk_fn(a, b);
            return Unit{};
        },
        Unit{});
}

inline constexpr int64_t kDefaultChunk = 1 << 14;

}  // namespace sievelab::par
