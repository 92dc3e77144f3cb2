#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace spectile {

// Coordinates are always integer lattice coordinates relative to the tiling
// basis.  kMaxDim bounds the supported dimension (zd tables go up to 12).
inline constexpr int kMaxDim = 14;

using Coord = std::array<int16_t, kMaxDim>;

inline Coord zero_coord() {
    Coord c{};
    c.fill(0);
    return c;
}

inline Coord add(const Coord& a, const Coord& b) {
    Coord r;
    for (int i = 0; i < kMaxDim; ++i) r[i] = static_cast<int16_t>(a[i] + b[i]);
    return r;
}

inline Coord sub(const Coord& a, const Coord& b) {
    Coord r;
    for (int i = 0; i < kMaxDim; ++i) r[i] = static_cast<int16_t>(a[i] - b[i]);
    return r;
}

inline Coord neg(const Coord& a) {
    Coord r;
    for (int i = 0; i < kMaxDim; ++i) r[i] = static_cast<int16_t>(-a[i]);
    return r;
}

struct Vertex {
    int16_t orbit = 0;
    Coord n = zero_coord();

    friend bool operator==(const Vertex& a, const Vertex& b) {
        return a.orbit == b.orbit && a.n == b.n;
    }
    friend auto operator<=>(const Vertex& a, const Vertex& b) = default;
};

struct VertexHash {
    size_t operator()(const Vertex& v) const {
        uint64_t h = 1469598103934665603ull;
        auto mix = [&h](uint64_t x) {
            h ^= x;
            h *= 1099511628211ull;
        };
        mix(static_cast<uint64_t>(static_cast<uint16_t>(v.orbit)));
        for (int i = 0; i < kMaxDim; ++i) mix(static_cast<uint64_t>(static_cast<uint16_t>(v.n[i])));
        return static_cast<size_t>(h);
    }
};

struct CoordHash {
    size_t operator()(const Coord& c) const {
        Vertex v;
        v.orbit = 0;
        v.n = c;
        return VertexHash{}(v);
    }
};

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline int default_thread_count() {
    if (const char* env = std::getenv("SPECTILE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(chunk) for chunk = 0..nchunks-1 on a worker pool.  Chunk results are
// combined by the caller in chunk order, so reductions are schedule
// independent.
inline void parallel_for(int nchunks, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || nchunks <= 1) {
        for (int i = 0; i < nchunks; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    int nworkers = std::min(threads, nchunks);
    pool.reserve(static_cast<size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= nchunks) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// Fixed-order pairwise tree sum; result does not depend on how the terms were
// produced across threads.
inline double pairwise_sum(std::vector<double> v) {
    if (v.empty()) return 0.0;
    size_t n = v.size();
    while (n > 1) {
        size_t m = (n + 1) / 2;
        for (size_t i = 0; i < n / 2; ++i) v[i] = v[2 * i] + v[2 * i + 1];
        if (n % 2) v[n / 2] = v[n - 1];
        n = m;
    }
    return v[0];
}

}  // namespace spectile
