#ifndef XSTRAT_PARALLEL_HPP
#define XSTRAT_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace xstrat {

/// Worker count for the data-parallel stages. Zero means "all available
/// cores". Results never depend on this value.
struct Parallelism {
    std::size_t threads = 1;

    [[nodiscard]] std::size_t resolve() const noexcept {
        if (threads != 0) {
            return threads;
        }
        return std::max<std::size_t>(1, std::thread::hardware_concurrency());
    }
};

/// Splits [0, count) into at most `workers` contiguous shards and calls
/// `body(shard, begin, end)` for each, in parallel. Shard boundaries depend
/// only on (count, workers).
template<typename Body>
void parallel_shards(std::size_t count, std::size_t workers, Body&& body) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, count));
    if (workers == 1) {
        body(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    const std::size_t chunk = (count + workers - 1) / workers;
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t shard = 1; shard < workers; ++shard) {
        const std::size_t begin = std::min(count, shard * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&body, shard, begin, end] { body(shard, begin, end); });
    }
    body(std::size_t{0}, std::size_t{0}, std::min(count, chunk));
}

template<typename Body>
void parallel_for(std::size_t count, std::size_t workers, Body&& body) {
    parallel_shards(count, workers, [&body](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            body(i);
        }
    });
}

}  // namespace xstrat

#endif
