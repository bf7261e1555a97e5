#ifndef XSTRAT_BASELINES_HPP
#define XSTRAT_BASELINES_HPP

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "random.hpp"
#include "stratified.hpp"

namespace xstrat {

/// Uniformly random split with exactly round(n * target) test points.
inline SplitAssignment random_split(std::size_t num_points, double target_test_size, std::uint64_t seed) {
    return initialize_split(num_points, target_test_size, seed);
}

/// One allocation made by iterative_split, reported after the budgets have
/// been updated.
struct IterativeStep {
    std::size_t point = 0;
    Partition partition = Partition::Train;
    /// Label being processed, or empty for the trailing label-free points.
    std::optional<LabelId> driving_label;
    std::span<const double> train_label_budget;
    std::span<const double> test_label_budget;
    std::array<double, 2> point_budget{};  // indexed by Partition
};

struct IterativeOptions {
    std::uint64_t seed = 0;
    std::optional<std::chrono::steady_clock::time_point> deadline{};
    std::function<void(const IterativeStep&)> observer{};
};

namespace detail {
inline constexpr std::uint64_t kIterativeStream = 0x69746572ULL;

inline std::size_t idx(Partition p) { return static_cast<std::size_t>(p); }
}  // namespace detail

/// Greedy iterative stratification into two subsets of relative sizes
/// (1 - t, t). Labels are processed rarest first (fewest unallocated points,
/// lower id on ties); each unallocated point carrying the label goes to the
/// subset with the larger remaining budget for that label, then the larger
/// remaining overall budget, then a seeded coin flip. Budgets are fractional
/// and compared exactly. Points without labels are placed last by overall
/// budget alone.
///
/// Returns nullopt if the deadline passes before all points are allocated.
inline std::optional<SplitAssignment> iterative_split(const Dataset& dataset, double target_test_size,
                                                      const IterativeOptions& options = {}) {
    const std::size_t n = dataset.num_points();
    const std::size_t num_labels = dataset.num_labels();
    const std::array<double, 2> ratio{1.0 - target_test_size, target_test_size};

    std::array<double, 2> point_budget{static_cast<double>(n) * ratio[0], static_cast<double>(n) * ratio[1]};
    std::array<std::vector<double>, 2> label_budget;
    for (std::size_t j = 0; j < 2; ++j) {
        label_budget[j].resize(num_labels);
        for (std::size_t l = 0; l < num_labels; ++l) {
            label_budget[j][l] = static_cast<double>(dataset.frequency(static_cast<LabelId>(l))) * ratio[j];
        }
    }

    std::vector<std::vector<std::size_t>> points_of(num_labels);
    for (std::size_t point = 0; point < n; ++point) {
        for (LabelId label : dataset.labels_of(point)) {
            points_of[label].push_back(point);
        }
    }
    std::vector<std::uint32_t> remaining(dataset.label_frequency().begin(), dataset.label_frequency().end());

    using Entry = std::pair<std::uint32_t, LabelId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    for (std::size_t l = 0; l < num_labels; ++l) {
        if (remaining[l] > 0) {
            queue.emplace(remaining[l], static_cast<LabelId>(l));
        }
    }

    std::vector<Partition> partition(n, Partition::Train);
    std::vector<std::uint8_t> allocated(n, 0);
    std::size_t steps = 0;

    const auto timed_out = [&] {
        return options.deadline && (steps % 256 == 0) && std::chrono::steady_clock::now() >= *options.deadline;
    };
    const auto coin = [&](std::size_t point) {
        return rng::uniform01(options.seed, detail::kIterativeStream, point) < 0.5 ? Partition::Train
                                                                                   : Partition::Test;
    };
    const auto by_point_budget = [&](std::size_t point) {
        if (point_budget[0] > point_budget[1]) {
            return Partition::Train;
        }
        if (point_budget[1] > point_budget[0]) {
            return Partition::Test;
        }
        return coin(point);
    };
    const auto report = [&](std::size_t point, std::optional<LabelId> label) {
        if (options.observer) {
            options.observer(IterativeStep{point, partition[point], label, label_budget[0], label_budget[1],
                                           point_budget});
        }
    };

    if (timed_out()) {
        return std::nullopt;
    }

    while (!queue.empty()) {
        const auto [count, label] = queue.top();
        queue.pop();
        if (count == 0 || count != remaining[label]) {
            continue;
        }
        for (std::size_t point : points_of[label]) {
            if (allocated[point] != 0) {
                continue;
            }
            Partition target = by_point_budget(point);
            if (label_budget[0][label] > label_budget[1][label]) {
                target = Partition::Train;
            } else if (label_budget[1][label] > label_budget[0][label]) {
                target = Partition::Test;
            }
            const std::size_t j = detail::idx(target);
            partition[point] = target;
            allocated[point] = 1;
            point_budget[j] -= 1.0;
            for (LabelId other : dataset.labels_of(point)) {
                label_budget[j][other] -= 1.0;
                if (--remaining[other] > 0 && other != label) {
                    queue.emplace(remaining[other], other);
                }
            }
            report(point, label);
            ++steps;
            if (timed_out()) {
                return std::nullopt;
            }
        }
    }

    for (std::size_t point = 0; point < n; ++point) {
        if (allocated[point] != 0) {
            continue;
        }
        const Partition target = by_point_budget(point);
        partition[point] = target;
        allocated[point] = 1;
        point_budget[detail::idx(target)] -= 1.0;
        report(point, std::nullopt);
        ++steps;
        if (timed_out()) {
            return std::nullopt;
        }
    }

    return SplitAssignment(std::move(partition), options.seed);
}

}  // namespace xstrat

#endif
