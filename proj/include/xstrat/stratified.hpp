#ifndef XSTRAT_STRATIFIED_HPP
#define XSTRAT_STRATIFIED_HPP

// Swap-based stratified train/test sampling for extreme multi-label data.
//
// Starting from a random split of the requested size, every epoch
//   1. tallies each label's instances per partition,
//   2. scores each label by how far its test proportion is from the target,
//      normalised to [-1, +1] (positive: too many instances in test),
//   3. scores each point by summing its labels' scores, oriented so that a
//      high score means the point sits in the partition that over-holds its
//      labels,
//   4. flips every point scoring strictly above the upper threshold_proportion
//      quantile to the other partition with probability swap_probability,
//   5. divides threshold_proportion and swap_probability by `decay`.
//
// The test size is not renormalised after swapping; it settles wherever the
// score pressures balance, which is usually above the target when many labels
// are rare.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace xstrat {

struct SamplerConfig {
    double target_test_size = 0.2;
    std::size_t epochs = 50;
    double threshold_proportion = 0.1;
    double swap_probability = 0.1;
    double decay = 1.1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(target_test_size > 0.0 && target_test_size < 1.0)) {
            throw InvalidConfig("target_test_size must lie strictly between 0 and 1");
        }
        if (epochs < 1) {
            throw InvalidConfig("epochs must be at least 1");
        }
        if (!(threshold_proportion > 0.0 && threshold_proportion <= 1.0)) {
            throw InvalidConfig("threshold_proportion must lie in (0, 1]");
        }
        if (!(swap_probability >= 0.0 && swap_probability <= 1.0)) {
            throw InvalidConfig("swap_probability must lie in [0, 1]");
        }
        if (!(decay >= 1.0) || !std::isfinite(decay)) {
            throw InvalidConfig("decay must be at least 1");
        }
    }
};

struct EpochTrace {
    std::size_t epoch = 0;
    double mean_abs_label_score = 0.0;
    double achieved_test_size = 0.0;
    std::size_t num_swapped = 0;
};

struct StratifiedResult {
    SplitAssignment assignment;
    std::vector<EpochTrace> trace;
};

namespace detail {
// Random stream tags, so initialisation and per-epoch draws never overlap.
inline constexpr std::uint64_t kInitStream = 0x696E6974ULL;
inline constexpr std::uint64_t kSwapStream = 0x73776170ULL << 32U;
}  // namespace detail

/// Number of test points a random split of `num_points` produces.
inline std::size_t test_quota(std::size_t num_points, double target_test_size) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(num_points) * target_test_size));
}

/// Uniformly random split with exactly round(n * target) test points: the
/// point indices are shuffled and the first quota of them become TEST.
inline SplitAssignment initialize_split(std::size_t num_points, double target_test_size, std::mt19937_64& engine) {
    if (num_points < 1) {
        throw InvalidConfig("cannot split an empty dataset");
    }
    const std::size_t quota = test_quota(num_points, target_test_size);
    if (quota == 0 || quota == num_points) {
        throw InvalidConfig("test size " + std::to_string(target_test_size) + " on " + std::to_string(num_points) +
                            " points leaves one partition empty");
    }
    std::vector<std::size_t> order(num_points);
    for (std::size_t i = 0; i < num_points; ++i) {
        order[i] = i;
    }
    rng::shuffle(std::span<std::size_t>(order), engine);

    SplitAssignment assignment(num_points);
    for (std::size_t i = 0; i < quota; ++i) {
        assignment.set(order[i], Partition::Test);
    }
    return assignment;
}

inline SplitAssignment initialize_split(std::size_t num_points, double target_test_size, std::uint64_t seed) {
    std::mt19937_64 engine(rng::mix(seed, detail::kInitStream, 0));
    auto assignment = initialize_split(num_points, target_test_size, engine);
    assignment.set_seed(seed);
    return assignment;
}

/// Signed, normalised deviation of a test proportion from the target.
inline double label_score(double actual_test_proportion, double target_test_size) {
    const double deviation = actual_test_proportion - target_test_size;
    if (actual_test_proportion >= target_test_size) {
        return deviation / (1.0 - target_test_size);
    }
    return deviation / target_test_size;
}

/// Scores every label; labels without instances score 0.
inline std::vector<double> label_scores(const LabelCounts& counts, double target_test_size) {
    std::vector<double> scores(counts.size(), 0.0);
    for (std::size_t label = 0; label < counts.size(); ++label) {
        if (counts.total(static_cast<LabelId>(label)) > 0) {
            scores[label] =
                label_score(actual_test_proportion(counts.train[label], counts.test[label]), target_test_size);
        }
    }
    return scores;
}

/// Contribution of one label's score to a point in partition `where`.
/// Over-represented labels (score > 0) push their test points out and pull
/// their train points in; under-represented labels do the opposite.
constexpr double oriented_score(double label_score, Partition where) noexcept {
    if (label_score > 0) {
        return where == Partition::Test ? label_score : -label_score;
    }
    return where == Partition::Train ? -label_score : label_score;
}

inline std::vector<double> point_scores(const Dataset& dataset, const SplitAssignment& assignment,
                                        std::span<const double> label_scores, Parallelism parallelism = {}) {
    require_matching(dataset, assignment);
    std::vector<double> scores(dataset.num_points(), 0.0);
    parallel_for(dataset.num_points(), parallelism.resolve(), [&](std::size_t point) {
        double score = 0.0;
        for (LabelId label : dataset.labels_of(point)) {
            score += oriented_score(label_scores[label], assignment[point]);
        }
        scores[point] = score;
    });
    return scores;
}

/// Nearest-rank (1 - threshold_proportion) quantile of `scores`: at most
/// floor(threshold_proportion * n) points lie strictly above it. Returns
/// -infinity when every point should be eligible.
inline double threshold_score(std::span<const double> scores, double threshold_proportion) {
    const std::size_t n = scores.size();
    if (n == 0) {
        return std::numeric_limits<double>::infinity();
    }
    // Tolerance absorbs representation error in products like 0.1 * 30.
    const auto above = static_cast<std::size_t>(
        std::min<double>(static_cast<double>(n), std::floor(threshold_proportion * static_cast<double>(n) + 1e-9)));
    if (above >= n) {
        return -std::numeric_limits<double>::infinity();
    }
    std::vector<double> sorted(scores.begin(), scores.end());
    const auto rank = static_cast<std::ptrdiff_t>(n - above - 1);
    std::nth_element(sorted.begin(), sorted.begin() + rank, sorted.end());
    return sorted[static_cast<std::size_t>(rank)];
}

/// Per-point uniform draws that depend only on (seed, epoch, point).
struct PointDraws {
    std::uint64_t seed = 0;
    std::uint64_t epoch = 0;

    [[nodiscard]] double operator()(std::size_t point) const noexcept {
        return rng::uniform01(seed, detail::kSwapStream | epoch, point);
    }
};

struct SwapOutcome {
    double threshold = 0.0;
    std::size_t num_swapped = 0;
};

/// Flips each point scoring strictly above the threshold with probability
/// `swap_probability`. Decisions are made from the scores alone, so all
/// flips of one pass are independent of each other. Points whose `movable`
/// entry is 0 still count towards the quantile but are never flipped; an
/// empty mask makes every point movable.
inline SwapOutcome swap_pass(std::span<const double> scores, double threshold_proportion, double swap_probability,
                             const PointDraws& draws, SplitAssignment& assignment, Parallelism parallelism = {},
                             std::span<const std::uint8_t> movable = {}) {
    if (scores.size() != assignment.size()) {
        throw std::invalid_argument("score vector and assignment differ in length");
    }
    if (!movable.empty() && movable.size() != scores.size()) {
        throw std::invalid_argument("movable mask and scores differ in length");
    }
    SwapOutcome outcome;
    outcome.threshold = threshold_score(scores, threshold_proportion);
    std::vector<std::uint8_t> flip(scores.size(), 0);
    parallel_for(scores.size(), parallelism.resolve(), [&](std::size_t point) {
        const bool may_move = movable.empty() || movable[point] != 0;
        if (may_move && scores[point] > outcome.threshold && draws(point) < swap_probability) {
            flip[point] = 1;
        }
    });
    for (std::size_t point = 0; point < flip.size(); ++point) {
        if (flip[point] != 0) {
            assignment.flip(point);
            ++outcome.num_swapped;
        }
    }
    return outcome;
}

/// Value of a decayed parameter in a given epoch; epoch 1 uses the initial
/// value.
inline double decay_schedule(double initial_value, double decay, std::size_t epoch) {
    if (epoch < 1) {
        throw std::invalid_argument("epochs are numbered from 1");
    }
    return initial_value / std::pow(decay, static_cast<double>(epoch - 1));
}

inline StratifiedResult stratified_split(const Dataset& dataset, const SamplerConfig& config,
                                         Parallelism parallelism = {}) {
    config.validate();
    if (dataset.num_points() < 2) {
        throw InvalidConfig("stratified sampling needs at least two points");
    }

    StratifiedResult result{initialize_split(dataset.num_points(), config.target_test_size, config.seed), {}};
    result.trace.reserve(config.epochs);
    const double present = static_cast<double>(std::max<std::size_t>(1, dataset.num_present_labels()));
    // Points without labels keep their initial partition.
    std::vector<std::uint8_t> movable(dataset.num_points());
    for (std::size_t point = 0; point < dataset.num_points(); ++point) {
        movable[point] = dataset.labels_of(point).empty() ? 0 : 1;
    }

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const LabelCounts counts = count_labels(dataset, result.assignment, parallelism);
        const std::vector<double> labels = label_scores(counts, config.target_test_size);
        const std::vector<double> points = point_scores(dataset, result.assignment, labels, parallelism);

        const double threshold_proportion = decay_schedule(config.threshold_proportion, config.decay, epoch);
        const double swap_probability = decay_schedule(config.swap_probability, config.decay, epoch);
        const SwapOutcome outcome = swap_pass(points, threshold_proportion, swap_probability,
                                              PointDraws{config.seed, epoch}, result.assignment, parallelism, movable);

        double abs_sum = 0.0;
        for (double s : labels) {
            abs_sum += std::abs(s);
        }
        result.trace.push_back(EpochTrace{
            epoch, abs_sum / present,
            static_cast<double>(result.assignment.test_count()) / static_cast<double>(dataset.num_points()),
            outcome.num_swapped});
    }
    return result;
}

}  // namespace xstrat

#endif
