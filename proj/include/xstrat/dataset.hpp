#ifndef XSTRAT_DATASET_HPP
#define XSTRAT_DATASET_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "parallel.hpp"

namespace xstrat {

using LabelId = std::uint32_t;

enum class Partition : std::uint8_t { Train = 0, Test = 1 };

constexpr Partition other(Partition p) noexcept {
    return p == Partition::Train ? Partition::Test : Partition::Train;
}

/// An immutable multi-label dataset: for every point a sorted, duplicate-free
/// set of label ids, plus the point's original text line so that splits can
/// be written back without touching the features.
///
/// Label ids are dense in [0, num_labels()). Ids that no point carries are
/// kept in the vocabulary but reported as absent; metrics skip them.
class Dataset {
public:
    Dataset() = default;

    /// Builds a dataset from per-point label lists. Lists are sorted and
    /// deduplicated. `lines` holds the verbatim text of each point and
    /// `payload_offsets` the position in that line where the features start;
    /// both may be empty, in which case a label-only line is synthesised.
    Dataset(std::size_t num_labels, const std::vector<std::vector<LabelId>>& label_sets,
            std::vector<std::string> lines = {}, std::vector<std::size_t> payload_offsets = {},
            std::size_t num_features = 0)
        : m_NumLabels(num_labels), m_NumFeatures(num_features), m_Frequency(num_labels, 0),
          m_Lines(std::move(lines)), m_PayloadOffsets(std::move(payload_offsets)) {
        if (!m_Lines.empty() && m_Lines.size() != label_sets.size()) {
            throw std::invalid_argument("number of text lines does not match number of points");
        }
        if (m_PayloadOffsets.size() != m_Lines.size()) {
            throw std::invalid_argument("number of payload offsets does not match number of lines");
        }
        m_Offsets.reserve(label_sets.size() + 1);
        m_Offsets.push_back(0);
        std::vector<LabelId> scratch;
        for (const auto& set : label_sets) {
            scratch.assign(set.begin(), set.end());
            std::sort(scratch.begin(), scratch.end());
            scratch.erase(std::unique(scratch.begin(), scratch.end()), scratch.end());
            for (LabelId label : scratch) {
                if (label >= num_labels) {
                    throw std::invalid_argument("label id " + std::to_string(label) +
                                                " out of range for vocabulary of size " + std::to_string(num_labels));
                }
                ++m_Frequency[label];
            }
            m_Labels.insert(m_Labels.end(), scratch.begin(), scratch.end());
            m_Offsets.push_back(m_Labels.size());
        }
        if (m_Lines.empty()) {
            synthesise_lines();
        }
        m_NumPresent = static_cast<std::size_t>(
            std::count_if(m_Frequency.begin(), m_Frequency.end(), [](std::uint32_t f) { return f > 0; }));
    }

    [[nodiscard]] std::size_t num_points() const noexcept { return m_Offsets.empty() ? 0 : m_Offsets.size() - 1; }
    [[nodiscard]] std::size_t num_labels() const noexcept { return m_NumLabels; }
    [[nodiscard]] std::size_t num_features() const noexcept { return m_NumFeatures; }

    [[nodiscard]] std::span<const LabelId> labels_of(std::size_t point) const {
        return std::span<const LabelId>(m_Labels).subspan(m_Offsets[point], m_Offsets[point + 1] - m_Offsets[point]);
    }

    [[nodiscard]] std::span<const std::uint32_t> label_frequency() const noexcept { return m_Frequency; }
    [[nodiscard]] std::uint32_t frequency(LabelId label) const { return m_Frequency[label]; }
    [[nodiscard]] bool is_present(LabelId label) const { return m_Frequency[label] > 0; }
    [[nodiscard]] std::size_t num_present_labels() const noexcept { return m_NumPresent; }

    /// Number of (point, label) pairs.
    [[nodiscard]] std::size_t total_instances() const noexcept { return m_Labels.size(); }

    /// The point's original line, without the line terminator.
    [[nodiscard]] std::string_view line(std::size_t point) const { return m_Lines[point]; }

    /// Everything after the label block, verbatim.
    [[nodiscard]] std::string_view feature_payload(std::size_t point) const {
        return std::string_view(m_Lines[point]).substr(m_PayloadOffsets[point]);
    }

private:
    void synthesise_lines() {
        m_Lines.reserve(num_points());
        m_PayloadOffsets.reserve(num_points());
        for (std::size_t i = 0; i < num_points(); ++i) {
            std::string text;
            for (LabelId label : labels_of(i)) {
                if (!text.empty()) {
                    text += ',';
                }
                text += std::to_string(label);
            }
            m_PayloadOffsets.push_back(text.size());
            m_Lines.push_back(std::move(text));
        }
    }

    std::size_t m_NumLabels = 0;
    std::size_t m_NumFeatures = 0;
    std::size_t m_NumPresent = 0;
    std::vector<std::size_t> m_Offsets;
    std::vector<LabelId> m_Labels;
    std::vector<std::uint32_t> m_Frequency;
    std::vector<std::string> m_Lines;
    std::vector<std::size_t> m_PayloadOffsets;
};

/// Train/test membership of every point, plus the seed that produced it when
/// it came from a sampler.
class SplitAssignment {
public:
    SplitAssignment() = default;
    explicit SplitAssignment(std::size_t num_points, Partition initial = Partition::Train,
                             std::optional<std::uint64_t> seed = std::nullopt)
        : m_Partition(num_points, initial), m_Seed(seed) {}
    explicit SplitAssignment(std::vector<Partition> partition, std::optional<std::uint64_t> seed = std::nullopt)
        : m_Partition(std::move(partition)), m_Seed(seed) {}

    [[nodiscard]] std::size_t size() const noexcept { return m_Partition.size(); }
    [[nodiscard]] Partition operator[](std::size_t point) const { return m_Partition[point]; }
    [[nodiscard]] bool in_test(std::size_t point) const { return m_Partition[point] == Partition::Test; }
    void set(std::size_t point, Partition p) { m_Partition[point] = p; }
    void flip(std::size_t point) { m_Partition[point] = other(m_Partition[point]); }

    [[nodiscard]] std::span<const Partition> partitions() const noexcept { return m_Partition; }

    [[nodiscard]] std::size_t test_count() const noexcept {
        return static_cast<std::size_t>(std::count(m_Partition.begin(), m_Partition.end(), Partition::Test));
    }
    [[nodiscard]] std::size_t train_count() const noexcept { return size() - test_count(); }

    [[nodiscard]] std::optional<std::uint64_t> seed() const noexcept { return m_Seed; }
    void set_seed(std::optional<std::uint64_t> seed) noexcept { m_Seed = seed; }

    friend bool operator==(const SplitAssignment& a, const SplitAssignment& b) {
        return a.m_Partition == b.m_Partition;
    }

private:
    std::vector<Partition> m_Partition;
    std::optional<std::uint64_t> m_Seed;
};

/// Per-label instance tallies in each partition.
struct LabelCounts {
    std::vector<std::uint32_t> train;
    std::vector<std::uint32_t> test;

    [[nodiscard]] std::size_t size() const noexcept { return train.size(); }
    [[nodiscard]] std::uint32_t total(LabelId label) const { return train[label] + test[label]; }

    friend bool operator==(const LabelCounts&, const LabelCounts&) = default;
};

inline void require_matching(const Dataset& dataset, const SplitAssignment& assignment) {
    if (assignment.size() != dataset.num_points()) {
        throw std::invalid_argument("assignment covers " + std::to_string(assignment.size()) +
                                    " points but the dataset has " + std::to_string(dataset.num_points()));
    }
}

/// Tallies each label's instances per partition. Shards are merged in a fixed
/// order, so the result does not depend on the worker count.
inline LabelCounts count_labels(const Dataset& dataset, const SplitAssignment& assignment,
                                Parallelism parallelism = {}) {
    require_matching(dataset, assignment);
    const std::size_t num_labels = dataset.num_labels();
    const std::size_t workers = std::min(parallelism.resolve(), std::max<std::size_t>(1, dataset.num_points() / 4096));

    std::vector<std::vector<std::uint32_t>> test_shards(workers);
    parallel_shards(dataset.num_points(), workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
        auto& tally = test_shards[shard];
        tally.assign(num_labels, 0);
        for (std::size_t point = begin; point < end; ++point) {
            if (assignment.in_test(point)) {
                for (LabelId label : dataset.labels_of(point)) {
                    ++tally[label];
                }
            }
        }
    });

    LabelCounts counts;
    counts.test.assign(num_labels, 0);
    for (const auto& tally : test_shards) {
        for (std::size_t label = 0; label < tally.size(); ++label) {
            counts.test[label] += tally[label];
        }
    }
    counts.train.resize(num_labels);
    const auto frequency = dataset.label_frequency();
    for (std::size_t label = 0; label < num_labels; ++label) {
        counts.train[label] = frequency[label] - counts.test[label];
    }
    return counts;
}

/// Fraction of a label's instances that sit in the test partition.
inline double actual_test_proportion(std::uint32_t train, std::uint32_t test) {
    const std::uint32_t total = train + test;
    if (total == 0) {
        throw std::logic_error("test proportion requested for a label with no instances");
    }
    return static_cast<double>(test) / static_cast<double>(total);
}

inline std::vector<double> actual_test_proportions(const LabelCounts& counts) {
    std::vector<double> proportions(counts.size());
    for (std::size_t label = 0; label < counts.size(); ++label) {
        proportions[label] = actual_test_proportion(counts.train[label], counts.test[label]);
    }
    return proportions;
}

}  // namespace xstrat

#endif
