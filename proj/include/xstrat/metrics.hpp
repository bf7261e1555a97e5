#ifndef XSTRAT_METRICS_HPP
#define XSTRAT_METRICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"

namespace xstrat {

namespace detail {
inline std::uint64_t sum(std::span<const std::uint32_t> values) {
    std::uint64_t total = 0;
    for (auto v : values) {
        total += v;
    }
    return total;
}
}  // namespace detail

/// KL(q || p) in nats, where q is the label distribution of the test set and
/// p that of the whole dataset. Labels missing from the test set contribute 0.
inline double kl_divergence(const LabelCounts& counts) {
    const std::uint64_t test_total = detail::sum(counts.test);
    if (test_total == 0) {
        throw UndefinedMetric("KL divergence is undefined for a test set without label instances");
    }
    const std::uint64_t grand_total = test_total + detail::sum(counts.train);
    double kl = 0.0;
    for (std::size_t label = 0; label < counts.size(); ++label) {
        if (counts.test[label] == 0) {
            continue;
        }
        const double q = static_cast<double>(counts.test[label]) / static_cast<double>(test_total);
        const double p = static_cast<double>(counts.total(static_cast<LabelId>(label))) / static_cast<double>(grand_total);
        kl += q * std::log(q / p);
    }
    // Rounding can leave a tiny negative residue when q == p.
    return std::max(0.0, kl);
}

inline double kl_divergence(const Dataset& dataset, const SplitAssignment& assignment) {
    return kl_divergence(count_labels(dataset, assignment));
}

/// Reverse direction, KL(p || q_eps), with the test distribution smoothed by
/// adding `epsilon` to every present label's count. Finite even when labels
/// are missing from the test set.
inline double smoothed_reverse_kl(const LabelCounts& counts, double epsilon) {
    std::uint64_t grand_total = 0;
    std::uint64_t test_total = 0;
    std::size_t present = 0;
    for (std::size_t label = 0; label < counts.size(); ++label) {
        const auto total = counts.total(static_cast<LabelId>(label));
        grand_total += total;
        test_total += counts.test[label];
        present += total > 0 ? 1 : 0;
    }
    const double q_norm = static_cast<double>(test_total) + epsilon * static_cast<double>(present);
    if (grand_total == 0 || q_norm <= 0.0) {
        throw UndefinedMetric("smoothed KL divergence is undefined without label instances");
    }
    double kl = 0.0;
    for (std::size_t label = 0; label < counts.size(); ++label) {
        const auto total = counts.total(static_cast<LabelId>(label));
        if (total == 0) {
            continue;
        }
        const double p = static_cast<double>(total) / static_cast<double>(grand_total);
        const double q = (static_cast<double>(counts.test[label]) + epsilon) / q_norm;
        kl += p * std::log(p / q);
    }
    return std::max(0.0, kl);
}

/// Fraction of present labels with no instance in `which`.
inline double missing_label_fraction(const LabelCounts& counts, Partition which) {
    std::size_t present = 0;
    std::size_t missing = 0;
    for (std::size_t label = 0; label < counts.size(); ++label) {
        if (counts.total(static_cast<LabelId>(label)) == 0) {
            continue;
        }
        ++present;
        const auto in_partition = which == Partition::Test ? counts.test[label] : counts.train[label];
        missing += in_partition == 0 ? 1 : 0;
    }
    return present == 0 ? 0.0 : static_cast<double>(missing) / static_cast<double>(present);
}

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::size_t head_count = 0;
    std::size_t tail_count = 0;
};

/// Distribution of per-label test proportions over equal-width bins
/// [0, 1/k), [1/k, 2/k), ..., [(k-1)/k, 1], split into head and tail labels.
struct ProportionHistogram {
    std::vector<HistogramBin> bins;
    std::size_t num_labels = 0;
    /// Test share of all points; the value every label would have under
    /// perfect stratification.
    double reference_test_size = 0.0;

    [[nodiscard]] double head_fraction(std::size_t bin) const {
        return num_labels == 0 ? 0.0 : static_cast<double>(bins[bin].head_count) / static_cast<double>(num_labels);
    }
    [[nodiscard]] double tail_fraction(std::size_t bin) const {
        return num_labels == 0 ? 0.0 : static_cast<double>(bins[bin].tail_count) / static_cast<double>(num_labels);
    }
};

inline constexpr std::size_t kDefaultTailThreshold = 10;

/// Bin index of test_count / total, computed in integers so that exact
/// boundaries like 3/10 never fall into the bin below.
constexpr std::size_t proportion_bin(std::uint64_t test, std::uint64_t total, std::size_t num_bins) noexcept {
    const auto bin = static_cast<std::size_t>((test * num_bins) / total);
    return bin < num_bins ? bin : num_bins - 1;
}

inline ProportionHistogram proportion_histogram(const Dataset& dataset, const SplitAssignment& assignment,
                                                std::size_t num_bins = 10,
                                                std::size_t tail_threshold = kDefaultTailThreshold) {
    if (num_bins == 0) {
        throw std::invalid_argument("histogram needs at least one bin");
    }
    const LabelCounts counts = count_labels(dataset, assignment);
    ProportionHistogram histogram;
    histogram.bins.resize(num_bins);
    for (std::size_t b = 0; b < num_bins; ++b) {
        histogram.bins[b].low = static_cast<double>(b) / static_cast<double>(num_bins);
        histogram.bins[b].high = static_cast<double>(b + 1) / static_cast<double>(num_bins);
    }
    for (std::size_t label = 0; label < counts.size(); ++label) {
        const std::uint32_t total = counts.total(static_cast<LabelId>(label));
        if (total == 0) {
            continue;
        }
        auto& bin = histogram.bins[proportion_bin(counts.test[label], total, num_bins)];
        if (total >= tail_threshold) {
            ++bin.head_count;
        } else {
            ++bin.tail_count;
        }
        ++histogram.num_labels;
    }
    histogram.reference_test_size =
        dataset.num_points() == 0
            ? 0.0
            : static_cast<double>(assignment.test_count()) / static_cast<double>(dataset.num_points());
    return histogram;
}

struct DatasetStats {
    std::size_t num_labels = 0;          // vocabulary size
    std::size_t num_present_labels = 0;  // labels with at least one instance
    std::size_t num_points = 0;
    std::size_t num_train = 0;
    std::size_t num_test = 0;
    double avg_labels_per_sample = 0.0;
    double avg_samples_per_label = 0.0;
    double tail_label_fraction = 0.0;
};

/// Whole-dataset statistics. Per-label averages and the tail share are taken
/// over the full vocabulary, so a label that never occurs counts as tail.
inline DatasetStats dataset_stats(const Dataset& dataset, const SplitAssignment& assignment,
                                  std::size_t tail_threshold = kDefaultTailThreshold) {
    require_matching(dataset, assignment);
    DatasetStats stats;
    stats.num_labels = dataset.num_labels();
    stats.num_present_labels = dataset.num_present_labels();
    stats.num_points = dataset.num_points();
    stats.num_test = assignment.test_count();
    stats.num_train = stats.num_points - stats.num_test;
    const auto instances = static_cast<double>(dataset.total_instances());
    if (stats.num_points > 0) {
        stats.avg_labels_per_sample = instances / static_cast<double>(stats.num_points);
    }
    if (stats.num_labels > 0) {
        stats.avg_samples_per_label = instances / static_cast<double>(stats.num_labels);
        std::size_t tail = 0;
        for (auto f : dataset.label_frequency()) {
            tail += f < tail_threshold ? 1 : 0;
        }
        stats.tail_label_fraction = static_cast<double>(tail) / static_cast<double>(stats.num_labels);
    }
    return stats;
}

struct ReportOptions {
    std::size_t num_bins = 10;
    std::size_t tail_threshold = kDefaultTailThreshold;
    double smoothing_epsilon = 1e-6;
};

struct SplitReport {
    double kl_divergence = 0.0;
    double kl_smoothed_reverse = 0.0;
    double smoothing_epsilon = 0.0;
    double missing_from_test = 0.0;
    double missing_from_train = 0.0;
    double achieved_test_size = 0.0;
    ProportionHistogram histogram;
    DatasetStats dataset_stats;
};

/// All split metrics at once. Throws UndefinedMetric when the test set holds
/// no label instances.
inline SplitReport evaluate_split(const Dataset& dataset, const SplitAssignment& assignment,
                                  const ReportOptions& options = {}) {
    require_matching(dataset, assignment);
    if (assignment.test_count() == 0) {
        throw UndefinedMetric("the test set is empty");
    }
    const LabelCounts counts = count_labels(dataset, assignment);
    SplitReport report;
    report.kl_divergence = kl_divergence(counts);
    report.kl_smoothed_reverse = smoothed_reverse_kl(counts, options.smoothing_epsilon);
    report.smoothing_epsilon = options.smoothing_epsilon;
    report.missing_from_test = missing_label_fraction(counts, Partition::Test);
    report.missing_from_train = missing_label_fraction(counts, Partition::Train);
    report.achieved_test_size =
        static_cast<double>(assignment.test_count()) / static_cast<double>(dataset.num_points());
    report.histogram = proportion_histogram(dataset, assignment, options.num_bins, options.tail_threshold);
    report.dataset_stats = xstrat::dataset_stats(dataset, assignment, options.tail_threshold);
    return report;
}

}  // namespace xstrat

#endif
