#ifndef XSTRAT_REPORT_HPP
#define XSTRAT_REPORT_HPP

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "metrics.hpp"
#include "stratified.hpp"

namespace xstrat {

inline constexpr int kReportSchemaVersion = 1;

/// Fraction as a percentage rounded to one decimal, e.g. 0.32437 -> 32.4.
inline double percent_1dp(double fraction) {
    return std::round(fraction * 1000.0) / 10.0;
}

inline nlohmann::json to_json(const ProportionHistogram& histogram) {
    nlohmann::json bins = nlohmann::json::array();
    for (std::size_t b = 0; b < histogram.bins.size(); ++b) {
        const auto& bin = histogram.bins[b];
        bins.push_back({{"bin_low", bin.low},
                        {"bin_high", bin.high},
                        {"head_count", bin.head_count},
                        {"tail_count", bin.tail_count},
                        {"head_frac", histogram.head_fraction(b)},
                        {"tail_frac", histogram.tail_fraction(b)}});
    }
    return {{"num_labels", histogram.num_labels},
            {"reference_test_size", histogram.reference_test_size},
            {"bins", std::move(bins)}};
}

inline nlohmann::json to_json(const DatasetStats& stats) {
    return {{"num_labels", stats.num_labels},
            {"num_present_labels", stats.num_present_labels},
            {"num_points", stats.num_points},
            {"num_train", stats.num_train},
            {"num_test", stats.num_test},
            {"avg_labels_per_sample", stats.avg_labels_per_sample},
            {"avg_samples_per_label", stats.avg_samples_per_label},
            {"tail_label_fraction", stats.tail_label_fraction},
            {"tail_label_pct", percent_1dp(stats.tail_label_fraction)}};
}

inline nlohmann::json to_json(const SplitReport& report) {
    return {{"schema_version", kReportSchemaVersion},
            {"kl_divergence", report.kl_divergence},
            {"kl_smoothed_reverse", report.kl_smoothed_reverse},
            {"smoothing_epsilon", report.smoothing_epsilon},
            {"missing_from_test", report.missing_from_test},
            {"missing_from_test_pct", percent_1dp(report.missing_from_test)},
            {"missing_from_train", report.missing_from_train},
            {"missing_from_train_pct", percent_1dp(report.missing_from_train)},
            {"achieved_test_size", report.achieved_test_size},
            {"histogram", to_json(report.histogram)},
            {"dataset_stats", to_json(report.dataset_stats)}};
}

inline void write_histogram_csv(const ProportionHistogram& histogram, std::ostream& out) {
    out << "bin_low,bin_high,head_count,tail_count,head_frac,tail_frac\n";
    out << std::setprecision(10);
    for (std::size_t b = 0; b < histogram.bins.size(); ++b) {
        const auto& bin = histogram.bins[b];
        out << bin.low << ',' << bin.high << ',' << bin.head_count << ',' << bin.tail_count << ','
            << histogram.head_fraction(b) << ',' << histogram.tail_fraction(b) << '\n';
    }
}

inline void write_trace_csv(const std::vector<EpochTrace>& trace, std::ostream& out) {
    out << "epoch,mean_abs_label_score,achieved_test_size,num_swapped\n";
    out << std::setprecision(10);
    for (const auto& row : trace) {
        out << row.epoch << ',' << row.mean_abs_label_score << ',' << row.achieved_test_size << ','
            << row.num_swapped << '\n';
    }
}

}  // namespace xstrat

#endif
