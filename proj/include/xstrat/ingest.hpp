#ifndef XSTRAT_INGEST_HPP
#define XSTRAT_INGEST_HPP

// Reading and writing the extreme-classification repository text format:
//
//   num_points num_features num_labels
//   l1,l2,...,lk f1:v1 f2:v2 ...
//
// Label ids are 0-based. The label list may be empty, and a line may carry
// no features at all. Everything after the label block is kept verbatim.

#include <charconv>
#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "errors.hpp"

namespace xstrat {

struct RepoHeader {
    std::size_t num_points = 0;
    std::size_t num_features = 0;
    std::size_t num_labels = 0;
};

/// Receives non-fatal findings, e.g. duplicate labels on a line.
using WarningSink = std::function<void(std::size_t line, const std::string& message)>;

namespace detail {

inline bool is_blank(char c) { return c == ' ' || c == '\t'; }

inline std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

template<typename Int>
bool parse_uint(std::string_view token, Int& out) {
    if (token.empty()) {
        return false;
    }
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

inline std::vector<std::string_view> split_blank(std::string_view text) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && is_blank(text[pos])) {
            ++pos;
        }
        std::size_t end = pos;
        while (end < text.size() && !is_blank(text[end])) {
            ++end;
        }
        if (end > pos) {
            tokens.push_back(text.substr(pos, end - pos));
        }
        pos = end;
    }
    return tokens;
}

inline RepoHeader parse_header(std::string_view line) {
    const auto tokens = split_blank(strip_cr(line));
    RepoHeader header;
    if (tokens.size() != 3 || !parse_uint(tokens[0], header.num_points) ||
        !parse_uint(tokens[1], header.num_features) || !parse_uint(tokens[2], header.num_labels)) {
        throw ParseError(1, "malformed header, expected 'num_points num_features num_labels'");
    }
    return header;
}

/// Offset of the first blank-delimited token containing ':', or the line
/// length when there is none.
inline std::size_t feature_boundary(std::string_view line) {
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && is_blank(line[pos])) {
            ++pos;
        }
        const std::size_t start = pos;
        while (pos < line.size() && !is_blank(line[pos])) {
            if (line[pos] == ':') {
                return start;
            }
            ++pos;
        }
    }
    return line.size();
}

}  // namespace detail

/// Parses a whole repository-format stream. Duplicate labels on a line are
/// dropped and reported through `warn`; every other irregularity throws a
/// ParseError carrying the offending line number.
inline Dataset parse_repo_format(std::istream& input, const WarningSink& warn = {}) {
    std::string text;
    if (!std::getline(input, text)) {
        throw ParseError(1, "missing header");
    }
    const RepoHeader header = detail::parse_header(text);

    std::vector<std::vector<LabelId>> label_sets;
    std::vector<std::string> lines;
    std::vector<std::size_t> payload_offsets;
    label_sets.reserve(header.num_points);
    lines.reserve(header.num_points);
    payload_offsets.reserve(header.num_points);

    std::size_t line_no = 1;
    while (label_sets.size() < header.num_points) {
        if (!std::getline(input, text)) {
            throw ParseError(line_no + 1, "header declares " + std::to_string(header.num_points) +
                                              " points but the input ends after " + std::to_string(label_sets.size()));
        }
        ++line_no;
        const std::string_view line = detail::strip_cr(text);
        const std::size_t boundary = detail::feature_boundary(line);

        std::vector<LabelId> labels;
        std::string_view block = line.substr(0, boundary);
        std::size_t pos = 0;
        while (pos <= block.size()) {
            std::size_t end = pos;
            while (end < block.size() && block[end] != ',' && !detail::is_blank(block[end])) {
                ++end;
            }
            const std::string_view token = block.substr(pos, end - pos);
            if (!token.empty()) {
                LabelId label = 0;
                if (!detail::parse_uint(token, label)) {
                    throw ParseError(line_no, "label '" + std::string(token) + "' is not a non-negative integer");
                }
                if (label >= header.num_labels) {
                    throw ParseError(line_no, "label " + std::to_string(label) + " is not below num_labels " +
                                                  std::to_string(header.num_labels));
                }
                labels.push_back(label);
            }
            pos = end + 1;
        }
        std::sort(labels.begin(), labels.end());
        if (const auto dup = std::unique(labels.begin(), labels.end()); dup != labels.end()) {
            if (warn) {
                warn(line_no, "dropped " + std::to_string(labels.end() - dup) + " duplicate label(s)");
            }
            labels.erase(dup, labels.end());
        }

        label_sets.push_back(std::move(labels));
        payload_offsets.push_back(boundary);
        lines.emplace_back(line);
    }

    while (std::getline(input, text)) {
        ++line_no;
        if (!detail::split_blank(detail::strip_cr(text)).empty()) {
            throw ParseError(line_no, "more points than the header declares (" + std::to_string(header.num_points) + ")");
        }
    }

    return Dataset(header.num_labels, label_sets, std::move(lines), std::move(payload_offsets), header.num_features);
}

inline Dataset parse_repo_format(std::string_view text, const WarningSink& warn = {}) {
    std::istringstream stream{std::string(text)};
    return parse_repo_format(stream, warn);
}

/// Concatenates a provided train file and test file into one dataset, with
/// the assignment that reproduces the provided split.
inline std::pair<Dataset, SplitAssignment> join_provided_split(const Dataset& train, const Dataset& test) {
    const std::size_t num_labels = std::max(train.num_labels(), test.num_labels());
    std::vector<std::vector<LabelId>> label_sets;
    std::vector<std::string> lines;
    std::vector<std::size_t> offsets;
    std::vector<Partition> partition;
    for (const Dataset* part : {&train, &test}) {
        for (std::size_t i = 0; i < part->num_points(); ++i) {
            const auto labels = part->labels_of(i);
            label_sets.emplace_back(labels.begin(), labels.end());
            lines.emplace_back(part->line(i));
            offsets.push_back(part->line(i).size() - part->feature_payload(i).size());
            partition.push_back(part == &train ? Partition::Train : Partition::Test);
        }
    }
    return {Dataset(num_labels, label_sets, std::move(lines), std::move(offsets),
                    std::max(train.num_features(), test.num_features())),
            SplitAssignment(std::move(partition))};
}

/// Writes the two partitions as repository-format files. Point lines are
/// copied verbatim and keep their relative order.
inline void write_split(const Dataset& dataset, const SplitAssignment& assignment, std::ostream& train,
                        std::ostream& test) {
    require_matching(dataset, assignment);
    const std::size_t num_test = assignment.test_count();
    train << (dataset.num_points() - num_test) << ' ' << dataset.num_features() << ' ' << dataset.num_labels() << '\n';
    test << num_test << ' ' << dataset.num_features() << ' ' << dataset.num_labels() << '\n';
    for (std::size_t point = 0; point < dataset.num_points(); ++point) {
        std::ostream& sink = assignment.in_test(point) ? test : train;
        sink << dataset.line(point) << '\n';
    }
    if (!train || !test) {
        throw std::runtime_error("failed to write split output");
    }
}

/// One line per point: "0" for train, "1" for test.
inline std::string write_assignment_index(const SplitAssignment& assignment) {
    std::string out;
    out.reserve(assignment.size() * 2);
    for (Partition p : assignment.partitions()) {
        out += p == Partition::Test ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline SplitAssignment parse_assignment_index(std::string_view text, std::size_t num_points) {
    std::vector<Partition> partition;
    partition.reserve(num_points);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        ++line_no;
        const std::string_view token = detail::strip_cr(text.substr(pos, end - pos));
        if (token == "0") {
            partition.push_back(Partition::Train);
        } else if (token == "1") {
            partition.push_back(Partition::Test);
        } else {
            throw ParseError(line_no, "expected '0' or '1', found '" + std::string(token) + "'");
        }
        pos = end + 1;
    }
    if (partition.size() != num_points) {
        throw ParseError(0, "index has " + std::to_string(partition.size()) + " entries but the dataset has " +
                                std::to_string(num_points) + " points");
    }
    return SplitAssignment(std::move(partition));
}

}  // namespace xstrat

#endif
