#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xstrat/xstrat.hpp"

namespace xstrat::cli {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct SamplerFlags {
    std::string method = "stratified";
    double test_size = 0.2;
    std::uint64_t seed = 0;
    std::size_t epochs = 50;
    double threshold_proportion = 0.1;
    double swap_probability = 0.1;
    double decay = 1.1;
    double timeout_mins = 0.0;
    std::size_t threads = 0;

    [[nodiscard]] SamplerConfig config() const {
        return SamplerConfig{test_size, epochs, threshold_proportion, swap_probability, decay, seed};
    }
};

void add_sampler_flags(CLI::App& cmd, SamplerFlags& flags) {
    cmd.add_option("--test-size", flags.test_size, "Target fraction of points in the test set")
        ->check(CLI::Range(0.0, 1.0));
    cmd.add_option("--seed", flags.seed, "Random seed");
    cmd.add_option("--epochs", flags.epochs, "Stratified sampling epochs")->check(CLI::PositiveNumber);
    cmd.add_option("--threshold-proportion", flags.threshold_proportion,
                   "Initial fraction of highest-scoring points eligible for swapping");
    cmd.add_option("--swap-probability", flags.swap_probability, "Initial probability of swapping an eligible point");
    cmd.add_option("--decay", flags.decay, "Per-epoch divisor of threshold proportion and swap probability");
    cmd.add_option("--timeout-mins", flags.timeout_mins,
                   "Give up on the iterative method after this many minutes (0: never)")
        ->check(CLI::NonNegativeNumber);
    cmd.add_option("--threads", flags.threads, "Worker threads (0: all cores); results do not depend on it")
        ->envname("XSTRAT_THREADS");
}

Dataset load_dataset(const std::string& path, std::ostream& err) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    try {
        return parse_repo_format(file, [&](std::size_t line, const std::string& message) {
            err << "warning: " << path << ":" << line << ": " << message << '\n';
        });
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream content;
    content << file.rdbuf();
    return content.str();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    return file;
}

struct SplitRun {
    std::optional<SplitAssignment> assignment;
    std::vector<EpochTrace> trace;
    double wall_mins = 0.0;
};

SplitRun run_method(const Dataset& dataset, const std::string& method, const SamplerFlags& flags) {
    SplitRun run;
    const auto start = Clock::now();
    if (method == "stratified") {
        auto result = stratified_split(dataset, flags.config(), Parallelism{flags.threads});
        run.assignment = std::move(result.assignment);
        run.trace = std::move(result.trace);
    } else if (method == "random") {
        run.assignment = random_split(dataset.num_points(), flags.test_size, flags.seed);
    } else {
        IterativeOptions options;
        options.seed = flags.seed;
        if (flags.timeout_mins > 0.0) {
            options.deadline = start + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double, std::ratio<60>>(flags.timeout_mins));
        }
        run.assignment = iterative_split(dataset, flags.test_size, options);
    }
    run.wall_mins = std::chrono::duration<double, std::ratio<60>>(Clock::now() - start).count();
    return run;
}

const std::vector<std::string> kMethods{"stratified", "random", "iterative"};

int cmd_split(const SamplerFlags& flags, const std::string& input, const std::string& out_train,
              const std::string& out_test, const std::string& out_index, const std::string& trace_path,
              std::ostream& out, std::ostream& err) {
    const Dataset dataset = load_dataset(input, err);
    SplitRun run = run_method(dataset, flags.method, flags);
    if (!run.assignment) {
        err << "error: " << flags.method << " sampling did not finish within " << flags.timeout_mins << " minute(s)\n";
        out << json{{"schema_version", kReportSchemaVersion}, {"method", flags.method}, {"status", "did not finish"}}
                   .dump(2)
            << '\n';
        return kTimeout;
    }
    const SplitAssignment& assignment = *run.assignment;

    if (!out_train.empty() || !out_test.empty()) {
        if (out_train.empty() || out_test.empty()) {
            throw CLI::ValidationError("--out-train and --out-test must be given together");
        }
        auto train = open_output(out_train);
        auto test = open_output(out_test);
        write_split(dataset, assignment, train, test);
    }
    if (!out_index.empty()) {
        auto index = open_output(out_index);
        index << write_assignment_index(assignment);
    }
    if (!trace_path.empty()) {
        auto trace = open_output(trace_path);
        write_trace_csv(run.trace, trace);
    }

    json report = to_json(evaluate_split(dataset, assignment));
    report["method"] = flags.method;
    report["seed"] = flags.seed;
    report["target_test_size"] = flags.test_size;
    report["status"] = "ok";
    out << report.dump(2) << '\n';
    return kSuccess;
}

int cmd_evaluate(const std::string& input, const std::string& index_path, const std::string& train_path,
                 const std::string& test_path, const std::string& hist_csv, std::ostream& out, std::ostream& err) {
    Dataset dataset;
    SplitAssignment assignment;
    if (!index_path.empty()) {
        if (input.empty() || !train_path.empty() || !test_path.empty()) {
            throw CLI::ValidationError("--index requires --input and excludes --train/--test");
        }
        dataset = load_dataset(input, err);
        assignment = parse_assignment_index(read_file(index_path), dataset.num_points());
    } else {
        if (train_path.empty() || test_path.empty()) {
            throw CLI::ValidationError("give either --index or both --train and --test");
        }
        auto joined = join_provided_split(load_dataset(train_path, err), load_dataset(test_path, err));
        if (!input.empty()) {
            const Dataset full = load_dataset(input, err);
            if (full.num_points() != joined.first.num_points()) {
                throw std::runtime_error("train and test hold " + std::to_string(joined.first.num_points()) +
                                         " points but '" + input + "' declares " +
                                         std::to_string(full.num_points()));
            }
            if (full.num_labels() != joined.first.num_labels()) {
                throw std::runtime_error("label vocabulary of train/test does not match '" + input + "'");
            }
        }
        dataset = std::move(joined.first);
        assignment = std::move(joined.second);
    }

    const SplitReport report = evaluate_split(dataset, assignment);
    if (!hist_csv.empty()) {
        auto csv = open_output(hist_csv);
        write_histogram_csv(report.histogram, csv);
    }
    json doc = to_json(report);
    doc["status"] = "ok";
    out << doc.dump(2) << '\n';
    return kSuccess;
}

int cmd_compare(const SamplerFlags& flags, const std::string& input, const std::vector<std::string>& methods,
                std::ostream& out, std::ostream& err) {
    const Dataset dataset = load_dataset(input, err);
    out << "method,kl,missing_test_pct,achieved_test_size,wall_mins\n";
    for (const auto& method : methods) {
        const SplitRun run = run_method(dataset, method, flags);
        std::ostringstream row;
        row << std::setprecision(6);
        row << method << ',';
        if (!run.assignment) {
            row << "-,-,-," << run.wall_mins;
        } else {
            const SplitReport report = evaluate_split(dataset, *run.assignment);
            row << report.kl_divergence << ',' << percent_1dp(report.missing_from_test) << ','
                << report.achieved_test_size << ',' << run.wall_mins;
        }
        out << row.str() << '\n';
    }
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stratified train/test splitting and split evaluation for extreme multi-label datasets", "xstrat"};
    app.require_subcommand(1);

    SamplerFlags flags;
    std::string input;
    std::string out_train;
    std::string out_test;
    std::string out_index;
    std::string trace_path;
    std::string index_path;
    std::string train_path;
    std::string test_path;
    std::string hist_csv;
    std::vector<std::string> methods;

    auto* split = app.add_subcommand("split", "Partition a dataset into train and test sets");
    split->add_option("--input", input, "Repository-format dataset")->required();
    split->add_option("--method", flags.method, "Sampling method")->check(CLI::IsMember(kMethods));
    add_sampler_flags(*split, flags);
    split->add_option("--out-train", out_train, "Train partition output (repository format)");
    split->add_option("--out-test", out_test, "Test partition output (repository format)");
    split->add_option("--out-index", out_index, "Assignment index output (one 0/1 per point)");
    split->add_option("--trace", trace_path, "Per-epoch trace CSV (stratified method)");

    auto* evaluate = app.add_subcommand("evaluate", "Report label-distribution metrics of an existing split");
    evaluate->add_option("--input", input, "Repository-format dataset");
    evaluate->add_option("--index", index_path, "Assignment index for --input");
    evaluate->add_option("--train", train_path, "Train partition (repository format)");
    evaluate->add_option("--test", test_path, "Test partition (repository format)");
    evaluate->add_option("--hist-csv", hist_csv, "Write the test-proportion histogram as CSV");

    auto* compare = app.add_subcommand("compare", "Run several sampling methods and tabulate their metrics");
    compare->add_option("--input", input, "Repository-format dataset")->required();
    compare->add_option("--methods", methods, "Comma separated methods")
        ->required()
        ->delimiter(',')
        ->check(CLI::IsMember(kMethods));
    add_sampler_flags(*compare, flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
        if (split->parsed()) {
            return cmd_split(flags, input, out_train, out_test, out_index, trace_path, out, err);
        }
        if (evaluate->parsed()) {
            return cmd_evaluate(input, index_path, train_path, test_path, hist_csv, out, err);
        }
        return cmd_compare(flags, input, methods, out, err);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
}

}  // namespace xstrat::cli
