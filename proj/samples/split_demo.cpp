// Builds a small long-tailed dataset, splits it randomly and with stratified
// sampling, and prints the test-set metrics of both.

#include <cstdio>
#include <random>
#include <vector>

#include "xstrat/xstrat.hpp"

int main() {
    using namespace xstrat;
    std::mt19937_64 engine(7);
    constexpr std::size_t kPoints = 5000;
    constexpr std::size_t kLabels = 1500;
    std::vector<std::vector<LabelId>> sets(kPoints);
    for (auto& set : sets) {
        const std::size_t k = 1 + rng::bounded(engine, 6);
        for (std::size_t j = 0; j < k; ++j) {
            // Squaring a uniform draw skews popularity towards low ids.
            const double u = rng::to_unit(engine());
            set.push_back(static_cast<LabelId>(u * u * kLabels));
        }
    }
    const Dataset dataset(kLabels, sets);

    SamplerConfig config;
    config.target_test_size = 0.2;
    config.seed = 42;

    const auto show = [&](const char* name, const SplitAssignment& split) {
        const SplitReport r = evaluate_split(dataset, split);
        std::printf("%-10s  KL %.4f  missing from test %5.1f%%  test size %.3f\n", name, r.kl_divergence,
                    percent_1dp(r.missing_from_test), r.achieved_test_size);
    };
    show("random", random_split(dataset.num_points(), config.target_test_size, config.seed));
    show("stratified", stratified_split(dataset, config).assignment);
    return 0;
}
