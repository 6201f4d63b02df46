#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "selcheck/planner.hpp"
#include "selcheck/workload.hpp"

namespace selcheck {

struct SweepRow {
    std::string bin;       // utilization range "0.01-0.10" or coverage-ratio bin "0.2-0.3" / "1.0"
    std::string scenario;  // medium, high, or n5 for the fixed-N trade-off sweep
    std::string metric;
    double value = 0.0;    // NaN when the bin has no samples
    std::size_t samples = 0;
    std::uint64_t seed = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;

    /// Header `bin,scenario,metric,value,samples,seed`.
    std::string to_csv() const;
    const SweepRow& find(const std::string& bin, const std::string& scenario, const std::string& metric) const;
};

struct SweepOptions {
    int tasksets_per_bucket = 50;
    std::size_t trials = 1000;
    /// Jobs simulated per attack before giving up.
    std::int64_t max_jobs = 10000;
    std::uint64_t seed = 1;
    int jobs = 1;
    int num_cores = 4;
    PartitionHeuristic partition = PartitionHeuristic::first_fit;
    PlannerOptions planner;
};

inline constexpr int kNumBuckets = 10;
inline constexpr int kTradeoffCommands = 5;

std::string bucket_label(int bucket);

/// Coverage-ratio bin of a plan: "1.0" for full coverage, otherwise the 0.1-wide bin in [0.2, 1.0).
std::string coverage_bin(double cr);
std::vector<std::string> coverage_bins();

/// Per bucket and scenario: `coverage_ratio` averaged over plan-feasible tasksets and
/// `feasible_ratio` (plan-feasible / generated).
SweepResult sweep_coverage(const SweepOptions& options);

/// Every task issues five commands. Tasksets from all buckets are binned by coverage ratio; per bin:
/// `schedulability_gain` (selective minus fine-grain), `mean_delay_selective`, `mean_delay_fine_grain`.
SweepResult sweep_detection_tradeoff(const SweepOptions& options);

/// Per bucket and scenario: acceptance ratio of `unsecured`, `selective`, `fine_grain`. Tasksets are
/// not filtered for vanilla schedulability; a batch slot whose draws never partition counts as a
/// rejection for every scheme.
SweepResult sweep_acceptance(const SweepOptions& options);

}  // namespace selcheck
