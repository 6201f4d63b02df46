#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "selcheck/model.hpp"
#include "selcheck/planner.hpp"
#include "selcheck/rng.hpp"

namespace selcheck {

enum class ActuationScenario { medium, high };

std::string to_string(ActuationScenario s);
ActuationScenario parse_scenario(const std::string& name);

/// Random taskset recipe. Utilization bucket i draws the total utilization from
/// [(0.01 + 0.1 i) P, (0.1 + 0.1 i) P].
struct WorkloadSpec {
    int num_cores = 4;
    int min_tasks_per_core = 3;
    int max_tasks_per_core = 10;
    double period_min_ms = 10.0;
    double period_max_ms = 1000.0;
    int bucket = 0;
    ActuationScenario scenario = ActuationScenario::medium;
    /// Overrides the scenario's command-count range when positive.
    int fixed_num_commands = 0;
    double min_check_fraction = 0.2;  // N_min = ceil(fraction * N)
    double overhead_fraction = 0.1;   // C^o = fraction * C
    int tasksets_per_bucket = 50;
    std::uint64_t seed = 1;
    int retry_budget = 100;
    /// Keep only tasksets whose unchecked response-time bounds meet every deadline.
    bool require_vanilla_schedulable = true;
    PartitionHeuristic partition = PartitionHeuristic::first_fit;

    double utilization_lo() const { return (0.01 + 0.1 * bucket) * num_cores; }
    double utilization_hi() const { return (0.1 + 0.1 * bucket) * num_cores; }
    int commands_lo() const;
    int commands_hi() const;
};

/// Throws std::invalid_argument for out-of-range fields.
void check_spec(const WorkloadSpec& spec);

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// n values in [lo, hi] summing to `total`, uniformly distributed over that slice of the cube
/// (Stafford's randfixedsum construction). Throws std::invalid_argument if total is outside [n lo, n hi].
std::vector<double> randfixedsum(int n, double total, double lo, double hi, Rng& rng);

/// Log-uniform integer periods in [lo, hi].
std::vector<TimeUnits> gen_periods(int n, TimeUnits lo, TimeUnits hi, Rng& rng);

/// One partitioned, rate-monotonic taskset in microseconds. Redraws up to spec.retry_budget
/// times until partitioning (and, if requested, vanilla schedulability) succeeds.
Taskset gen_taskset(const WorkloadSpec& spec, Rng& rng);

/// Seed used for taskset `index` of the spec's scenario and bucket.
std::uint64_t taskset_seed(const WorkloadSpec& spec, int index);

}  // namespace selcheck
