#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "selcheck/model.hpp"
#include "selcheck/planner.hpp"
#include "selcheck/workload.hpp"

namespace selcheck {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// {"time_unit", "cores", "tasks": [{id, wcet, period, deadline, num_commands, min_checks, weights,
/// check_overhead, core, priority}]}; priority 0 is the highest on its core.
std::string taskset_to_json(const Taskset& taskset);

/// Inverse of taskset_to_json. When no task carries `core`, tasks are partitioned first-fit in
/// rate-monotonic order. Throws ParseError on malformed documents (validation is left to the caller).
Taskset parse_taskset(const std::string& text);

/// Per task: id, num_commands, k_star and, when a game was solved, the checked subsets (1-based
/// command numbers), their probabilities, the attacker's best response and the leader objective.
std::string plan_to_json(const CheckPlan& plan);
CheckPlan parse_plan(const std::string& text);

/// Every WorkloadSpec field; missing fields keep their defaults. `buckets` may list several buckets.
std::string workload_spec_to_json(const WorkloadSpec& spec);
WorkloadSpec parse_workload_spec(const std::string& text);
std::vector<int> parse_spec_buckets(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace selcheck
