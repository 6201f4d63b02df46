#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace selcheck {

/// All timing parameters are integers in one fixed unit (microseconds by default).
using TimeUnits = std::int64_t;
using TaskId = std::int64_t;

inline constexpr const char* kDefaultTimeUnit = "us";

/// One periodic task together with its actuation-checking parameters.
struct Task {
    TaskId id = 0;
    TimeUnits wcet = 0;
    TimeUnits period = 0;
    TimeUnits deadline = 0;
    int num_commands = 0;
    int min_checks = 0;
    std::vector<double> weights;     // one positive weight per command
    TimeUnits check_overhead = 0;    // enclave entry + check + exit, per checked command

    double utilization() const { return static_cast<double>(wcet) / static_cast<double>(period); }

    friend bool operator==(const Task&, const Task&) = default;
};

/// Static partition of tasks onto cores plus a fixed priority order per core.
struct Platform {
    int num_cores = 1;
    std::map<TaskId, int> partition;
    std::vector<std::vector<TaskId>> priorities;  // per core, highest priority first

    friend bool operator==(const Platform&, const Platform&) = default;
};

struct Taskset {
    std::string time_unit = kDefaultTimeUnit;
    std::vector<Task> tasks;
    Platform platform;

    const Task& task(TaskId id) const;
    const Task* find(TaskId id) const;

    friend bool operator==(const Taskset&, const Taskset&) = default;
};

/// Number of commands checked per job, keyed by task id.
using CheckAssignment = std::map<TaskId, int>;

CheckAssignment uniform_assignment(const Taskset& taskset, int k);
CheckAssignment min_checks_assignment(const Taskset& taskset);
CheckAssignment full_checks_assignment(const Taskset& taskset);

struct Violation {
    TaskId task = 0;
    std::string field;
    std::string message;
};

/// Returns every invariant violation; an empty list means the taskset is well formed.
std::vector<Violation> validate(const Taskset& taskset);

enum class OverheadPreset { linux_optee, freertos, custom };

inline constexpr TimeUnits kLinuxOpteeOverheadUs = 66'000;
inline constexpr TimeUnits kFreertosOverheadUs = 2'000;

OverheadPreset parse_overhead_preset(const std::string& name);

/// Overwrites check_overhead of every task that issues commands. `custom` leaves the taskset untouched.
void apply_overhead_preset(Taskset& taskset, OverheadPreset preset);

}  // namespace selcheck
