#pragma once

#include <string>
#include <vector>

#include "selcheck/model.hpp"

namespace selcheck {

/// Response times at or below deadline + kDeadlineTolerance count as met.
inline constexpr double kDeadlineTolerance = 1e-9;

/// Execution time of one job when `k` of its commands are checked: C + k * C^o.
TimeUnits tee_wcet(const Task& task, int k);

/// Closed-form upper bound on the response time with checking enabled:
///
///   R_i = C_i(k_i) + sum_{h in hp(i)} (1 + D_i / T_h) * C_h(k_h)
///
/// where hp(i) is the set of higher-priority tasks on the same core. The
/// assignment must cover the task and everything above it on its core.
double response_time_bound(const Task& task, const Taskset& taskset, const CheckAssignment& assignment);

/// The same bound with no commands checked anywhere.
double vanilla_response_time(const Task& task, const Taskset& taskset);

/// Extra response time caused by checking, i.e. the TEE bound minus the vanilla bound.
double checking_overhead(const Task& task, const Taskset& taskset, const CheckAssignment& assignment);

struct TaskResponse {
    TaskId id = 0;
    double vanilla = 0.0;
    double tee = 0.0;
    double overhead = 0.0;
    TimeUnits deadline = 0;
    bool schedulable = false;
};

struct ResponseTimeReport {
    std::vector<TaskResponse> tasks;
    bool schedulable = true;
};

/// Evaluates every task; throws std::invalid_argument when the assignment misses a task.
ResponseTimeReport is_schedulable(const Taskset& taskset, const CheckAssignment& assignment);

/// Cheaper yes/no form of is_schedulable.
bool all_schedulable(const Taskset& taskset, const CheckAssignment& assignment);

/// CSV with header `task,R,R_TEE,O,deadline,schedulable`.
std::string to_csv(const ResponseTimeReport& report);

/// Tasks on the same core as `id` that sit strictly below it in priority order.
std::vector<TaskId> lower_priority_tasks(const Taskset& taskset, TaskId id);

}  // namespace selcheck
