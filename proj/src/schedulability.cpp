#include "selcheck/schedulability.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <stdexcept>

namespace selcheck {

namespace {

struct CoreSlot {
    int core;
    std::size_t rank;
};

CoreSlot locate(const Taskset& taskset, TaskId id) {
    const auto& p = taskset.platform;
    auto it = p.partition.find(id);
    if (it == p.partition.end())
        throw std::invalid_argument("task " + std::to_string(id) + " is not partitioned to any core");
    int core = it->second;
    if (core < 0 || core >= static_cast<int>(p.priorities.size()))
        throw std::invalid_argument("task " + std::to_string(id) + " maps to a core without a priority order");
    const auto& order = p.priorities[static_cast<std::size_t>(core)];
    auto pos = std::find(order.begin(), order.end(), id);
    if (pos == order.end())
        throw std::invalid_argument("task " + std::to_string(id) + " missing from its core's priority order");
    return {core, static_cast<std::size_t>(pos - order.begin())};
}

int checks_for(const CheckAssignment& assignment, TaskId id) {
    auto it = assignment.find(id);
    if (it == assignment.end())
        throw std::invalid_argument("check assignment does not cover task " + std::to_string(id));
    return it->second;
}

template <class ExecTime>
double bound_with(const Task& task, const Taskset& taskset, ExecTime exec) {
    CoreSlot slot = locate(taskset, task.id);
    const auto& order = taskset.platform.priorities[static_cast<std::size_t>(slot.core)];
    double r = exec(task);
    const double d = static_cast<double>(task.deadline);
    for (std::size_t i = 0; i < slot.rank; ++i) {
        const Task& hp = taskset.task(order[i]);
        r += (1.0 + d / static_cast<double>(hp.period)) * exec(hp);
    }
    return r;
}

}  // namespace

TimeUnits tee_wcet(const Task& task, int k) {
    if (k < 0 || k > task.num_commands)
        throw std::out_of_range(fmt::format("k={} outside [0, {}] for task {}", k, task.num_commands, task.id));
    return task.wcet + static_cast<TimeUnits>(k) * task.check_overhead;
}

double response_time_bound(const Task& task, const Taskset& taskset, const CheckAssignment& assignment) {
    return bound_with(task, taskset, [&](const Task& t) {
        return static_cast<double>(tee_wcet(t, checks_for(assignment, t.id)));
    });
}

double vanilla_response_time(const Task& task, const Taskset& taskset) {
    return bound_with(task, taskset, [](const Task& t) { return static_cast<double>(t.wcet); });
}

double checking_overhead(const Task& task, const Taskset& taskset, const CheckAssignment& assignment) {
    return bound_with(task, taskset, [&](const Task& t) {
        return static_cast<double>(checks_for(assignment, t.id)) * static_cast<double>(t.check_overhead);
    });
}

ResponseTimeReport is_schedulable(const Taskset& taskset, const CheckAssignment& assignment) {
    ResponseTimeReport report;
    report.tasks.reserve(taskset.tasks.size());
    for (const auto& t : taskset.tasks) {
        TaskResponse row;
        row.id = t.id;
        row.vanilla = vanilla_response_time(t, taskset);
        row.tee = response_time_bound(t, taskset, assignment);
        row.overhead = checking_overhead(t, taskset, assignment);
        row.deadline = t.deadline;
        row.schedulable = row.tee <= static_cast<double>(t.deadline) + kDeadlineTolerance;
        report.schedulable = report.schedulable && row.schedulable;
        report.tasks.push_back(row);
    }
    return report;
}

bool all_schedulable(const Taskset& taskset, const CheckAssignment& assignment) {
    for (const auto& t : taskset.tasks) {
        if (response_time_bound(t, taskset, assignment) > static_cast<double>(t.deadline) + kDeadlineTolerance)
            return false;
    }
    return true;
}

std::string to_csv(const ResponseTimeReport& report) {
    std::string out = "task,R,R_TEE,O,deadline,schedulable\n";
    for (const auto& r : report.tasks) {
        out += fmt::format("{},{},{},{},{},{}\n", r.id, r.vanilla, r.tee, r.overhead, r.deadline,
                           r.schedulable ? 1 : 0);
    }
    return out;
}

std::vector<TaskId> lower_priority_tasks(const Taskset& taskset, TaskId id) {
    CoreSlot slot = locate(taskset, id);
    const auto& order = taskset.platform.priorities[static_cast<std::size_t>(slot.core)];
    return {order.begin() + static_cast<std::ptrdiff_t>(slot.rank) + 1, order.end()};
}

}  // namespace selcheck
