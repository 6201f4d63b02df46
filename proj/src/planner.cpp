#include "selcheck/planner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "selcheck/schedulability.hpp"

namespace selcheck {

const TaskPlan& CheckPlan::task(TaskId id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return t;
    }
    throw std::out_of_range(fmt::format("plan has no task {}", id));
}

CheckAssignment CheckPlan::assignment() const {
    CheckAssignment a;
    for (const auto& t : tasks) a[t.id] = t.k_star;
    return a;
}

namespace {

bool meets_deadline(const Task& t, const Taskset& ts, const CheckAssignment& a) {
    return response_time_bound(t, ts, a) <= static_cast<double>(t.deadline) + kDeadlineTolerance;
}

// The task itself plus everything below it on its core.
bool core_tail_schedulable(const Task& task, const std::vector<TaskId>& lower, const Taskset& ts,
                           const CheckAssignment& a) {
    if (!meets_deadline(task, ts, a)) return false;
    return std::all_of(lower.begin(), lower.end(),
                       [&](TaskId id) { return meets_deadline(ts.task(id), ts, a); });
}

}  // namespace

int max_feasible_k(const Task& task, const Taskset& taskset, const CheckAssignment& fixed) {
    const std::vector<TaskId> lower = lower_priority_tasks(taskset, task.id);
    CheckAssignment trial = fixed;

    trial[task.id] = task.min_checks;
    if (!core_tail_schedulable(task, lower, taskset, trial))
        throw std::domain_error(
            fmt::format("task {} core is unschedulable already at min_checks={}", task.id, task.min_checks));

    int lo = task.min_checks;
    int hi = task.num_commands;
    int best = task.min_checks;
    while (lo <= hi) {
        const int mid = lo + (hi - lo) / 2;
        trial[task.id] = mid;
        if (core_tail_schedulable(task, lower, taskset, trial)) {
            best = std::max(best, mid);
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return best;
}

PlanResult plan(const Taskset& taskset, const PlannerOptions& options) {
    if (auto v = validate(taskset); !v.empty())
        throw std::invalid_argument(fmt::format("invalid taskset: task {} {}: {}", v.front().task, v.front().field,
                                                v.front().message));

    CheckAssignment assignment = min_checks_assignment(taskset);
    Infeasible infeasible;
    for (const auto& t : taskset.tasks) {
        if (!meets_deadline(t, taskset, assignment)) infeasible.violating.push_back(t.id);
    }
    if (!infeasible.violating.empty()) return infeasible;

    GameCache local_cache;
    GameCache& cache = options.cache ? *options.cache : local_cache;
    GameOptions game_options;
    game_options.epsilon = options.epsilon;
    game_options.jobs = options.jobs;

    CheckPlan result;
    for (const auto& order : taskset.platform.priorities) {
        for (TaskId id : order) {
            const Task& task = taskset.task(id);
            int k = max_feasible_k(task, taskset, assignment);
            const int cap = static_cast<int>(std::floor(options.max_check_fraction * task.num_commands + 1e-12));
            k = std::max(task.min_checks, std::min(k, cap));
            assignment[id] = k;

            TaskPlan tp;
            tp.id = id;
            tp.num_commands = task.num_commands;
            tp.k_star = k;
            if (!options.solve_games) {
                // K* only.
            } else if (k == 0 && task.num_commands > 0) {
                tp.strategies = {0};
                tp.probabilities = {1.0};
            } else if (k < task.num_commands) {
                auto entry = cache.solve(task.weights, k, options.big_m, options.detection_accuracy, game_options);
                tp.strategies = std::move(entry.designer);
                tp.probabilities = std::move(entry.solution.probabilities);
                tp.attacker_strategy = entry.solution.attacker_strategy;
                tp.objective = entry.solution.objective;
            }
            result.tasks.push_back(std::move(tp));
        }
    }
    // Report tasks in taskset order rather than core/priority order.
    std::vector<TaskPlan> ordered;
    ordered.reserve(result.tasks.size());
    for (const auto& t : taskset.tasks) ordered.push_back(result.task(t.id));
    result.tasks = std::move(ordered);
    return result;
}

std::vector<TaskId> rate_monotonic_priorities(std::span<const Task> tasks) {
    std::vector<const Task*> sorted;
    sorted.reserve(tasks.size());
    for (const auto& t : tasks) sorted.push_back(&t);
    std::stable_sort(sorted.begin(), sorted.end(), [](const Task* a, const Task* b) {
        return a->period != b->period ? a->period < b->period : a->id < b->id;
    });
    std::vector<TaskId> ids;
    ids.reserve(sorted.size());
    for (const Task* t : sorted) ids.push_back(t->id);
    return ids;
}

std::string to_string(PartitionHeuristic h) { return h == PartitionHeuristic::first_fit ? "first-fit" : "worst-fit"; }

PartitionHeuristic parse_partition_heuristic(const std::string& name) {
    if (name == "first-fit") return PartitionHeuristic::first_fit;
    if (name == "worst-fit") return PartitionHeuristic::worst_fit;
    throw std::invalid_argument("unknown partition heuristic '" + name + "'");
}

Platform partition(std::span<const Task> tasks, int num_cores, PartitionHeuristic heuristic) {
    if (num_cores < 1) throw std::invalid_argument("at least one core required");
    Platform p;
    p.num_cores = num_cores;
    p.priorities.assign(static_cast<std::size_t>(num_cores), {});
    std::vector<double> load(static_cast<std::size_t>(num_cores), 0.0);

    std::map<TaskId, const Task*> by_id;
    for (const auto& t : tasks) by_id[t.id] = &t;

    for (TaskId id : rate_monotonic_priorities(tasks)) {
        const double u = by_id.at(id)->utilization();
        std::size_t pick = load.size();
        for (std::size_t c = 0; c < load.size(); ++c) {
            if (load[c] + u > 1.0 + 1e-12) continue;
            if (pick == load.size() || (heuristic == PartitionHeuristic::worst_fit && load[c] < load[pick])) pick = c;
            if (heuristic == PartitionHeuristic::first_fit) break;
        }
        if (pick == load.size()) throw PartitionError(fmt::format("task {} (U={:.4f}) fits on no core", id, u));
        load[pick] += u;
        p.partition[id] = static_cast<int>(pick);
        p.priorities[pick].push_back(id);
    }
    return p;
}

Platform first_fit_partition(std::span<const Task> tasks, int num_cores) {
    return partition(tasks, num_cores, PartitionHeuristic::first_fit);
}

Platform worst_fit_partition(std::span<const Task> tasks, int num_cores) {
    return partition(tasks, num_cores, PartitionHeuristic::worst_fit);
}

}  // namespace selcheck
