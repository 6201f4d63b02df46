#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "selcheck/game.hpp"
#include "selcheck/model.hpp"

namespace selcheck {

/// Per-task output of the planner.
struct TaskPlan {
    TaskId id = 0;
    int num_commands = 0;
    int k_star = 0;
    /// Checked subsets and their selection probabilities. Both empty when k_star == num_commands
    /// (every command is checked in every job).
    std::vector<CommandMask> strategies;
    std::vector<double> probabilities;
    /// l* and the leader objective of the solved game, when a game was needed.
    std::optional<std::size_t> attacker_strategy;
    std::optional<double> objective;

    bool deterministic() const { return k_star == num_commands; }
};

struct CheckPlan {
    std::vector<TaskPlan> tasks;
    bool feasible = true;

    const TaskPlan& task(TaskId id) const;
    CheckAssignment assignment() const;
};

/// The minimum checking requirement alone already breaks a deadline.
struct Infeasible {
    std::vector<TaskId> violating;
};

using PlanResult = std::variant<CheckPlan, Infeasible>;

struct PlannerOptions {
    double big_m = kDefaultBigM;
    double epsilon = kDefaultEpsilon;
    double detection_accuracy = 1.0;
    /// Optional cap K <= floor(fraction * N) applied on top of the timing search.
    double max_check_fraction = 1.0;
    int jobs = 1;
    /// When false only K* is computed; strategies and probabilities stay empty.
    bool solve_games = true;
    /// Shared memo for game solutions; a private one is used when null.
    GameCache* cache = nullptr;
};

class PartitionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest k in [min_checks, N] that keeps the task itself and every lower-priority task on its
/// core within deadline, other tasks fixed at `fixed`. Binary search; relies on the response-time
/// bound being monotone in k. Throws std::domain_error when even min_checks is not schedulable.
int max_feasible_k(const Task& task, const Taskset& taskset, const CheckAssignment& fixed);

/// Picks K* for every task from highest to lowest priority and solves the checking game for
/// every task that cannot check all of its commands.
PlanResult plan(const Taskset& taskset, const PlannerOptions& options = {});

/// Task ids ordered by period (shorter first), ties by id.
std::vector<TaskId> rate_monotonic_priorities(std::span<const Task> tasks);

enum class PartitionHeuristic { first_fit, worst_fit };

std::string to_string(PartitionHeuristic h);
PartitionHeuristic parse_partition_heuristic(const std::string& name);

/// First-fit in rate-monotonic order with a per-core utilization cap of 1.
/// Throws PartitionError when a task fits on no core.
Platform first_fit_partition(std::span<const Task> tasks, int num_cores);

/// Same order and cap, but each task goes to the least-loaded core (lowest index on ties).
Platform worst_fit_partition(std::span<const Task> tasks, int num_cores);

Platform partition(std::span<const Task> tasks, int num_cores, PartitionHeuristic heuristic);

}  // namespace selcheck
