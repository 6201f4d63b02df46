#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selcheck/game.hpp"
#include "selcheck/planner.hpp"
#include "selcheck/rng.hpp"

namespace selcheck {

enum class AttackMode { persistent, one_shot };

std::string to_string(AttackMode m);
AttackMode parse_attack_mode(const std::string& name);

struct AttackSpec {
    TaskId victim = 0;
    /// Compromised commands. Zero means one command drawn uniformly at random per trial.
    CommandMask compromised = 0;
    /// Index of the first attacked job; drawn from [0, random_trigger_span) per trial when unset.
    std::optional<std::int64_t> trigger_job;
    std::int64_t random_trigger_span = 100;
    AttackMode mode = AttackMode::persistent;
    /// Probability that checking a compromised command flags it.
    double detection_accuracy = 1.0;
};

struct SimResult {
    std::vector<std::int64_t> delays;  // jobs from first attacked job to detection, inclusive; 0 if undetected
    std::vector<bool> detected;
    double mean = 0.0;                 // over detected trials
    double p99 = 0.0;                  // nearest-rank, over detected trials
    std::size_t undetected = 0;
};

/// Index j drawn with probability x[j] by inverting the cumulative sum at one uniform draw.
/// Throws std::invalid_argument unless x is non-negative and sums to 1 within 1e-6.
std::size_t roulette_select(std::span<const double> x, Rng& rng);

/// Monte-Carlo detection delay for attacks on one task of a plan. Each trial runs on its own
/// stream derived from (seed, trial), so results do not depend on `jobs`.
SimResult run_detection_experiment(const CheckPlan& plan, const AttackSpec& attack, std::size_t trials,
                                   std::int64_t max_jobs, std::uint64_t seed, int jobs = 1);

/// Mean of K/N over tasks that issue commands (1 when none do).
double coverage_ratio(const CheckPlan& plan);

/// Per-command check probability of a task plan (1 for every command of a deterministic plan).
std::vector<double> marginal_check_probability(const TaskPlan& plan);

enum class Scheme { unsecured, fine_grain, selective };

std::string to_string(Scheme s);

/// unsecured checks nothing, fine_grain checks everything, selective uses the planner's K*.
bool scheme_schedulable(const Taskset& taskset, Scheme scheme, const PlannerOptions& options = {});

double acceptance_ratio(std::span<const Taskset> batch, Scheme scheme, const PlannerOptions& options = {});

/// `trial,delay_jobs,detected_flag` rows followed by a `summary,<mean>,<p99>` row.
std::string to_csv(const SimResult& result);

}  // namespace selcheck
