#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "selcheck/lp.hpp"
#include "selcheck/model.hpp"

namespace selcheck {

/// Set of command indices as a bitmask: bit c stands for command c + 1.
using CommandMask = std::uint32_t;

/// Enumeration of attacker strategies is exhaustive (2^N), so N is capped.
inline constexpr int kMaxGameCommands = 20;
inline constexpr double kDefaultBigM = 100.0;
inline constexpr double kDefaultEpsilon = 1e-6;

/// 1-based command numbers contained in `mask`, ascending.
std::vector<int> commands_of(CommandMask mask);
CommandMask mask_of(std::span<const int> commands);

/// All k-subsets of {1..n} in lexicographic order.
std::vector<CommandMask> enumerate_designer_strategies(int n, int k);

/// All 2^n subsets of {1..n} in binary-counting order; index l is the mask l, so index 0 is the empty set.
std::vector<CommandMask> enumerate_attacker_strategies(int n);

struct RewardCost {
    double reward = 0.0;  // lambda
    double cost = 0.0;    // zeta
};

/// Scores one (checked subset, compromised subset) pair:
///  - identical sets: the attack is caught, reward +big_m and cost -big_m;
///  - disjoint sets with a real attack: nothing compromised is checked, reward -big_m and cost +big_m;
///  - otherwise reward = w(checked) / w(checked u compromised) and cost = w(compromised) / w(same union).
/// The empty attack falls in the last case (reward 1, cost 0).
RewardCost reward_cost(CommandMask checked, CommandMask compromised, std::span<const double> weights,
                       double big_m);

struct GameInstance {
    int num_commands = 0;
    int budget = 0;
    std::vector<double> weights;
    std::vector<CommandMask> designer;
    std::vector<CommandMask> attacker;
    std::vector<double> reward;  // |designer| x |attacker|, row-major
    std::vector<double> cost;
    double big_m = kDefaultBigM;

    std::size_t rows() const { return designer.size(); }
    std::size_t cols() const { return attacker.size(); }
    double lambda(std::size_t j, std::size_t l) const { return reward[j * cols() + l]; }
    double zeta(std::size_t j, std::size_t l) const { return cost[j * cols() + l]; }
};

/// Builds the full game for checking `k` of `weights.size()` commands.
/// Requires 1 <= k < N <= kMaxGameCommands.
GameInstance build_game(std::span<const double> weights, int k, double big_m = kDefaultBigM);

/// As above for a task; additionally requires min_checks <= k.
GameInstance build_game(const Task& task, int k, double big_m = kDefaultBigM);

/// Leader LP for attacker strategy l: maximize sum_j x_j lambda(j,l) such that l is an attacker
/// best response, sum_j x_j = 1 and x_j >= epsilon. Row 0 is the simplex row; rows 1.. are the
/// best-response rows in attacker order, skipping l.
LinearProgram lp_for_attacker_strategy(const GameInstance& game, std::size_t l, double epsilon);

struct GameSolution {
    std::size_t attacker_strategy = 0;  // l*
    std::vector<double> probabilities;  // over game.designer
    double objective = 0.0;
    std::vector<LpStatus> statuses;     // one per attacker strategy
};

struct GameOptions {
    double epsilon = kDefaultEpsilon;
    int jobs = 1;
    SimplexOptions simplex{};
};

/// Solves every attacker LP and keeps the feasible one with the largest objective
/// (lowest index on ties). Throws std::runtime_error when every LP is infeasible.
GameSolution solve_game(const GameInstance& game, const GameOptions& options = {});

/// Scales every reward by p and every cost by (2 - p) for a checker with detection accuracy p.
GameInstance apply_detection_accuracy(GameInstance game, double p);

/// Probability that each command (index c for command c + 1) is checked in a job.
std::vector<double> marginal_check_probability(const GameInstance& game, const GameSolution& solution);

/// Thread-safe memo of game solutions keyed by everything that determines them.
class GameCache {
public:
    struct Entry {
        std::vector<CommandMask> designer;
        GameSolution solution;
    };

    Entry solve(std::span<const double> weights, int k, double big_m, double accuracy, const GameOptions& options);
    std::size_t size() const;

private:
    using Key = std::tuple<std::vector<double>, int, double, double, double>;
    mutable std::mutex mutex_;
    std::map<Key, Entry> entries_;
};

}  // namespace selcheck
