#include "selcheck/game.hpp"

#include <fmt/format.h>

#include <bit>
#include <cmath>
#include <stdexcept>

#include "selcheck/parallel.hpp"

namespace selcheck {

std::vector<int> commands_of(CommandMask mask) {
    std::vector<int> out;
    for (int c = 0; mask != 0; ++c, mask >>= 1) {
        if (mask & 1U) out.push_back(c + 1);
    }
    return out;
}

CommandMask mask_of(std::span<const int> commands) {
    CommandMask m = 0;
    for (int c : commands) {
        if (c < 1 || c > kMaxGameCommands) throw std::out_of_range(fmt::format("command {} out of range", c));
        m |= CommandMask{1} << (c - 1);
    }
    return m;
}

std::vector<CommandMask> enumerate_designer_strategies(int n, int k) {
    if (n < 1 || n > kMaxGameCommands)
        throw std::out_of_range(fmt::format("n={} outside [1, {}]", n, kMaxGameCommands));
    if (k < 1 || k > n) throw std::out_of_range(fmt::format("k={} outside [1, {}]", k, n));

    std::vector<CommandMask> out;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
        CommandMask m = 0;
        for (int c : idx) m |= CommandMask{1} << c;
        out.push_back(m);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

std::vector<CommandMask> enumerate_attacker_strategies(int n) {
    if (n < 1 || n > kMaxGameCommands)
        throw std::out_of_range(fmt::format("n={} outside [1, {}]", n, kMaxGameCommands));
    std::vector<CommandMask> out(std::size_t{1} << n);
    for (std::size_t l = 0; l < out.size(); ++l) out[l] = static_cast<CommandMask>(l);
    return out;
}

namespace {

double weight_of(CommandMask mask, std::span<const double> weights) {
    double s = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (mask & (CommandMask{1} << c)) s += weights[c];
    }
    return s;
}

}  // namespace

RewardCost reward_cost(CommandMask checked, CommandMask compromised, std::span<const double> weights,
                       double big_m) {
    if (checked == 0) throw std::invalid_argument("checked subset must be non-empty");
    if (weights.size() < static_cast<std::size_t>(std::bit_width(checked | compromised)))
        throw std::out_of_range("subset references a command without a weight");
    if (checked == compromised) return {big_m, -big_m};
    if ((checked & compromised) == 0 && compromised != 0) return {-big_m, big_m};
    const double denom = weight_of(checked | compromised, weights);
    return {weight_of(checked, weights) / denom, weight_of(compromised, weights) / denom};
}

GameInstance build_game(std::span<const double> weights, int k, double big_m) {
    const int n = static_cast<int>(weights.size());
    if (n < 1) throw std::invalid_argument("game needs at least one command");
    if (n > kMaxGameCommands)
        throw std::out_of_range(fmt::format("{} commands exceeds the enumeration cap of {}", n, kMaxGameCommands));
    if (k == n) throw std::invalid_argument("k equals the command count; every command is checked, no game needed");
    if (k < 1 || k > n) throw std::out_of_range(fmt::format("k={} outside [1, {})", k, n));
    if (!(big_m > 0.0)) throw std::invalid_argument("big_m must be positive");
    for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("weights must be positive");
    }

    GameInstance g;
    g.num_commands = n;
    g.budget = k;
    g.weights.assign(weights.begin(), weights.end());
    g.designer = enumerate_designer_strategies(n, k);
    g.attacker = enumerate_attacker_strategies(n);
    g.big_m = big_m;
    g.reward.resize(g.rows() * g.cols());
    g.cost.resize(g.rows() * g.cols());
    for (std::size_t j = 0; j < g.rows(); ++j) {
        for (std::size_t l = 0; l < g.cols(); ++l) {
            auto rc = reward_cost(g.designer[j], g.attacker[l], g.weights, big_m);
            g.reward[j * g.cols() + l] = rc.reward;
            g.cost[j * g.cols() + l] = rc.cost;
        }
    }
    return g;
}

GameInstance build_game(const Task& task, int k, double big_m) {
    if (task.num_commands < 1) throw std::invalid_argument("task issues no commands");
    if (k < task.min_checks)
        throw std::out_of_range(fmt::format("k={} below min_checks={} for task {}", k, task.min_checks, task.id));
    return build_game(task.weights, k, big_m);
}

LinearProgram lp_for_attacker_strategy(const GameInstance& game, std::size_t l, double epsilon) {
    if (l >= game.cols()) throw std::out_of_range(fmt::format("attacker strategy {} out of range", l));
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be strictly positive");
    const std::size_t nx = game.rows();
    if (epsilon * static_cast<double>(nx) > 1.0) throw std::invalid_argument("epsilon too large for a distribution");

    LinearProgram lp;
    lp.objective.resize(nx);
    for (std::size_t j = 0; j < nx; ++j) lp.objective[j] = game.lambda(j, l);
    lp.lower_bounds.assign(nx, epsilon);

    lp.constraints.reserve(game.cols());
    lp.constraints.push_back({std::vector<double>(nx, 1.0), Relation::equal, 1.0});
    for (std::size_t other = 0; other < game.cols(); ++other) {
        if (other == l) continue;
        Constraint c;
        c.coefficients.resize(nx);
        for (std::size_t j = 0; j < nx; ++j) c.coefficients[j] = game.zeta(j, l) - game.zeta(j, other);
        c.relation = Relation::greater_equal;
        c.rhs = 0.0;
        lp.constraints.push_back(std::move(c));
    }
    return lp;
}

GameSolution solve_game(const GameInstance& game, const GameOptions& options) {
    const std::size_t nq = game.cols();
    std::vector<LpSolution> results(nq);
    parallel_for(nq, options.jobs, [&](std::size_t l) {
        results[l] = solve_lp_lazy(lp_for_attacker_strategy(game, l, options.epsilon), 1, options.simplex);
    });

    GameSolution best;
    best.statuses.reserve(nq);
    bool found = false;
    for (std::size_t l = 0; l < nq; ++l) {
        best.statuses.push_back(results[l].status);
        if (results[l].status != LpStatus::optimal) continue;
        if (!found || results[l].objective > best.objective + 1e-9) {
            found = true;
            best.attacker_strategy = l;
            best.objective = results[l].objective;
            best.probabilities = results[l].values;
        }
    }
    if (!found) throw std::runtime_error("no attacker strategy admits a feasible leader LP");
    return best;
}

GameInstance apply_detection_accuracy(GameInstance game, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::out_of_range("detection accuracy must lie in [0, 1]");
    const double miss = 1.0 - p;
    for (double& v : game.reward) v *= 1.0 - miss;
    for (double& v : game.cost) v *= 1.0 + miss;
    return game;
}

std::vector<double> marginal_check_probability(const GameInstance& game, const GameSolution& solution) {
    if (solution.probabilities.size() != game.rows())
        throw std::invalid_argument("solution does not match the game's designer strategies");
    std::vector<double> out(static_cast<std::size_t>(game.num_commands), 0.0);
    for (std::size_t j = 0; j < game.rows(); ++j) {
        for (int c = 0; c < game.num_commands; ++c) {
            if (game.designer[j] & (CommandMask{1} << c)) out[static_cast<std::size_t>(c)] += solution.probabilities[j];
        }
    }
    return out;
}

GameCache::Entry GameCache::solve(std::span<const double> weights, int k, double big_m, double accuracy,
                                  const GameOptions& options) {
    Key key{std::vector<double>(weights.begin(), weights.end()), k, big_m, accuracy, options.epsilon};
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
    }
    GameInstance game = build_game(weights, k, big_m);
    if (accuracy < 1.0) game = apply_detection_accuracy(std::move(game), accuracy);
    Entry entry{game.designer, solve_game(game, options)};
    std::lock_guard lock(mutex_);
    return entries_.emplace(std::move(key), std::move(entry)).first->second;
}

std::size_t GameCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

}  // namespace selcheck
