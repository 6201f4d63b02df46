#include "selcheck/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "selcheck/parallel.hpp"
#include "selcheck/schedulability.hpp"

namespace selcheck {

std::string to_string(AttackMode m) { return m == AttackMode::persistent ? "persistent" : "one-shot"; }

AttackMode parse_attack_mode(const std::string& name) {
    if (name == "persistent") return AttackMode::persistent;
    if (name == "one-shot" || name == "oneshot" || name == "one_shot") return AttackMode::one_shot;
    throw std::invalid_argument("unknown attack mode '" + name + "'");
}

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::unsecured: return "unsecured";
        case Scheme::fine_grain: return "fine-grain";
        case Scheme::selective: return "selective";
    }
    return "?";
}

std::size_t roulette_select(std::span<const double> x, Rng& rng) {
    if (x.empty()) throw std::invalid_argument("empty distribution");
    double total = 0.0;
    for (double v : x) {
        if (!(v >= 0.0)) throw std::invalid_argument(fmt::format("negative probability {}", v));
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument(fmt::format("probabilities sum to {}", total));

    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] <= 0.0) continue;
        last_positive = j;
        acc += x[j];
        if (u < acc) return j;
    }
    // Rounding left a sliver above the final cumulative value.
    return last_positive;
}

namespace {

struct Trial {
    std::int64_t delay = 0;
    bool detected = false;
};

Trial run_trial(const TaskPlan& tp, const AttackSpec& attack, std::int64_t max_jobs, Rng& rng) {
    CommandMask compromised = attack.compromised;
    if (compromised == 0) {
        compromised = CommandMask{1} << rng.uniform_int(0, tp.num_commands - 1);
    }
    const std::int64_t trigger =
        attack.trigger_job ? *attack.trigger_job : rng.uniform_int(0, attack.random_trigger_span - 1);

    const CommandMask all = tp.num_commands >= 32 ? ~CommandMask{0} : (CommandMask{1} << tp.num_commands) - 1;
    auto checked_in_job = [&]() -> CommandMask {
        if (tp.deterministic()) return all;
        return tp.strategies[roulette_select(tp.probabilities, rng)];
    };
    auto flags = [&](CommandMask checked) {
        const CommandMask hit = checked & compromised;
        if (hit == 0) return false;
        if (attack.detection_accuracy >= 1.0) return true;
        bool any = false;
        for (int c = 0; c < std::popcount(hit); ++c) any = (rng.uniform() < attack.detection_accuracy) || any;
        return any;
    };

    // Jobs before the trigger still draw a checking set; they cannot detect anything.
    for (std::int64_t j = 0; j < trigger; ++j) (void)checked_in_job();

    const std::int64_t attacked_jobs = attack.mode == AttackMode::persistent ? max_jobs : 1;
    for (std::int64_t j = 0; j < attacked_jobs; ++j) {
        if (flags(checked_in_job())) return {j + 1, true};
    }
    return {};
}

double nearest_rank(std::vector<std::int64_t> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
    rank = std::clamp<std::size_t>(rank, 1, v.size());
    return static_cast<double>(v[rank - 1]);
}

}  // namespace

SimResult run_detection_experiment(const CheckPlan& plan, const AttackSpec& attack, std::size_t trials,
                                   std::int64_t max_jobs, std::uint64_t seed, int jobs) {
    const TaskPlan& tp = plan.task(attack.victim);
    if (tp.num_commands < 1) throw std::invalid_argument(fmt::format("task {} issues no commands", tp.id));
    if (tp.num_commands > kMaxGameCommands) throw std::invalid_argument("too many commands");
    if (attack.compromised >> tp.num_commands)
        throw std::invalid_argument("compromised set names a command the task does not issue");
    if (!tp.deterministic() && tp.probabilities.empty())
        throw std::invalid_argument(fmt::format("task {} has no checking distribution", tp.id));
    if (max_jobs < 1) throw std::invalid_argument("max_jobs must be >= 1");
    if (attack.detection_accuracy <= 0.0 || attack.detection_accuracy > 1.0)
        throw std::invalid_argument("detection accuracy must lie in (0, 1]");
    if (!attack.trigger_job && attack.random_trigger_span < 1)
        throw std::invalid_argument("random trigger span must be >= 1");
    if (attack.trigger_job && *attack.trigger_job < 0) throw std::invalid_argument("trigger job must be >= 0");

    std::vector<Trial> out(trials);
    parallel_for(trials, jobs, [&](std::size_t i) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
        out[i] = run_trial(tp, attack, max_jobs, rng);
    });

    SimResult r;
    r.delays.reserve(trials);
    r.detected.reserve(trials);
    std::vector<std::int64_t> hits;
    for (const auto& t : out) {
        r.delays.push_back(t.delay);
        r.detected.push_back(t.detected);
        if (t.detected) hits.push_back(t.delay);
        else ++r.undetected;
    }
    r.mean = hits.empty() ? std::numeric_limits<double>::quiet_NaN()
                          : static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::int64_t{0})) /
                                static_cast<double>(hits.size());
    r.p99 = nearest_rank(std::move(hits), 0.99);
    return r;
}

double coverage_ratio(const CheckPlan& plan) {
    double sum = 0.0;
    int count = 0;
    for (const auto& t : plan.tasks) {
        if (t.num_commands < 1) continue;
        sum += static_cast<double>(t.k_star) / t.num_commands;
        ++count;
    }
    return count == 0 ? 1.0 : sum / count;
}

std::vector<double> marginal_check_probability(const TaskPlan& plan) {
    std::vector<double> p(static_cast<std::size_t>(plan.num_commands), 0.0);
    if (plan.deterministic()) {
        std::fill(p.begin(), p.end(), 1.0);
        return p;
    }
    for (std::size_t j = 0; j < plan.strategies.size(); ++j) {
        for (int c : commands_of(plan.strategies[j])) p[static_cast<std::size_t>(c - 1)] += plan.probabilities[j];
    }
    return p;
}

bool scheme_schedulable(const Taskset& taskset, Scheme scheme, const PlannerOptions& options) {
    switch (scheme) {
        case Scheme::unsecured: return all_schedulable(taskset, uniform_assignment(taskset, 0));
        case Scheme::fine_grain: return all_schedulable(taskset, full_checks_assignment(taskset));
        case Scheme::selective: {
            PlannerOptions o = options;
            o.solve_games = false;
            return std::holds_alternative<CheckPlan>(plan(taskset, o));
        }
    }
    return false;
}

double acceptance_ratio(std::span<const Taskset> batch, Scheme scheme, const PlannerOptions& options) {
    if (batch.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t ok = 0;
    for (const auto& ts : batch) ok += scheme_schedulable(ts, scheme, options) ? 1 : 0;
    return static_cast<double>(ok) / static_cast<double>(batch.size());
}

std::string to_csv(const SimResult& result) {
    std::string s = "trial,delay_jobs,detected\n";
    for (std::size_t i = 0; i < result.delays.size(); ++i)
        s += fmt::format("{},{},{}\n", i, result.delays[i], result.detected[i] ? 1 : 0);
    s += fmt::format("summary,{},{}\n", result.mean, result.p99);
    return s;
}

}  // namespace selcheck
