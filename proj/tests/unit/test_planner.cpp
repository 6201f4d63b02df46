#include <doctest.h>

#include <algorithm>
#include <optional>

#include "helpers.hpp"
#include "oracles.hpp"
#include "selcheck/planner.hpp"
#include "selcheck/schedulability.hpp"
#include "selcheck/workload.hpp"

using namespace selcheck;
using testing_support::make_task;
using testing_support::make_taskset;

namespace {

// Largest k by scanning upward from min_checks with the independent response-time oracle.
int scan_k(const Taskset& ts, TaskId id, CheckAssignment fixed) {
    const Task& t = ts.task(id);
    int best = -1;
    for (int k = t.min_checks; k <= t.num_commands; ++k) {
        fixed[id] = k;
        if (!oracle::all_meet(ts, fixed)) break;
        best = k;
    }
    return best;
}

// Medium-scenario taskset; nullopt when the bucket is too loaded to generate.
std::optional<Taskset> generated(int bucket, std::uint64_t seed) {
    WorkloadSpec spec;
    spec.bucket = bucket;
    spec.retry_budget = 20;
    Rng rng(seed);
    try {
        return gen_taskset(spec, rng);
    } catch (const GenerationError&) {
        return std::nullopt;
    }
}

}  // namespace

TEST_CASE("max_feasible_k example") {
    auto ts = make_taskset({{make_task(1, 10, 40, 7, 1, 5)}});
    CHECK(max_feasible_k(ts.task(1), ts, {{1, 1}}) == 6);

    auto roomy = make_taskset({{make_task(1, 10, 400, 7, 1, 5)}});
    CHECK(max_feasible_k(roomy.task(1), roomy, {{1, 1}}) == 7);

    auto tight = make_taskset({{make_task(1, 30, 40, 7, 3, 5)}});
    CHECK_THROWS_AS(max_feasible_k(tight.task(1), tight, {{1, 3}}), std::domain_error);
}

TEST_CASE("max_feasible_k protects lower-priority tasks on the same core") {
    // Task 2 only meets its deadline while task 1 checks at most 2 commands.
    auto ts = make_taskset({{make_task(1, 1, 100, 6, 0, 5), make_task(2, 10, 100, 0, 0, 0)}, {make_task(3, 1, 10)}});
    const CheckAssignment base{{1, 0}, {2, 0}, {3, 0}};
    // R2 = 10 + 2 * (1 + 5k) <= 100 gives k <= 8, capped at N = 6.
    CHECK(max_feasible_k(ts.task(1), ts, base) == 6);
    ts.tasks[1].wcet = 70;
    // 70 + 2 (1 + 5k) <= 100 gives k <= 2.
    CHECK(max_feasible_k(ts.task(1), ts, base) == 2);
    CHECK(scan_k(ts, 1, base) == 2);
}

TEST_CASE("max_feasible_k equals a linear scan on generated tasksets") {
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        const auto g = generated(i % 4, 1000 + static_cast<std::uint64_t>(i));
        if (!g) continue;
        const auto& ts = *g;
        const auto fixed = min_checks_assignment(ts);
        if (!oracle::all_meet(ts, fixed)) continue;
        for (const auto& t : ts.tasks) {
            CHECK(max_feasible_k(t, ts, fixed) == scan_k(ts, t.id, fixed));
            ++checked;
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("under-loaded taskset checks everything") {
    auto ts = make_taskset({{make_task(1, 1, 100, 4, 1, 1), make_task(2, 1, 200, 3, 1, 1)}});
    const auto r = plan(ts);
    REQUIRE(std::holds_alternative<CheckPlan>(r));
    const auto& p = std::get<CheckPlan>(r);
    for (const auto& tp : p.tasks) {
        CHECK(tp.k_star == tp.num_commands);
        CHECK(tp.deterministic());
        CHECK(tp.strategies.empty());
    }
}

TEST_CASE("minimum checks that already miss a deadline give Infeasible") {
    auto ts = make_taskset({{make_task(1, 5, 10, 4, 2, 3)}, {make_task(2, 1, 100, 2, 1, 1)}});
    const auto r = plan(ts);
    REQUIRE(std::holds_alternative<Infeasible>(r));
    CHECK(std::get<Infeasible>(r).violating == std::vector<TaskId>{1});
}

TEST_CASE("invalid taskset is rejected") {
    auto ts = make_taskset({{make_task(1, 5, 10, 4, 5, 3)}});
    CHECK_THROWS_AS(plan(ts), std::invalid_argument);
}

TEST_CASE("rover-shaped task with half coverage yields six strategies") {
    auto ts = make_taskset({{make_task(1, 10, 1000, 4, 1, 1)}});
    PlannerOptions opt;
    opt.max_check_fraction = 0.5;
    const auto r = plan(ts, opt);
    REQUIRE(std::holds_alternative<CheckPlan>(r));
    const auto& tp = std::get<CheckPlan>(r).task(1);
    CHECK(tp.k_star == 2);
    CHECK(tp.strategies.size() == 6);
    CHECK(tp.probabilities.size() == 6);
    double sum = 0.0;
    for (double p : tp.probabilities) {
        CHECK(p >= 1e-6 - 1e-9);
        sum += p;
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(tp.attacker_strategy.has_value());
    CHECK(tp.objective.has_value());
}

TEST_CASE("no-check budget with commands is a single empty strategy") {
    auto ts = make_taskset({{make_task(1, 10, 10, 3, 0, 1)}});
    const auto r = plan(ts);
    REQUIRE(std::holds_alternative<CheckPlan>(r));
    const auto& tp = std::get<CheckPlan>(r).task(1);
    CHECK(tp.k_star == 0);
    CHECK(tp.strategies == std::vector<CommandMask>{0u});
    CHECK(tp.probabilities == std::vector<double>{1.0});
}

TEST_CASE("solve_games off leaves the strategies empty") {
    auto ts = make_taskset({{make_task(1, 10, 1000, 4, 1, 1)}});
    PlannerOptions opt;
    opt.max_check_fraction = 0.5;
    opt.solve_games = false;
    const auto r = plan(ts, opt);
    const auto& tp = std::get<CheckPlan>(r).task(1);
    CHECK(tp.k_star == 2);
    CHECK(tp.strategies.empty());
}

TEST_CASE("two-task core against an exhaustive greedy oracle") {
    Rng rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        const int n1 = static_cast<int>(rng.uniform_int(1, 6));
        const int n2 = static_cast<int>(rng.uniform_int(1, 6));
        auto t1 = make_task(1, rng.uniform_int(1, 20), rng.uniform_int(40, 120), n1,
                            static_cast<int>(rng.uniform_int(0, n1)), rng.uniform_int(0, 8));
        auto t2 = make_task(2, rng.uniform_int(1, 40), rng.uniform_int(120, 300), n2,
                            static_cast<int>(rng.uniform_int(0, n2)), rng.uniform_int(0, 8));
        auto ts = make_taskset({{t1, t2}});
        PlannerOptions opt;
        opt.solve_games = false;
        const auto r = plan(ts, opt);

        CheckAssignment a = min_checks_assignment(ts);
        if (!oracle::all_meet(ts, a)) {
            CHECK(std::holds_alternative<Infeasible>(r));
            continue;
        }
        REQUIRE(std::holds_alternative<CheckPlan>(r));
        // Highest priority first, each maximal given the choices above and minimums below.
        int k1 = t1.min_checks;
        for (int k = t1.min_checks; k <= n1; ++k) {
            a[1] = k;
            if (oracle::all_meet(ts, a)) k1 = k;
        }
        a[1] = k1;
        int k2 = t2.min_checks;
        for (int k = t2.min_checks; k <= n2; ++k) {
            a[2] = k;
            if (oracle::all_meet(ts, a)) k2 = k;
        }
        const auto& p = std::get<CheckPlan>(r);
        CHECK(p.task(1).k_star == k1);
        CHECK(p.task(2).k_star == k2);
    }
}

TEST_CASE("plans on generated tasksets are schedulable, bounded and maximal") {
    for (int i = 0; i < 25; ++i) {
        const auto g = generated(i % 4, 77 + static_cast<std::uint64_t>(i));
        if (!g) continue;
        const auto& ts = *g;
        PlannerOptions opt;
        opt.solve_games = false;
        const auto r = plan(ts, opt);
        if (!std::holds_alternative<CheckPlan>(r)) continue;
        const auto& p = std::get<CheckPlan>(r);
        const auto a = p.assignment();
        CHECK(is_schedulable(ts, a).schedulable);
        for (const auto& t : ts.tasks) {
            const int k = p.task(t.id).k_star;
            CHECK(k >= t.min_checks);
            CHECK(k <= t.num_commands);
            if (k < t.num_commands) {
                auto more = a;
                ++more[t.id];
                CHECK_FALSE(is_schedulable(ts, more).schedulable);
            }
        }
    }
}

// Only the top task of the victim's core is guaranteed not to gain: a task in between can pick up
// slack released by the tasks above it.
TEST_CASE("raising a minimum never helps the top task of that core or other cores") {
    Rng rng(31);
    int compared = 0;
    for (int i = 0; i < 30; ++i) {
        const auto g = generated(static_cast<int>(rng.uniform_int(1, 3)), 500 + static_cast<std::uint64_t>(i));
        if (!g) continue;
        const auto& ts = *g;
        PlannerOptions opt;
        opt.solve_games = false;
        const auto base = plan(ts, opt);
        if (!std::holds_alternative<CheckPlan>(base)) continue;
        auto raised = ts;
        auto& victim = raised.tasks[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(ts.tasks.size()) - 1))];
        if (victim.min_checks == victim.num_commands) continue;
        ++victim.min_checks;
        const auto after = plan(raised, opt);
        if (!std::holds_alternative<CheckPlan>(after)) continue;
        const int core = ts.platform.partition.at(victim.id);
        const auto& order = ts.platform.priorities[static_cast<std::size_t>(core)];
        const auto pos = std::find(order.begin(), order.end(), victim.id);
        for (const auto& t : ts.tasks) {
            const int before_k = std::get<CheckPlan>(base).task(t.id).k_star;
            const int after_k = std::get<CheckPlan>(after).task(t.id).k_star;
            if (ts.platform.partition.at(t.id) != core) {
                CHECK(after_k == before_k);
            } else if (t.id == order.front() && pos != order.begin()) {
                CHECK(after_k <= before_k);
            }
        }
        ++compared;
    }
    CHECK(compared > 5);
}

TEST_CASE("rate-monotonic priorities") {
    std::vector<Task> tasks{make_task(3, 1, 50), make_task(1, 1, 20), make_task(2, 1, 50), make_task(4, 1, 5)};
    CHECK(rate_monotonic_priorities(tasks) == std::vector<TaskId>{4, 1, 2, 3});
}

TEST_CASE("first-fit partition") {
    std::vector<Task> tasks{make_task(1, 5, 10), make_task(2, 5, 10), make_task(3, 5, 10), make_task(4, 5, 10)};
    const auto p = first_fit_partition(tasks, 2);
    CHECK(p.priorities[0] == std::vector<TaskId>{1, 2});
    CHECK(p.priorities[1] == std::vector<TaskId>{3, 4});
    CHECK(p.partition.at(3) == 1);

    std::vector<Task> heavy{make_task(1, 12, 10)};
    CHECK_THROWS_AS(first_fit_partition(heavy, 4), PartitionError);
    CHECK_THROWS_AS(first_fit_partition(tasks, 1), PartitionError);
    CHECK_THROWS_AS(first_fit_partition(tasks, 0), std::invalid_argument);
}

TEST_CASE("worst-fit spreads load") {
    std::vector<Task> tasks{make_task(1, 5, 10), make_task(2, 2, 10), make_task(3, 2, 10), make_task(4, 1, 10)};
    const auto p = worst_fit_partition(tasks, 2);
    CHECK(p.priorities[0] == std::vector<TaskId>{1});
    CHECK(p.priorities[1] == std::vector<TaskId>{2, 3, 4});
    CHECK(parse_partition_heuristic("worst-fit") == PartitionHeuristic::worst_fit);
    CHECK(to_string(PartitionHeuristic::first_fit) == "first-fit");
    CHECK_THROWS_AS(parse_partition_heuristic("best-fit"), std::invalid_argument);
}
