#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "selcheck/rng.hpp"
#include "selcheck/schedulability.hpp"

using namespace selcheck;
using testing_support::make_task;
using testing_support::make_taskset;

namespace {

// tau_h (C=1, C^o=1, T=4) above tau_i (C=2, C^o=1, D=T=10).
Taskset two_task() { return make_taskset({{make_task(1, 1, 4, 1, 0, 1), make_task(2, 2, 10, 2, 0, 1)}}); }

Taskset random_taskset(Rng& rng, int cores) {
    Taskset ts;
    ts.platform.num_cores = cores;
    ts.platform.priorities.assign(static_cast<std::size_t>(cores), {});
    const int n = static_cast<int>(rng.uniform_int(1, 12));
    for (int i = 0; i < n; ++i) {
        const auto period = rng.uniform_int(10, 5000);
        auto t = make_task(i + 1, rng.uniform_int(1, period / 4 + 1), period, static_cast<int>(rng.uniform_int(0, 6)), 0,
                           rng.uniform_int(0, 20));
        const int c = static_cast<int>(rng.uniform_int(0, cores - 1));
        ts.tasks.push_back(t);
        ts.platform.partition[t.id] = c;
        ts.platform.priorities[static_cast<std::size_t>(c)].push_back(t.id);
    }
    return ts;
}

CheckAssignment random_assignment(const Taskset& ts, Rng& rng) {
    CheckAssignment a;
    for (const auto& t : ts.tasks) a[t.id] = static_cast<int>(rng.uniform_int(0, t.num_commands));
    return a;
}

}  // namespace

TEST_CASE("tee_wcet") {
    CHECK(tee_wcet(make_task(1, 10, 100, 5, 0, 3), 0) == 10);
    CHECK(tee_wcet(make_task(1, 10, 100, 5, 0, 3), 4) == 22);
    CHECK(tee_wcet(make_task(1, 1, 100, 5, 0, 0), 5) == 1);
    CHECK_THROWS_AS(tee_wcet(make_task(1, 10, 100, 5, 0, 3), 6), std::out_of_range);
    CHECK_THROWS_AS(tee_wcet(make_task(1, 10, 100, 5, 0, 3), -1), std::out_of_range);
}

TEST_CASE("response_time_bound examples") {
    auto sole = make_taskset({{make_task(1, 2, 10, 2, 0, 1)}});
    CHECK(response_time_bound(sole.task(1), sole, {{1, 2}}) == doctest::Approx(4.0));

    const auto ts = two_task();
    CHECK(response_time_bound(ts.task(2), ts, {{1, 1}, {2, 2}}) == doctest::Approx(11.0));
    CHECK(response_time_bound(ts.task(2), ts, {{1, 0}, {2, 0}}) == doctest::Approx(vanilla_response_time(ts.task(2), ts)));
}

TEST_CASE("vanilla_response_time examples") {
    auto sole = make_taskset({{make_task(1, 2, 10)}});
    CHECK(vanilla_response_time(sole.task(1), sole) == doctest::Approx(2.0));
    const auto ts = two_task();
    CHECK(vanilla_response_time(ts.task(2), ts) == doctest::Approx(5.5));
    CHECK(response_time_bound(ts.task(2), ts, {{1, 1}, {2, 2}}) >= vanilla_response_time(ts.task(2), ts));
}

TEST_CASE("checking_overhead examples") {
    const auto ts = two_task();
    CHECK(checking_overhead(ts.task(2), ts, {{1, 0}, {2, 0}}) == doctest::Approx(0.0));
    const double o = checking_overhead(ts.task(2), ts, {{1, 1}, {2, 2}});
    CHECK(o == doctest::Approx(5.5));
    // Missed iff O > D - R.
    CHECK(o > 10.0 - vanilla_response_time(ts.task(2), ts));
}

TEST_CASE("is_schedulable examples") {
    CHECK(is_schedulable(Taskset{}, {}).schedulable);
    const auto ts = two_task();
    const auto bad = is_schedulable(ts, {{1, 1}, {2, 2}});
    CHECK_FALSE(bad.schedulable);
    CHECK(bad.tasks[0].schedulable);
    CHECK_FALSE(bad.tasks[1].schedulable);
    CHECK(is_schedulable(ts, {{1, 0}, {2, 0}}).schedulable);
    CHECK(all_schedulable(ts, {{1, 0}, {2, 0}}));
}

TEST_CASE("errors") {
    auto ts = two_task();
    CHECK_THROWS_AS(is_schedulable(ts, {{1, 1}}), std::invalid_argument);
    auto stray = ts;
    stray.tasks.push_back(make_task(3, 1, 10));
    CHECK_THROWS_AS(response_time_bound(stray.task(3), stray, {{1, 0}, {2, 0}, {3, 0}}), std::invalid_argument);
}

TEST_CASE("deadline comparison tolerates rounding at the boundary") {
    // 87 + (1 + 100/30) * 3 is 100 only up to floating-point error.
    auto ts = make_taskset({{make_task(1, 3, 30), make_task(2, 87, 100)}});
    const double r = response_time_bound(ts.task(2), ts, {{1, 0}, {2, 0}});
    CHECK(r == doctest::Approx(100.0));
    CHECK(all_schedulable(ts, {{1, 0}, {2, 0}}));
}

TEST_CASE("CSV report") {
    const auto ts = two_task();
    const std::string csv = to_csv(is_schedulable(ts, {{1, 0}, {2, 0}}));
    CHECK(csv.rfind("task,R,R_TEE,O,deadline,schedulable\n", 0) == 0);
    CHECK(csv.find("2,5.5,5.5,0,10,1\n") != std::string::npos);
}

TEST_CASE("lower_priority_tasks") {
    auto ts = make_taskset({{make_task(1, 1, 10), make_task(2, 1, 20), make_task(3, 1, 30)}, {make_task(4, 1, 5)}});
    CHECK(lower_priority_tasks(ts, 1) == std::vector<TaskId>{2, 3});
    CHECK(lower_priority_tasks(ts, 3).empty());
    CHECK(lower_priority_tasks(ts, 4).empty());
}

TEST_CASE("properties on random tasksets") {
    Rng rng(20240601);
    for (int iter = 0; iter < 300; ++iter) {
        const auto ts = random_taskset(rng, static_cast<int>(rng.uniform_int(1, 3)));
        const auto a = random_assignment(ts, rng);
        for (const auto& t : ts.tasks) {
            const double r = vanilla_response_time(t, ts);
            const double rt = response_time_bound(t, ts, a);
            // Independent per-core evaluation.
            CHECK(rt == doctest::Approx(oracle::response_time(ts, t.id, a)).epsilon(1e-12));
            // O = R_TEE - R.
            CHECK(std::abs(checking_overhead(t, ts, a) - (rt - r)) <= 1e-9 * std::max(1.0, rt));
            CHECK(rt >= r);
            // Monotone in every task's k.
            for (const auto& other : ts.tasks) {
                if (a.at(other.id) >= other.num_commands) continue;
                auto more = a;
                ++more[other.id];
                CHECK(response_time_bound(t, ts, more) >= rt);
                // Tasks on other cores do not interfere.
                if (ts.platform.partition.at(other.id) != ts.platform.partition.at(t.id))
                    CHECK(response_time_bound(t, ts, more) == rt);
            }
        }
    }
}
