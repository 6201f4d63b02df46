#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "selcheck/model.hpp"

using namespace selcheck;
using testing_support::make_task;
using testing_support::make_taskset;

namespace {

bool has_violation(const std::vector<Violation>& v, TaskId task, const std::string& message) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) { return x.task == task && x.message == message; });
}

}  // namespace

TEST_CASE("validate accepts a well-formed task") {
    auto ts = make_taskset({{make_task(1, 2, 10, 3, 1, 1)}});
    CHECK(validate(ts).empty());
}

TEST_CASE("validate reports deadline beyond period") {
    auto ts = make_taskset({{make_task(1, 2, 10, 3, 1, 1, 12)}});
    const auto v = validate(ts);
    CHECK(has_violation(v, 1, "deadline > period"));
    CHECK(v.front().field == "deadline");
}

TEST_CASE("validate reports weight-vector length mismatch") {
    auto t = make_task(1, 2, 10, 3, 1, 1);
    t.weights = {1.0, 1.0};
    const auto v = validate(make_taskset({{t}}));
    CHECK(has_violation(v, 1, "weight-vector length mismatch"));
    CHECK(v.front().field == "weights");
}

TEST_CASE("validate catches every field invariant") {
    SUBCASE("wcet above deadline") {
        CHECK(has_violation(validate(make_taskset({{make_task(1, 11, 10)}})), 1, "wcet > deadline"));
    }
    SUBCASE("non-positive wcet") { CHECK_FALSE(validate(make_taskset({{make_task(1, 0, 10)}})).empty()); }
    SUBCASE("min_checks above num_commands") {
        CHECK_FALSE(validate(make_taskset({{make_task(1, 1, 10, 2, 3)}})).empty());
    }
    SUBCASE("non-positive weight") {
        auto t = make_task(1, 1, 10, 2, 1);
        t.weights = {1.0, 0.0};
        CHECK_FALSE(validate(make_taskset({{t}})).empty());
    }
    SUBCASE("negative overhead") { CHECK_FALSE(validate(make_taskset({{make_task(1, 1, 10, 2, 1, -1)}})).empty()); }
    SUBCASE("duplicate ids") {
        CHECK_FALSE(validate(make_taskset({{make_task(1, 1, 10)}, {make_task(1, 1, 20)}})).empty());
    }
    SUBCASE("task missing from the partition") {
        auto ts = make_taskset({{make_task(1, 1, 10)}});
        ts.tasks.push_back(make_task(2, 1, 10));
        CHECK_FALSE(validate(ts).empty());
    }
    SUBCASE("partition names an unknown task") {
        auto ts = make_taskset({{make_task(1, 1, 10)}});
        ts.platform.partition[9] = 0;
        ts.platform.priorities[0].push_back(9);
        CHECK_FALSE(validate(ts).empty());
    }
}

TEST_CASE("tasks without commands are representable") {
    auto ts = make_taskset({{make_task(1, 1, 10, 0, 0)}});
    CHECK(ts.tasks[0].weights.empty());
    CHECK(validate(ts).empty());
}

TEST_CASE("assignment helpers") {
    auto ts = make_taskset({{make_task(1, 1, 10, 4, 1), make_task(2, 1, 20, 0, 0)}});
    CHECK(uniform_assignment(ts, 0) == CheckAssignment{{1, 0}, {2, 0}});
    CHECK(min_checks_assignment(ts) == CheckAssignment{{1, 1}, {2, 0}});
    CHECK(full_checks_assignment(ts) == CheckAssignment{{1, 4}, {2, 0}});
}

TEST_CASE("overhead presets") {
    auto ts = make_taskset({{make_task(1, 1, 100000, 4, 1, 7), make_task(2, 1, 200000, 0, 0, 3)}});
    CHECK(parse_overhead_preset("linux-optee") == OverheadPreset::linux_optee);
    CHECK(parse_overhead_preset("freertos") == OverheadPreset::freertos);
    CHECK(parse_overhead_preset("custom") == OverheadPreset::custom);
    CHECK_THROWS_AS(parse_overhead_preset("zephyr"), std::invalid_argument);

    auto a = ts;
    apply_overhead_preset(a, OverheadPreset::linux_optee);
    CHECK(a.task(1).check_overhead == 66000);
    CHECK(a.task(2).check_overhead == 3);
    auto b = ts;
    apply_overhead_preset(b, OverheadPreset::freertos);
    CHECK(b.task(1).check_overhead == 2000);
    auto c = ts;
    apply_overhead_preset(c, OverheadPreset::custom);
    CHECK(c == ts);
    auto ms = ts;
    ms.time_unit = "ms";
    apply_overhead_preset(ms, OverheadPreset::linux_optee);
    CHECK(ms.task(1).check_overhead == 66);
}

TEST_CASE("task lookup") {
    auto ts = make_taskset({{make_task(5, 1, 10)}});
    CHECK(ts.task(5).wcet == 1);
    CHECK(ts.find(6) == nullptr);
    CHECK_THROWS_AS(ts.task(6), std::out_of_range);
}
