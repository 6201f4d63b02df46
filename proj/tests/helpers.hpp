#pragma once

#include <initializer_list>
#include <vector>

#include "selcheck/model.hpp"

namespace testing_support {

inline selcheck::Task make_task(selcheck::TaskId id, selcheck::TimeUnits wcet, selcheck::TimeUnits period,
                                int num_commands = 0, int min_checks = 0, selcheck::TimeUnits overhead = 0,
                                selcheck::TimeUnits deadline = 0) {
    selcheck::Task t;
    t.id = id;
    t.wcet = wcet;
    t.period = period;
    t.deadline = deadline > 0 ? deadline : period;
    t.num_commands = num_commands;
    t.min_checks = min_checks;
    t.weights.assign(static_cast<std::size_t>(num_commands), 1.0);
    t.check_overhead = overhead;
    return t;
}

/// Tasks per core, each list highest priority first.
inline selcheck::Taskset make_taskset(std::initializer_list<std::vector<selcheck::Task>> cores) {
    selcheck::Taskset ts;
    ts.platform.num_cores = static_cast<int>(cores.size());
    int c = 0;
    for (const auto& core : cores) {
        ts.platform.priorities.emplace_back();
        for (const auto& t : core) {
            ts.tasks.push_back(t);
            ts.platform.partition[t.id] = c;
            ts.platform.priorities.back().push_back(t.id);
        }
        ++c;
    }
    return ts;
}

}  // namespace testing_support
