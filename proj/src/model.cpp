#include "selcheck/model.hpp"

#include <set>
#include <stdexcept>

namespace selcheck {

const Task* Taskset::find(TaskId id) const {
    for (const auto& t : tasks) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

const Task& Taskset::task(TaskId id) const {
    const Task* t = find(id);
    if (!t) throw std::out_of_range("unknown task id " + std::to_string(id));
    return *t;
}

CheckAssignment uniform_assignment(const Taskset& taskset, int k) {
    CheckAssignment a;
    for (const auto& t : taskset.tasks) a[t.id] = k;
    return a;
}

CheckAssignment min_checks_assignment(const Taskset& taskset) {
    CheckAssignment a;
    for (const auto& t : taskset.tasks) a[t.id] = t.min_checks;
    return a;
}

CheckAssignment full_checks_assignment(const Taskset& taskset) {
    CheckAssignment a;
    for (const auto& t : taskset.tasks) a[t.id] = t.num_commands;
    return a;
}

std::vector<Violation> validate(const Taskset& taskset) {
    std::vector<Violation> out;
    auto add = [&out](TaskId id, std::string field, std::string msg) {
        out.push_back({id, std::move(field), std::move(msg)});
    };

    std::set<TaskId> ids;
    for (const auto& t : taskset.tasks) {
        if (!ids.insert(t.id).second) add(t.id, "id", "duplicate task id");
        if (t.wcet <= 0) add(t.id, "wcet", "wcet must be positive");
        if (t.period <= 0) add(t.id, "period", "period must be positive");
        if (t.deadline <= 0) add(t.id, "deadline", "deadline must be positive");
        if (t.wcet > t.deadline) add(t.id, "wcet", "wcet > deadline");
        if (t.deadline > t.period) add(t.id, "deadline", "deadline > period");
        if (t.num_commands < 0) add(t.id, "num_commands", "num_commands must be non-negative");
        if (t.min_checks < 0) add(t.id, "min_checks", "min_checks must be non-negative");
        if (t.min_checks > t.num_commands) add(t.id, "min_checks", "min_checks > num_commands");
        if (static_cast<int>(t.weights.size()) != t.num_commands)
            add(t.id, "weights", "weight-vector length mismatch");
        for (double w : t.weights) {
            if (!(w > 0.0)) {
                add(t.id, "weights", "weights must be positive");
                break;
            }
        }
        if (t.check_overhead < 0) add(t.id, "check_overhead", "check_overhead must be non-negative");
    }

    const auto& p = taskset.platform;
    if (p.num_cores < 1) add(-1, "cores", "at least one core required");
    if (static_cast<int>(p.priorities.size()) != p.num_cores)
        add(-1, "priorities", "priority lists must match core count");

    for (const auto& t : taskset.tasks) {
        auto it = p.partition.find(t.id);
        if (it == p.partition.end()) {
            add(t.id, "core", "task is not partitioned");
        } else if (it->second < 0 || it->second >= p.num_cores) {
            add(t.id, "core", "core index out of range");
        }
    }
    for (const auto& [id, core] : p.partition) {
        if (!ids.count(id)) add(id, "core", "partition references unknown task");
    }

    std::map<TaskId, int> seen;
    for (std::size_t c = 0; c < p.priorities.size(); ++c) {
        for (TaskId id : p.priorities[c]) {
            if (++seen[id] > 1) add(id, "priority", "task appears more than once in priority order");
            auto it = p.partition.find(id);
            if (it != p.partition.end() && it->second != static_cast<int>(c))
                add(id, "priority", "priority order lists task on the wrong core");
        }
    }
    for (const auto& t : taskset.tasks) {
        if (p.partition.count(t.id) && !seen.count(t.id))
            add(t.id, "priority", "task missing from its core's priority order");
    }
    return out;
}

OverheadPreset parse_overhead_preset(const std::string& name) {
    if (name == "linux-optee") return OverheadPreset::linux_optee;
    if (name == "freertos") return OverheadPreset::freertos;
    if (name == "custom") return OverheadPreset::custom;
    throw std::invalid_argument("unknown overhead preset '" + name + "'");
}

void apply_overhead_preset(Taskset& taskset, OverheadPreset preset) {
    if (preset == OverheadPreset::custom) return;
    TimeUnits us = preset == OverheadPreset::linux_optee ? kLinuxOpteeOverheadUs : kFreertosOverheadUs;
    TimeUnits value = 0;
    if (taskset.time_unit == "us") {
        value = us;
    } else if (taskset.time_unit == "ms") {
        value = us / 1000;
    } else {
        throw std::invalid_argument("overhead presets need time_unit 'us' or 'ms', got '" +
                                    taskset.time_unit + "'");
    }
    for (auto& t : taskset.tasks) {
        if (t.num_commands > 0) t.check_overhead = value;
    }
}

}  // namespace selcheck
