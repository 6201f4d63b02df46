#include "selcheck/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace selcheck {

using nlohmann::json;

namespace {

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("malformed JSON: {}", e.what()));
    }
}

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ParseError(fmt::format("{}: missing field '{}'", where, key));
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ParseError(fmt::format("{}: field '{}' has the wrong type", where, key));
    }
}

template <class T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
    return obj.contains(key) ? field<T>(obj, key, where) : fallback;
}

}  // namespace

std::string taskset_to_json(const Taskset& ts) {
    std::map<TaskId, int> rank;
    for (const auto& order : ts.platform.priorities) {
        for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
    }
    json tasks = json::array();
    for (const auto& t : ts.tasks) {
        json j = {{"id", t.id},
                  {"wcet", t.wcet},
                  {"period", t.period},
                  {"deadline", t.deadline},
                  {"num_commands", t.num_commands},
                  {"min_checks", t.min_checks},
                  {"weights", t.weights},
                  {"check_overhead", t.check_overhead}};
        if (auto it = ts.platform.partition.find(t.id); it != ts.platform.partition.end()) {
            j["core"] = it->second;
            j["priority"] = rank.at(t.id);
        }
        tasks.push_back(std::move(j));
    }
    json doc = {{"time_unit", ts.time_unit}, {"cores", ts.platform.num_cores}, {"tasks", std::move(tasks)}};
    return doc.dump(2) + "\n";
}

Taskset parse_taskset(const std::string& text) {
    const json doc = parse_document(text);
    if (!doc.is_object()) throw ParseError("taskset: top level must be an object");
    Taskset ts;
    ts.time_unit = field_or<std::string>(doc, "time_unit", "us", "taskset");
    const auto& items = doc.contains("tasks") ? doc.at("tasks") : throw ParseError("taskset: missing field 'tasks'");
    if (!items.is_array()) throw ParseError("taskset: 'tasks' must be an array");

    struct Placement {
        TaskId id;
        int core;
        int priority;
    };
    std::vector<Placement> placed;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const json& j = items[i];
        const std::string where = fmt::format("task #{}", i);
        Task t;
        t.id = field<TaskId>(j, "id", where);
        t.wcet = field<TimeUnits>(j, "wcet", where);
        t.period = field<TimeUnits>(j, "period", where);
        t.deadline = field_or<TimeUnits>(j, "deadline", t.period, where);
        t.num_commands = field_or<int>(j, "num_commands", 0, where);
        t.min_checks = field_or<int>(j, "min_checks", 0, where);
        t.weights = field_or<std::vector<double>>(j, "weights",
                                                  std::vector<double>(static_cast<std::size_t>(std::max(t.num_commands, 0)), 1.0), where);
        t.check_overhead = field_or<TimeUnits>(j, "check_overhead", 0, where);
        if (j.contains("core")) {
            placed.push_back({t.id, field<int>(j, "core", where), field_or<int>(j, "priority", -1, where)});
        }
        ts.tasks.push_back(std::move(t));
    }

    int max_core = -1;
    for (const auto& p : placed) max_core = std::max(max_core, p.core);
    ts.platform.num_cores = field_or<int>(doc, "cores", std::max(max_core + 1, 1), "taskset");
    if (ts.platform.num_cores < 1) throw ParseError("taskset: 'cores' must be positive");

    if (placed.empty()) {
        try {
            ts.platform = first_fit_partition(ts.tasks, ts.platform.num_cores);
        } catch (const PartitionError& e) {
            throw ParseError(fmt::format("taskset: {}", e.what()));
        }
        return ts;
    }
    if (placed.size() != ts.tasks.size()) throw ParseError("taskset: either every task or no task carries 'core'");
    if (max_core >= ts.platform.num_cores) throw ParseError("taskset: a task names a core beyond 'cores'");

    // Tasks without an explicit priority rank below the others on their core, rate-monotonically.
    std::map<TaskId, TimeUnits> period;
    for (const auto& t : ts.tasks) period[t.id] = t.period;
    std::stable_sort(placed.begin(), placed.end(), [&](const Placement& a, const Placement& b) {
        if (a.core != b.core) return a.core < b.core;
        const bool ea = a.priority >= 0, eb = b.priority >= 0;
        if (ea != eb) return ea;
        if (ea && a.priority != b.priority) return a.priority < b.priority;
        if (period[a.id] != period[b.id]) return period[a.id] < period[b.id];
        return a.id < b.id;
    });
    ts.platform.priorities.assign(static_cast<std::size_t>(ts.platform.num_cores), {});
    for (const auto& p : placed) {
        if (p.core < 0) throw ParseError(fmt::format("task {}: negative core", p.id));
        ts.platform.partition[p.id] = p.core;
        ts.platform.priorities[static_cast<std::size_t>(p.core)].push_back(p.id);
    }
    return ts;
}

std::string plan_to_json(const CheckPlan& plan) {
    json tasks = json::array();
    for (const auto& t : plan.tasks) {
        json j = {{"id", t.id}, {"num_commands", t.num_commands}, {"k_star", t.k_star}};
        if (!t.strategies.empty()) {
            json strategies = json::array();
            for (CommandMask m : t.strategies) strategies.push_back(commands_of(m));
            json game = {{"strategies", std::move(strategies)}, {"probabilities", t.probabilities}};
            if (t.attacker_strategy) {
                game["attacker_strategy"] = *t.attacker_strategy;
                game["attacker_commands"] = commands_of(static_cast<CommandMask>(*t.attacker_strategy));
            }
            if (t.objective) game["objective"] = *t.objective;
            j["game"] = std::move(game);
        }
        tasks.push_back(std::move(j));
    }
    json doc = {{"feasible", plan.feasible}, {"tasks", std::move(tasks)}};
    return doc.dump(2) + "\n";
}

CheckPlan parse_plan(const std::string& text) {
    const json doc = parse_document(text);
    if (!doc.is_object() || !doc.contains("tasks") || !doc.at("tasks").is_array())
        throw ParseError("plan: expected an object with a 'tasks' array");
    CheckPlan plan;
    plan.feasible = field_or<bool>(doc, "feasible", true, "plan");
    for (std::size_t i = 0; i < doc.at("tasks").size(); ++i) {
        const json& j = doc.at("tasks")[i];
        const std::string where = fmt::format("plan task #{}", i);
        TaskPlan t;
        t.id = field<TaskId>(j, "id", where);
        t.num_commands = field<int>(j, "num_commands", where);
        t.k_star = field<int>(j, "k_star", where);
        if (t.num_commands < 0 || t.num_commands > kMaxGameCommands || t.k_star < 0 || t.k_star > t.num_commands)
            throw ParseError(fmt::format("{}: k_star/num_commands out of range", where));
        if (j.contains("game")) {
            const json& g = j.at("game");
            for (const auto& cmds : field<std::vector<std::vector<int>>>(g, "strategies", where)) {
                for (int c : cmds) {
                    if (c < 1 || c > t.num_commands) throw ParseError(fmt::format("{}: command {} out of range", where, c));
                }
                t.strategies.push_back(mask_of(cmds));
            }
            t.probabilities = field<std::vector<double>>(g, "probabilities", where);
            if (t.probabilities.size() != t.strategies.size())
                throw ParseError(fmt::format("{}: strategies and probabilities differ in length", where));
            if (g.contains("attacker_strategy")) t.attacker_strategy = field<std::size_t>(g, "attacker_strategy", where);
            if (g.contains("objective")) t.objective = field<double>(g, "objective", where);
        } else if (!t.deterministic()) {
            throw ParseError(fmt::format("{}: k_star < num_commands but no game", where));
        }
        plan.tasks.push_back(std::move(t));
    }
    return plan;
}

std::string workload_spec_to_json(const WorkloadSpec& s) {
    json doc = {{"num_cores", s.num_cores},
                {"min_tasks_per_core", s.min_tasks_per_core},
                {"max_tasks_per_core", s.max_tasks_per_core},
                {"period_min_ms", s.period_min_ms},
                {"period_max_ms", s.period_max_ms},
                {"bucket", s.bucket},
                {"scenario", to_string(s.scenario)},
                {"fixed_num_commands", s.fixed_num_commands},
                {"min_check_fraction", s.min_check_fraction},
                {"overhead_fraction", s.overhead_fraction},
                {"tasksets_per_bucket", s.tasksets_per_bucket},
                {"seed", s.seed},
                {"retry_budget", s.retry_budget},
                {"require_vanilla_schedulable", s.require_vanilla_schedulable},
                {"partition", to_string(s.partition)}};
    return doc.dump(2) + "\n";
}

WorkloadSpec parse_workload_spec(const std::string& text) {
    const json doc = parse_document(text);
    if (!doc.is_object()) throw ParseError("workload spec: top level must be an object");
    const std::string w = "workload spec";
    WorkloadSpec s;
    s.num_cores = field_or(doc, "num_cores", s.num_cores, w);
    s.min_tasks_per_core = field_or(doc, "min_tasks_per_core", s.min_tasks_per_core, w);
    s.max_tasks_per_core = field_or(doc, "max_tasks_per_core", s.max_tasks_per_core, w);
    s.period_min_ms = field_or(doc, "period_min_ms", s.period_min_ms, w);
    s.period_max_ms = field_or(doc, "period_max_ms", s.period_max_ms, w);
    s.bucket = field_or(doc, "bucket", s.bucket, w);
    try {
        s.scenario = parse_scenario(field_or<std::string>(doc, "scenario", to_string(s.scenario), w));
        s.partition = parse_partition_heuristic(field_or<std::string>(doc, "partition", to_string(s.partition), w));
    } catch (const std::invalid_argument& e) {
        throw ParseError(fmt::format("{}: {}", w, e.what()));
    }
    s.fixed_num_commands = field_or(doc, "fixed_num_commands", s.fixed_num_commands, w);
    s.min_check_fraction = field_or(doc, "min_check_fraction", s.min_check_fraction, w);
    s.overhead_fraction = field_or(doc, "overhead_fraction", s.overhead_fraction, w);
    s.tasksets_per_bucket = field_or(doc, "tasksets_per_bucket", s.tasksets_per_bucket, w);
    s.seed = field_or(doc, "seed", s.seed, w);
    s.retry_budget = field_or(doc, "retry_budget", s.retry_budget, w);
    s.require_vanilla_schedulable = field_or(doc, "require_vanilla_schedulable", s.require_vanilla_schedulable, w);
    return s;
}

std::vector<int> parse_spec_buckets(const std::string& text) {
    const json doc = parse_document(text);
    if (doc.is_object() && doc.contains("buckets")) return field<std::vector<int>>(doc, "buckets", "workload spec");
    return {parse_workload_spec(text).bucket};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot read {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    out << content;
    if (!out) throw std::runtime_error(fmt::format("write failed for {}", path.string()));
}

}  // namespace selcheck
