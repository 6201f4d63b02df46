#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "selcheck/experiments.hpp"
#include "selcheck/game.hpp"
#include "selcheck/io.hpp"
#include "selcheck/planner.hpp"
#include "selcheck/schedulability.hpp"
#include "selcheck/simulator.hpp"
#include "selcheck/workload.hpp"

namespace py = pybind11;
using namespace selcheck;

namespace {

CommandMask to_mask(const std::vector<int>& commands) { return mask_of(commands); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Selective actuation-command checking: schedulability, checking games, simulation and sweeps";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
    py::register_exception<PartitionError>(m, "PartitionError", PyExc_RuntimeError);

    py::class_<Task>(m, "Task")
        .def(py::init<>())
        .def(py::init([](TaskId id, TimeUnits wcet, TimeUnits period, std::optional<TimeUnits> deadline, int num_commands,
                         int min_checks, std::optional<std::vector<double>> weights, TimeUnits check_overhead) {
                 Task t;
                 t.id = id;
                 t.wcet = wcet;
                 t.period = period;
                 t.deadline = deadline.value_or(period);
                 t.num_commands = num_commands;
                 t.min_checks = min_checks;
                 t.weights = weights.value_or(std::vector<double>(static_cast<std::size_t>(std::max(num_commands, 0)), 1.0));
                 t.check_overhead = check_overhead;
                 return t;
             }),
             py::arg("id"), py::arg("wcet"), py::arg("period"), py::arg("deadline") = py::none(),
             py::arg("num_commands") = 0, py::arg("min_checks") = 0, py::arg("weights") = py::none(),
             py::arg("check_overhead") = 0)
        .def_readwrite("id", &Task::id)
        .def_readwrite("wcet", &Task::wcet)
        .def_readwrite("period", &Task::period)
        .def_readwrite("deadline", &Task::deadline)
        .def_readwrite("num_commands", &Task::num_commands)
        .def_readwrite("min_checks", &Task::min_checks)
        .def_readwrite("weights", &Task::weights)
        .def_readwrite("check_overhead", &Task::check_overhead)
        .def("utilization", &Task::utilization)
        .def("__eq__", [](const Task& a, const Task& b) { return a == b; });

    py::class_<Platform>(m, "Platform")
        .def(py::init<>())
        .def_readwrite("num_cores", &Platform::num_cores)
        .def_readwrite("partition", &Platform::partition)
        .def_readwrite("priorities", &Platform::priorities);

    py::class_<Taskset>(m, "Taskset")
        .def(py::init<>())
        .def_readwrite("time_unit", &Taskset::time_unit)
        .def_readwrite("tasks", &Taskset::tasks)
        .def_readwrite("platform", &Taskset::platform)
        .def("task", &Taskset::task, py::arg("id"))
        .def("to_json", &taskset_to_json)
        .def_static("from_json", &parse_taskset, py::arg("text"))
        .def("__eq__", [](const Taskset& a, const Taskset& b) { return a == b; });

    m.def("validate", [](const Taskset& ts) {
        std::vector<std::tuple<TaskId, std::string, std::string>> out;
        for (const auto& v : validate(ts)) out.emplace_back(v.task, v.field, v.message);
        return out;
    });
    m.def("partition", [](std::vector<Task> tasks, int num_cores, const std::string& heuristic) {
        return partition(tasks, num_cores, parse_partition_heuristic(heuristic));
    }, py::arg("tasks"), py::arg("num_cores"), py::arg("heuristic") = "first-fit");
    m.def("apply_overhead_preset", [](Taskset ts, const std::string& preset) {
        apply_overhead_preset(ts, parse_overhead_preset(preset));
        return ts;
    }, py::arg("taskset"), py::arg("preset"));

    // schedulability
    m.def("tee_wcet", &tee_wcet, py::arg("task"), py::arg("k"));
    m.def("response_time_bound", &response_time_bound, py::arg("task"), py::arg("taskset"), py::arg("assignment"));
    m.def("vanilla_response_time", &vanilla_response_time, py::arg("task"), py::arg("taskset"));
    m.def("checking_overhead", &checking_overhead, py::arg("task"), py::arg("taskset"), py::arg("assignment"));
    py::class_<TaskResponse>(m, "TaskResponse")
        .def_readonly("id", &TaskResponse::id)
        .def_readonly("vanilla", &TaskResponse::vanilla)
        .def_readonly("tee", &TaskResponse::tee)
        .def_readonly("overhead", &TaskResponse::overhead)
        .def_readonly("deadline", &TaskResponse::deadline)
        .def_readonly("schedulable", &TaskResponse::schedulable);
    py::class_<ResponseTimeReport>(m, "ResponseTimeReport")
        .def_readonly("tasks", &ResponseTimeReport::tasks)
        .def_readonly("schedulable", &ResponseTimeReport::schedulable)
        .def("to_csv", [](const ResponseTimeReport& r) { return to_csv(r); });
    m.def("is_schedulable", &is_schedulable, py::arg("taskset"), py::arg("assignment"));
    m.def("uniform_assignment", &uniform_assignment, py::arg("taskset"), py::arg("k"));
    m.def("min_checks_assignment", &min_checks_assignment, py::arg("taskset"));
    m.def("full_checks_assignment", &full_checks_assignment, py::arg("taskset"));

    // game
    m.def("reward_cost", [](const std::vector<int>& checked, const std::vector<int>& compromised,
                            const std::vector<double>& weights, double big_m) {
        const auto rc = reward_cost(to_mask(checked), to_mask(compromised), weights, big_m);
        return std::make_pair(rc.reward, rc.cost);
    }, py::arg("checked"), py::arg("compromised"), py::arg("weights"), py::arg("big_m") = kDefaultBigM);
    m.def("commands_of", &commands_of, py::arg("mask"));
    m.def("enumerate_designer_strategies", &enumerate_designer_strategies, py::arg("n"), py::arg("k"));

    py::class_<GameInstance>(m, "GameInstance")
        .def_readonly("num_commands", &GameInstance::num_commands)
        .def_readonly("budget", &GameInstance::budget)
        .def_readonly("weights", &GameInstance::weights)
        .def_readonly("designer", &GameInstance::designer)
        .def_readonly("attacker", &GameInstance::attacker)
        .def_readonly("big_m", &GameInstance::big_m)
        .def("reward", &GameInstance::lambda, py::arg("j"), py::arg("l"))
        .def("cost", &GameInstance::zeta, py::arg("j"), py::arg("l"));
    m.def("build_game", [](const std::vector<double>& weights, int k, double big_m) {
        return build_game(weights, k, big_m);
    }, py::arg("weights"), py::arg("k"), py::arg("big_m") = kDefaultBigM);
    m.def("apply_detection_accuracy", &apply_detection_accuracy, py::arg("game"), py::arg("p"));

    py::class_<GameSolution>(m, "GameSolution")
        .def_readonly("attacker_strategy", &GameSolution::attacker_strategy)
        .def_readonly("probabilities", &GameSolution::probabilities)
        .def_readonly("objective", &GameSolution::objective)
        .def_property_readonly("statuses", [](const GameSolution& s) {
            std::vector<std::string> out;
            for (auto st : s.statuses) out.push_back(to_string(st));
            return out;
        });
    m.def("solve_game", [](const GameInstance& game, double epsilon, int jobs) {
        GameOptions o;
        o.epsilon = epsilon;
        o.jobs = jobs;
        return solve_game(game, o);
    }, py::arg("game"), py::arg("epsilon") = kDefaultEpsilon, py::arg("jobs") = 1);
    m.def("marginal_check_probability",
          py::overload_cast<const GameInstance&, const GameSolution&>(&marginal_check_probability), py::arg("game"),
          py::arg("solution"));

    // planner
    py::class_<TaskPlan>(m, "TaskPlan")
        .def_readonly("id", &TaskPlan::id)
        .def_readonly("num_commands", &TaskPlan::num_commands)
        .def_readonly("k_star", &TaskPlan::k_star)
        .def_readonly("strategies", &TaskPlan::strategies)
        .def_readonly("probabilities", &TaskPlan::probabilities)
        .def_readonly("attacker_strategy", &TaskPlan::attacker_strategy)
        .def_readonly("objective", &TaskPlan::objective)
        .def("deterministic", &TaskPlan::deterministic)
        .def("marginals", [](const TaskPlan& t) { return marginal_check_probability(t); });
    py::class_<CheckPlan>(m, "CheckPlan")
        .def_readonly("tasks", &CheckPlan::tasks)
        .def_readonly("feasible", &CheckPlan::feasible)
        .def("task", &CheckPlan::task, py::arg("id"), py::return_value_policy::reference_internal)
        .def("assignment", &CheckPlan::assignment)
        .def("to_json", &plan_to_json)
        .def_static("from_json", &parse_plan, py::arg("text"));
    py::class_<Infeasible>(m, "Infeasible").def_readonly("violating", &Infeasible::violating);

    m.def("max_feasible_k", &max_feasible_k, py::arg("task"), py::arg("taskset"), py::arg("fixed"));
    m.def("plan", [](const Taskset& ts, double big_m, double epsilon, double accuracy, double cap_fraction, int jobs) {
        PlannerOptions o;
        o.big_m = big_m;
        o.epsilon = epsilon;
        o.detection_accuracy = accuracy;
        o.max_check_fraction = cap_fraction;
        o.jobs = jobs;
        py::gil_scoped_release release;
        return plan(ts, o);
    }, py::arg("taskset"), py::arg("big_m") = kDefaultBigM, py::arg("epsilon") = kDefaultEpsilon,
       py::arg("accuracy") = 1.0, py::arg("cap_fraction") = 1.0, py::arg("jobs") = 1);

    // workload
    py::class_<WorkloadSpec>(m, "WorkloadSpec")
        .def(py::init<>())
        .def_readwrite("num_cores", &WorkloadSpec::num_cores)
        .def_readwrite("min_tasks_per_core", &WorkloadSpec::min_tasks_per_core)
        .def_readwrite("max_tasks_per_core", &WorkloadSpec::max_tasks_per_core)
        .def_readwrite("period_min_ms", &WorkloadSpec::period_min_ms)
        .def_readwrite("period_max_ms", &WorkloadSpec::period_max_ms)
        .def_readwrite("bucket", &WorkloadSpec::bucket)
        .def_property("scenario", [](const WorkloadSpec& s) { return to_string(s.scenario); },
                      [](WorkloadSpec& s, const std::string& v) { s.scenario = parse_scenario(v); })
        .def_property("partition", [](const WorkloadSpec& s) { return to_string(s.partition); },
                      [](WorkloadSpec& s, const std::string& v) { s.partition = parse_partition_heuristic(v); })
        .def_readwrite("fixed_num_commands", &WorkloadSpec::fixed_num_commands)
        .def_readwrite("min_check_fraction", &WorkloadSpec::min_check_fraction)
        .def_readwrite("overhead_fraction", &WorkloadSpec::overhead_fraction)
        .def_readwrite("tasksets_per_bucket", &WorkloadSpec::tasksets_per_bucket)
        .def_readwrite("seed", &WorkloadSpec::seed)
        .def_readwrite("retry_budget", &WorkloadSpec::retry_budget)
        .def_readwrite("require_vanilla_schedulable", &WorkloadSpec::require_vanilla_schedulable);
    m.def("randfixedsum", [](int n, double total, double lo, double hi, std::uint64_t seed) {
        Rng rng(seed);
        return randfixedsum(n, total, lo, hi, rng);
    }, py::arg("n"), py::arg("total"), py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("seed") = 1);
    m.def("gen_taskset", [](const WorkloadSpec& spec, int index) {
        Rng rng(taskset_seed(spec, index));
        return gen_taskset(spec, rng);
    }, py::arg("spec"), py::arg("index") = 0);

    // simulator
    py::class_<SimResult>(m, "SimResult")
        .def_readonly("delays", &SimResult::delays)
        .def_readonly("detected", &SimResult::detected)
        .def_readonly("mean", &SimResult::mean)
        .def_readonly("p99", &SimResult::p99)
        .def_readonly("undetected", &SimResult::undetected)
        .def("to_csv", [](const SimResult& r) { return to_csv(r); });
    m.def("run_detection_experiment",
          [](const CheckPlan& plan, TaskId victim, std::optional<std::vector<int>> compromised, std::size_t trials,
             std::int64_t max_jobs, std::uint64_t seed, std::optional<std::int64_t> trigger, const std::string& mode,
             double accuracy, int jobs) {
              AttackSpec a;
              a.victim = victim;
              a.compromised = compromised ? to_mask(*compromised) : 0;
              a.trigger_job = trigger;
              a.mode = parse_attack_mode(mode);
              a.detection_accuracy = accuracy;
              py::gil_scoped_release release;
              return run_detection_experiment(plan, a, trials, max_jobs, seed, jobs);
          },
          py::arg("plan"), py::arg("victim"), py::arg("compromised") = py::none(), py::arg("trials") = 1000,
          py::arg("max_jobs") = 10000, py::arg("seed") = 1, py::arg("trigger") = py::none(),
          py::arg("mode") = "persistent", py::arg("accuracy") = 1.0, py::arg("jobs") = 1);
    m.def("roulette_select", [](const std::vector<double>& x, std::size_t draws, std::uint64_t seed) {
        Rng rng(seed);
        std::vector<std::size_t> out(draws);
        for (auto& v : out) v = roulette_select(x, rng);
        return out;
    }, py::arg("x"), py::arg("draws") = 1, py::arg("seed") = 1);
    m.def("coverage_ratio", &coverage_ratio, py::arg("plan"));
    m.def("acceptance_ratio", [](const std::vector<Taskset>& batch, const std::string& scheme) {
        Scheme s = scheme == "unsecured" ? Scheme::unsecured
                 : scheme == "fine-grain" ? Scheme::fine_grain
                 : scheme == "selective" ? Scheme::selective
                                         : throw std::invalid_argument("unknown scheme '" + scheme + "'");
        return acceptance_ratio(batch, s);
    }, py::arg("batch"), py::arg("scheme"));

    // experiments
    m.def("sweep", [](int fig, int tasksets_per_bucket, std::size_t trials, std::uint64_t seed, int jobs,
                      const std::string& partition) {
        SweepOptions o;
        o.tasksets_per_bucket = tasksets_per_bucket;
        o.trials = trials;
        o.seed = seed;
        o.jobs = jobs;
        o.partition = parse_partition_heuristic(partition);
        py::gil_scoped_release release;
        switch (fig) {
            case 6: return sweep_coverage(o).to_csv();
            case 7: return sweep_detection_tradeoff(o).to_csv();
            case 8: return sweep_acceptance(o).to_csv();
        }
        throw std::invalid_argument("fig must be 6, 7 or 8");
    }, py::arg("fig"), py::arg("tasksets_per_bucket") = 50, py::arg("trials") = 1000, py::arg("seed") = 1,
       py::arg("jobs") = 1, py::arg("partition") = "first-fit");
}
