#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "selcheck/experiments.hpp"
#include "selcheck/io.hpp"
#include "selcheck/planner.hpp"
#include "selcheck/schedulability.hpp"
#include "selcheck/simulator.hpp"
#include "selcheck/workload.hpp"

namespace selcheck::cli {

namespace {

namespace fs = std::filesystem;

void emit(const std::string& content, const std::string& path, std::ostream& out) {
    if (path.empty() || path == "-") out << content;
    else write_file(path, content);
}

void add_preset_option(CLI::App* cmd, std::string& preset) {
    cmd->add_option("--preset", preset, "Per-command checking overhead")
        ->check(CLI::IsMember({"linux-optee", "freertos", "custom"}))
        ->capture_default_str();
}

void add_game_options(CLI::App* cmd, PlannerOptions& po) {
    cmd->add_option("--big-m", po.big_m, "Reward/cost magnitude for exact and missed detection")->capture_default_str();
    cmd->add_option("--epsilon", po.epsilon, "Lower bound on every strategy probability")->capture_default_str();
    cmd->add_option("--accuracy", po.detection_accuracy, "Detection accuracy of a single check")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--cap-fraction", po.max_check_fraction, "Cap K at floor(fraction * N)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
}

Taskset load_taskset(const std::string& path, const std::string& preset) {
    Taskset ts = parse_taskset(read_file(path));
    apply_overhead_preset(ts, parse_overhead_preset(preset));
    return ts;
}

std::string join_ids(const std::vector<TaskId>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) s += (i ? ", " : "") + std::to_string(ids[i]);
    return s;
}

CommandMask parse_compromised(const std::string& text, const TaskPlan& tp) {
    if (text == "random") return 0;
    if (text == "l-star") {
        if (!tp.attacker_strategy) throw std::invalid_argument("plan carries no attacker best response for this task");
        const auto mask = static_cast<CommandMask>(*tp.attacker_strategy);
        if (mask == 0) throw std::invalid_argument("the attacker's best response compromises no command");
        return mask;
    }
    std::vector<int> cmds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int c = 0;
        try {
            c = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || c < 1 || c > tp.num_commands)
            throw std::invalid_argument(fmt::format("bad compromised command '{}' (expected 1..{})", item, tp.num_commands));
        cmds.push_back(c);
    }
    if (cmds.empty()) throw std::invalid_argument("compromised set must not be empty");
    return mask_of(cmds);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Selective actuation-command checking for partitioned real-time systems", "selcheck"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "selcheck 1.0");

    std::string out_path;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string preset = "custom";
    PlannerOptions po;

    // gen
    auto* gen = app.add_subcommand("gen", "Generate random tasksets plus a manifest");
    std::string spec_path, scenario_override;
    std::optional<int> per_bucket_gen;
    std::optional<std::uint64_t> gen_seed;
    gen->add_option("--spec", spec_path, "Workload spec (JSON); defaults apply when omitted")->check(CLI::ExistingFile);
    gen->add_option("--out", out_path, "Output directory")->required();
    gen->add_option("--seed", gen_seed, "Overrides the spec seed");
    gen->add_option("--tasksets-per-bucket", per_bucket_gen, "Overrides the spec count");
    gen->add_option("--scenario", scenario_override, "Overrides the spec scenario")->check(CLI::IsMember({"medium", "high"}));
    add_preset_option(gen, preset);

    // plan
    auto* plan_cmd = app.add_subcommand("plan", "Choose per-task check counts and solve the checking games");
    std::string taskset_path;
    plan_cmd->add_option("taskset", taskset_path, "Taskset file (JSON)")->required()->check(CLI::ExistingFile);
    plan_cmd->add_option("--out", out_path, "Plan file; standard output when omitted");
    plan_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    add_preset_option(plan_cmd, preset);
    add_game_options(plan_cmd, po);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte-Carlo detection delay for one task of a plan");
    std::string plan_path, compromised = "random", trigger = "random", mode = "persistent";
    TaskId victim = 0;
    std::size_t trials = 1000;
    std::int64_t max_jobs = 10000;
    double accuracy = 1.0;
    sim->add_option("plan", plan_path, "Plan file (JSON)")->required()->check(CLI::ExistingFile);
    sim->add_option("--victim", victim, "Attacked task id")->required();
    sim->add_option("--compromised", compromised, "Comma-separated commands, 'random' or 'l-star'")->capture_default_str();
    sim->add_option("--trigger", trigger, "First attacked job index or 'random'")->capture_default_str();
    sim->add_option("--mode", mode, "Attack mode")->check(CLI::IsMember({"persistent", "one-shot"}))->capture_default_str();
    sim->add_option("--trials", trials, "Independent trials")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--max-jobs", max_jobs, "Jobs simulated per trial")->check(CLI::PositiveNumber)->capture_default_str();
    sim->add_option("--accuracy", accuracy, "Detection accuracy of a single check")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    sim->add_option("--seed", seed, "Random seed")->capture_default_str();
    sim->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sim->add_option("--out", out_path, "Result CSV; standard output when omitted");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Parameter sweep for one figure");
    int fig = 0;
    SweepOptions so;
    std::string partition = "first-fit";
    sweep->add_option("--fig", fig, "Figure: 6 coverage, 7 trade-off, 8 acceptance")
        ->required()
        ->check(CLI::IsMember({6, 7, 8}));
    sweep->add_option("--seed", seed, "Random seed")->capture_default_str();
    sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--tasksets-per-bucket", so.tasksets_per_bucket, "Tasksets per utilization bucket")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep->add_option("--trials", so.trials, "Detection trials per taskset (fig 7)")->check(CLI::PositiveNumber)->capture_default_str();
    sweep->add_option("--partition", partition, "Core assignment heuristic")
        ->check(CLI::IsMember({"first-fit", "worst-fit"}))
        ->capture_default_str();
    sweep->add_option("--out", out_path, "CSV file, or a directory to receive figN_*.csv; standard output when omitted");
    add_game_options(sweep, po);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "Response-time bounds for a taskset");
    std::string checks = "min", analyze_plan;
    analyze->add_option("taskset", taskset_path, "Taskset file (JSON)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--checks", checks, "Checks per job: none, min, full")
        ->check(CLI::IsMember({"none", "min", "full"}))
        ->capture_default_str();
    analyze->add_option("--plan", analyze_plan, "Use K* from this plan file instead")->check(CLI::ExistingFile);
    analyze->add_option("--out", out_path, "CSV file; standard output when omitted");
    add_preset_option(analyze, preset);

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitFailure;
    }

    try {
        po.jobs = jobs;
        if (*gen) {
            WorkloadSpec spec = spec_path.empty() ? WorkloadSpec{} : parse_workload_spec(read_file(spec_path));
            std::vector<int> buckets = spec_path.empty() ? std::vector<int>{spec.bucket} : parse_spec_buckets(read_file(spec_path));
            if (gen_seed) spec.seed = *gen_seed;
            if (per_bucket_gen) spec.tasksets_per_bucket = *per_bucket_gen;
            if (!scenario_override.empty()) spec.scenario = parse_scenario(scenario_override);
            const OverheadPreset overhead = parse_overhead_preset(preset);

            std::string manifest = fmt::format("{{\n  \"seed\": {},\n  \"scenario\": \"{}\",\n  \"tasksets\": [", spec.seed,
                                               to_string(spec.scenario));
            bool first = true;
            std::size_t written = 0;
            for (int b : buckets) {
                spec.bucket = b;
                check_spec(spec);
                for (int i = 0; i < spec.tasksets_per_bucket; ++i) {
                    Rng rng(taskset_seed(spec, i));
                    const std::string name = fmt::format("taskset_{}_b{}_{:04}.json", to_string(spec.scenario), b, i);
                    std::string status = "ok";
                    try {
                        Taskset ts = gen_taskset(spec, rng);
                        apply_overhead_preset(ts, overhead);
                        write_file(fs::path(out_path) / name, taskset_to_json(ts));
                        ++written;
                    } catch (const GenerationError& e) {
                        status = "failed";
                        fmt::print(err, "bucket {} index {}: {}\n", b, i, e.what());
                    }
                    manifest += fmt::format("{}\n    {{\"file\": \"{}\", \"bucket\": {}, \"index\": {}, \"seed\": {}, \"status\": \"{}\"}}",
                                            first ? "" : ",", status == "ok" ? name : "", b, i, taskset_seed(spec, i), status);
                    first = false;
                }
            }
            manifest += "\n  ]\n}\n";
            write_file(fs::path(out_path) / "manifest.json", manifest);
            write_file(fs::path(out_path) / "spec.json", workload_spec_to_json(spec));
            fmt::print(err, "wrote {} tasksets to {}\n", written, out_path);
            if (written == 0) return kExitFailure;
            return kExitOk;
        }
        if (*plan_cmd) {
            const Taskset ts = load_taskset(taskset_path, preset);
            const auto result = plan(ts, po);
            if (const auto* inf = std::get_if<Infeasible>(&result)) {
                fmt::print(err, "minimum QoS requirements cannot be met: tasks {} miss their deadlines at N_min checks\n",
                           join_ids(inf->violating));
                return kExitInfeasible;
            }
            const auto& cp = std::get<CheckPlan>(result);
            emit(plan_to_json(cp), out_path, out);
            fmt::print(err, "planned {} tasks, coverage ratio {:.4f}\n", cp.tasks.size(), coverage_ratio(cp));
            return kExitOk;
        }
        if (*sim) {
            const CheckPlan cp = parse_plan(read_file(plan_path));
            const TaskPlan& tp = cp.task(victim);
            AttackSpec attack;
            attack.victim = victim;
            attack.compromised = parse_compromised(compromised, tp);
            attack.mode = parse_attack_mode(mode);
            attack.detection_accuracy = accuracy;
            if (trigger != "random") {
                try {
                    attack.trigger_job = std::stoll(trigger);
                } catch (const std::exception&) {
                    throw std::invalid_argument("--trigger expects a job index or 'random'");
                }
            }
            const SimResult r = run_detection_experiment(cp, attack, trials, max_jobs, seed, jobs);
            emit(to_csv(r), out_path, out);
            fmt::print(err, "mean delay {:.4f} jobs, p99 {} jobs, undetected {}/{}\n", r.mean, r.p99, r.undetected, trials);
            return kExitOk;
        }
        if (*sweep) {
            so.seed = seed;
            so.jobs = jobs;
            so.partition = parse_partition_heuristic(partition);
            so.planner = po;
            const SweepResult r = fig == 6 ? sweep_coverage(so) : fig == 7 ? sweep_detection_tradeoff(so) : sweep_acceptance(so);
            std::string target = out_path;
            if (!target.empty() && target != "-" && (fs::is_directory(target) || target.back() == '/')) {
                const char* name = fig == 6 ? "fig6_coverage.csv" : fig == 7 ? "fig7_tradeoff.csv" : "fig8_acceptance.csv";
                target = (fs::path(target) / name).string();
            }
            emit(r.to_csv(), target, out);
            return kExitOk;
        }
        if (*analyze) {
            const Taskset ts = load_taskset(taskset_path, preset);
            if (auto v = validate(ts); !v.empty())
                throw std::invalid_argument(fmt::format("task {} {}: {}", v.front().task, v.front().field, v.front().message));
            CheckAssignment a = checks == "none" ? uniform_assignment(ts, 0)
                              : checks == "full" ? full_checks_assignment(ts)
                                                 : min_checks_assignment(ts);
            if (!analyze_plan.empty()) a = parse_plan(read_file(analyze_plan)).assignment();
            const auto report = is_schedulable(ts, a);
            emit(to_csv(report), out_path, out);
            fmt::print(err, "taskset {}\n", report.schedulable ? "schedulable" : "not schedulable");
            return kExitOk;
        }
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace selcheck::cli
