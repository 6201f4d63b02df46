#include "selcheck/experiments.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <optional>

#include "selcheck/parallel.hpp"
#include "selcheck/schedulability.hpp"
#include "selcheck/simulator.hpp"

namespace selcheck {

std::string SweepResult::to_csv() const {
    std::string s = "bin,scenario,metric,value,samples,seed\n";
    for (const auto& r : rows) s += fmt::format("{},{},{},{},{},{}\n", r.bin, r.scenario, r.metric, r.value, r.samples, r.seed);
    return s;
}

const SweepRow& SweepResult::find(const std::string& bin, const std::string& scenario, const std::string& metric) const {
    for (const auto& r : rows) {
        if (r.bin == bin && r.scenario == scenario && r.metric == metric) return r;
    }
    throw std::out_of_range(fmt::format("no sweep row ({}, {}, {})", bin, scenario, metric));
}

std::string bucket_label(int bucket) { return fmt::format("{:.2f}-{:.2f}", 0.01 + 0.1 * bucket, 0.1 + 0.1 * bucket); }

std::string coverage_bin(double cr) {
    if (cr >= 1.0 - 1e-9) return "1.0";
    const int b = std::clamp(static_cast<int>(std::floor(cr * 10.0 + 1e-9)), 2, 9);
    return fmt::format("{:.1f}-{:.1f}", b / 10.0, (b + 1) / 10.0);
}

std::vector<std::string> coverage_bins() {
    std::vector<std::string> out;
    for (int b = 2; b <= 9; ++b) out.push_back(fmt::format("{:.1f}-{:.1f}", b / 10.0, (b + 1) / 10.0));
    out.push_back("1.0");
    return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Mean {
    double sum = 0.0;
    std::size_t n = 0;
    void add(double v) { sum += v, ++n; }
    double value() const { return n ? sum / static_cast<double>(n) : kNaN; }
};

WorkloadSpec base_spec(const SweepOptions& o, ActuationScenario scenario, int bucket) {
    WorkloadSpec s;
    s.num_cores = o.num_cores;
    s.scenario = scenario;
    s.bucket = bucket;
    s.seed = o.seed;
    s.tasksets_per_bucket = o.tasksets_per_bucket;
    s.partition = o.partition;
    return s;
}

std::optional<Taskset> generate(const WorkloadSpec& spec, int index) {
    Rng rng(taskset_seed(spec, index));
    try {
        return gen_taskset(spec, rng);
    } catch (const GenerationError&) {
        return std::nullopt;
    }
}

// Every (scenario, bucket, index) slot of a sweep, flattened for parallel evaluation.
template <class Result, class Fn>
std::vector<Result> over_slots(const SweepOptions& o, std::size_t scenarios, Fn&& fn) {
    if (o.tasksets_per_bucket < 1) throw std::invalid_argument("tasksets_per_bucket must be >= 1");
    const auto per = static_cast<std::size_t>(o.tasksets_per_bucket);
    std::vector<Result> out(scenarios * kNumBuckets * per);
    parallel_for(out.size(), o.jobs, [&](std::size_t i) {
        const auto scenario = i / (kNumBuckets * per);
        const auto bucket = static_cast<int>((i / per) % kNumBuckets);
        const auto index = static_cast<int>(i % per);
        out[i] = fn(scenario, bucket, index);
    });
    return out;
}

constexpr ActuationScenario kScenarios[] = {ActuationScenario::medium, ActuationScenario::high};

}  // namespace

SweepResult sweep_coverage(const SweepOptions& o) {
    struct Slot {
        bool generated = false;
        std::optional<double> cr;
    };
    PlannerOptions po = o.planner;
    po.solve_games = false;
    po.jobs = 1;
    const auto slots = over_slots<Slot>(o, 2, [&](std::size_t sc, int bucket, int index) {
        Slot s;
        const auto ts = generate(base_spec(o, kScenarios[sc], bucket), index);
        if (!ts) return s;
        s.generated = true;
        const auto result = plan(*ts, po);
        if (const auto* p = std::get_if<CheckPlan>(&result)) s.cr = coverage_ratio(*p);
        return s;
    });

    SweepResult r;
    const auto per = static_cast<std::size_t>(o.tasksets_per_bucket);
    for (std::size_t sc = 0; sc < 2; ++sc) {
        for (int b = 0; b < kNumBuckets; ++b) {
            Mean cr, feasible;
            for (std::size_t i = 0; i < per; ++i) {
                const Slot& s = slots[(sc * kNumBuckets + static_cast<std::size_t>(b)) * per + i];
                if (!s.generated) continue;
                feasible.add(s.cr ? 1.0 : 0.0);
                if (s.cr) cr.add(*s.cr);
            }
            const std::string name = to_string(kScenarios[sc]);
            r.rows.push_back({bucket_label(b), name, "coverage_ratio", cr.value(), cr.n, o.seed});
            r.rows.push_back({bucket_label(b), name, "feasible_ratio", feasible.value(), feasible.n, o.seed});
        }
    }
    return r;
}

SweepResult sweep_detection_tradeoff(const SweepOptions& o) {
    struct Slot {
        std::optional<double> cr;  // set for plan-feasible tasksets
        double gain = 0.0;
        double delay_selective = kNaN;
        double delay_fine = kNaN;
    };
    GameCache local_cache;
    PlannerOptions po = o.planner;
    po.jobs = 1;
    if (!po.cache) po.cache = &local_cache;

    const auto slots = over_slots<Slot>(o, 1, [&](std::size_t, int bucket, int index) {
        Slot s;
        WorkloadSpec spec = base_spec(o, ActuationScenario::medium, bucket);
        spec.fixed_num_commands = kTradeoffCommands;
        const auto ts = generate(spec, index);
        if (!ts) return s;
        auto result = plan(*ts, po);
        auto* p = std::get_if<CheckPlan>(&result);
        if (!p) return s;
        s.cr = coverage_ratio(*p);
        s.gain = 1.0 - (all_schedulable(*ts, full_checks_assignment(*ts)) ? 1.0 : 0.0);

        CheckPlan fine = *p;
        for (auto& t : fine.tasks) {
            t.k_star = t.num_commands;
            t.strategies.clear();
            t.probabilities.clear();
        }
        std::size_t victims = 0;
        for (const auto& t : p->tasks) victims += t.num_commands > 0 ? 1 : 0;
        const std::size_t trials = std::max<std::size_t>(1, o.trials / std::max<std::size_t>(victims, 1));
        Mean sel, fg;
        for (const auto& t : p->tasks) {
            if (t.num_commands < 1) continue;
            AttackSpec attack;
            attack.victim = t.id;
            attack.trigger_job = 0;  // jobs are i.i.d., so the trigger does not change the delay law
            const auto seed = derive_seed(o.seed, {7, static_cast<std::uint64_t>(bucket),
                                                   static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(t.id)});
            for (const auto& [which, acc] : {std::pair{p, &sel}, std::pair{&fine, &fg}}) {
                const SimResult sim = run_detection_experiment(*which, attack, trials, o.max_jobs, seed);
                for (std::size_t k = 0; k < sim.delays.size(); ++k) {
                    if (sim.detected[k]) acc->add(static_cast<double>(sim.delays[k]));
                }
            }
        }
        s.delay_selective = sel.value();
        s.delay_fine = fg.value();
        return s;
    });

    SweepResult r;
    for (const auto& bin : coverage_bins()) {
        Mean gain, sel, fg;
        for (const Slot& s : slots) {
            if (!s.cr || coverage_bin(*s.cr) != bin) continue;
            gain.add(s.gain);
            if (!std::isnan(s.delay_selective)) sel.add(s.delay_selective);
            if (!std::isnan(s.delay_fine)) fg.add(s.delay_fine);
        }
        const std::string name = fmt::format("n{}", kTradeoffCommands);
        r.rows.push_back({bin, name, "schedulability_gain", gain.value(), gain.n, o.seed});
        r.rows.push_back({bin, name, "mean_delay_selective", sel.value(), sel.n, o.seed});
        r.rows.push_back({bin, name, "mean_delay_fine_grain", fg.value(), fg.n, o.seed});
    }
    return r;
}

SweepResult sweep_acceptance(const SweepOptions& o) {
    struct Slot {
        bool unsecured = false, selective = false, fine = false;
    };
    PlannerOptions po = o.planner;
    po.solve_games = false;
    po.jobs = 1;
    const auto slots = over_slots<Slot>(o, 2, [&](std::size_t sc, int bucket, int index) {
        Slot s;
        WorkloadSpec spec = base_spec(o, kScenarios[sc], bucket);
        spec.require_vanilla_schedulable = false;
        const auto ts = generate(spec, index);
        if (!ts) return s;
        s.unsecured = scheme_schedulable(*ts, Scheme::unsecured, po);
        s.selective = scheme_schedulable(*ts, Scheme::selective, po);
        s.fine = scheme_schedulable(*ts, Scheme::fine_grain, po);
        return s;
    });

    SweepResult r;
    const auto per = static_cast<std::size_t>(o.tasksets_per_bucket);
    for (std::size_t sc = 0; sc < 2; ++sc) {
        for (int b = 0; b < kNumBuckets; ++b) {
            Mean u, sel, fg;
            for (std::size_t i = 0; i < per; ++i) {
                const Slot& s = slots[(sc * kNumBuckets + static_cast<std::size_t>(b)) * per + i];
                u.add(s.unsecured);
                sel.add(s.selective);
                fg.add(s.fine);
            }
            const std::string name = to_string(kScenarios[sc]);
            r.rows.push_back({bucket_label(b), name, "unsecured", u.value(), u.n, o.seed});
            r.rows.push_back({bucket_label(b), name, "selective", sel.value(), sel.n, o.seed});
            r.rows.push_back({bucket_label(b), name, "fine_grain", fg.value(), fg.n, o.seed});
        }
    }
    return r;
}

}  // namespace selcheck
