#include "selcheck/workload.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "selcheck/planner.hpp"
#include "selcheck/schedulability.hpp"

namespace selcheck {

std::string to_string(ActuationScenario s) { return s == ActuationScenario::medium ? "medium" : "high"; }

ActuationScenario parse_scenario(const std::string& name) {
    if (name == "medium") return ActuationScenario::medium;
    if (name == "high") return ActuationScenario::high;
    throw std::invalid_argument("unknown actuation scenario '" + name + "'");
}

int WorkloadSpec::commands_lo() const {
    if (fixed_num_commands > 0) return fixed_num_commands;
    return scenario == ActuationScenario::medium ? 3 : 8;
}

int WorkloadSpec::commands_hi() const {
    if (fixed_num_commands > 0) return fixed_num_commands;
    return scenario == ActuationScenario::medium ? 5 : 10;
}

void check_spec(const WorkloadSpec& s) {
    if (s.num_cores < 1) throw std::invalid_argument("num_cores must be >= 1");
    if (s.min_tasks_per_core < 1 || s.max_tasks_per_core < s.min_tasks_per_core)
        throw std::invalid_argument("task-count range is empty");
    if (!(s.period_min_ms > 0.0) || s.period_max_ms < s.period_min_ms)
        throw std::invalid_argument("period range is invalid");
    if (s.bucket < 0 || s.bucket > 9) throw std::invalid_argument("utilization bucket must lie in 0..9");
    if (s.fixed_num_commands < 0) throw std::invalid_argument("fixed_num_commands must be non-negative");
    if (s.min_check_fraction < 0.0 || s.min_check_fraction > 1.0)
        throw std::invalid_argument("min_check_fraction must lie in [0, 1]");
    if (s.overhead_fraction < 0.0) throw std::invalid_argument("overhead_fraction must be non-negative");
    if (s.tasksets_per_bucket < 1) throw std::invalid_argument("tasksets_per_bucket must be >= 1");
    if (s.retry_budget < 1) throw std::invalid_argument("retry_budget must be >= 1");
    const double max_total = static_cast<double>(s.num_cores * s.max_tasks_per_core);
    if (s.utilization_lo() > max_total)
        throw std::invalid_argument("utilization bucket cannot be met with unit per-task bounds");
}

std::vector<double> randfixedsum(int n, double total, double lo, double hi, Rng& rng) {
    if (n < 1) throw std::invalid_argument("randfixedsum needs n >= 1");
    if (!(hi >= lo)) throw std::invalid_argument("randfixedsum needs lo <= hi");
    const double slack = 1e-12 * std::max(1.0, std::abs(total));
    if (total < n * lo - slack || total > n * hi + slack)
        throw std::invalid_argument(fmt::format("total {} outside [{}, {}]", total, n * lo, n * hi));
    if (hi == lo) return std::vector<double>(static_cast<std::size_t>(n), lo);

    const auto N = static_cast<std::size_t>(n);
    // Work on the unit cube.
    double s = (total - n * lo) / (hi - lo);
    const double k = std::max(std::min(std::floor(s), static_cast<double>(n - 1)), 0.0);
    s = std::max(std::min(s, k + 1.0), k);

    std::vector<double> s1(N), s2(N);
    for (std::size_t i = 0; i < N; ++i) {
        s1[i] = s - (k - static_cast<double>(i));
        s2[i] = (k + n - static_cast<double>(i)) - s;
    }

    // w(i, m): scaled volumes; t(i, m): transition probabilities between simplex types.
    std::vector<std::vector<double>> w(N, std::vector<double>(N + 1, 0.0));
    std::vector<std::vector<double>> t(N > 1 ? N - 1 : 0, std::vector<double>(N, 0.0));
    w[0][1] = DBL_MAX;
    const double tiny = std::numeric_limits<double>::denorm_min();
    for (std::size_t i = 2; i <= N; ++i) {
        const double di = static_cast<double>(i);
        for (std::size_t m = 1; m <= i; ++m) {
            const double tmp1 = w[i - 2][m] * s1[m - 1] / di;
            const double tmp2 = w[i - 2][m - 1] * s2[N - i + m - 1] / di;
            w[i - 1][m] = tmp1 + tmp2;
            const double tmp3 = w[i - 1][m] + tiny;
            const bool right = s2[N - i + m - 1] > s1[m - 1];
            t[i - 2][m - 1] = right ? tmp2 / tmp3 : 1.0 - tmp1 / tmp3;
        }
    }

    std::vector<double> x(N, 0.0);
    auto col = static_cast<std::size_t>(k);  // 0-based column into t
    double sm = 0.0;
    double pr = 1.0;
    for (std::size_t i = N - 1; i >= 1; --i) {
        const double rt = rng.uniform();
        const double rs = rng.uniform();
        const double e = rt <= t[i - 1][col] ? 1.0 : 0.0;
        const double sx = std::pow(rs, 1.0 / static_cast<double>(i));
        sm += (1.0 - sx) * pr * s / static_cast<double>(i + 1);
        pr *= sx;
        x[N - i - 1] = sm + pr * e;
        s -= e;
        if (e > 0.0) --col;
    }
    x[N - 1] = sm + pr * s;

    for (std::size_t i = N - 1; i > 0; --i) {
        auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(x[i], x[j]);
    }
    for (double& v : x) v = std::clamp((hi - lo) * v + lo, lo, hi);
    return x;
}

std::vector<TimeUnits> gen_periods(int n, TimeUnits lo, TimeUnits hi, Rng& rng) {
    if (lo <= 0 || hi < lo) throw std::invalid_argument("period range must satisfy 0 < lo <= hi");
    std::vector<TimeUnits> out(static_cast<std::size_t>(std::max(n, 0)));
    const double llo = std::log(static_cast<double>(lo));
    const double lhi = std::log(static_cast<double>(hi));
    for (auto& p : out) {
        const double v = std::exp(rng.uniform(llo, lhi));
        p = std::clamp(static_cast<TimeUnits>(std::llround(v)), lo, hi);
    }
    return out;
}

namespace {

Taskset draw_taskset(const WorkloadSpec& spec, Rng& rng) {
    const int P = spec.num_cores;
    const int n = static_cast<int>(rng.uniform_int(spec.min_tasks_per_core * P, spec.max_tasks_per_core * P));
    const double total = rng.uniform(spec.utilization_lo(), spec.utilization_hi());
    const auto utils = randfixedsum(n, total, 0.0, 1.0, rng);
    const auto periods = gen_periods(n, std::llround(spec.period_min_ms * 1000.0),
                                     std::llround(spec.period_max_ms * 1000.0), rng);

    Taskset ts;
    ts.time_unit = "us";
    ts.tasks.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        Task t;
        t.id = i + 1;
        t.period = periods[idx];
        t.deadline = t.period;
        t.wcet = std::clamp<TimeUnits>(std::llround(utils[idx] * static_cast<double>(t.period)), 1, t.period);
        t.num_commands = static_cast<int>(rng.uniform_int(spec.commands_lo(), spec.commands_hi()));
        t.min_checks = static_cast<int>(std::ceil(spec.min_check_fraction * t.num_commands - 1e-12));
        t.weights.assign(static_cast<std::size_t>(t.num_commands), 1.0);
        t.check_overhead =
            std::max<TimeUnits>(1, std::llround(spec.overhead_fraction * static_cast<double>(t.wcet)));
        ts.tasks.push_back(std::move(t));
    }
    return ts;
}

}  // namespace

Taskset gen_taskset(const WorkloadSpec& spec, Rng& rng) {
    check_spec(spec);
    for (int attempt = 0; attempt < spec.retry_budget; ++attempt) {
        Taskset ts = draw_taskset(spec, rng);
        try {
            ts.platform = partition(ts.tasks, spec.num_cores, spec.partition);
        } catch (const PartitionError&) {
            continue;
        }
        if (spec.require_vanilla_schedulable && !all_schedulable(ts, uniform_assignment(ts, 0))) continue;
        return ts;
    }
    throw GenerationError(fmt::format("no acceptable taskset after {} attempts (bucket {}, {} scenario)",
                                      spec.retry_budget, spec.bucket, to_string(spec.scenario)));
}

std::uint64_t taskset_seed(const WorkloadSpec& spec, int index) {
    return derive_seed(spec.seed, {static_cast<std::uint64_t>(spec.scenario), static_cast<std::uint64_t>(spec.bucket),
                                   static_cast<std::uint64_t>(index)});
}

}  // namespace selcheck
