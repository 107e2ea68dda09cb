#pragma once

#include "svcp/feasibility.hpp"
#include "svcp/halle_catalog.hpp"
#include "svcp/heuristic.hpp"
#include "svcp/objectives.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <exception>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace svcp {

struct ScenarioConfig {
    int scenario_id = 0;  // row of the 16-run design, 0 for custom configurations
    int max_volunteers = 5000;
    int added_tasks_per_instance = 1;
    Rational capability_probability = make_rational(3, 10);
    int arrival_lambda = 7;
    Rational arrival_scale{30};  // kappa: mean arrivals per instance = lambda * kappa
    std::uint64_t seed = 1;
    int num_instances = 20;
    int decision_interval_slots = 1;
    int initial_tasks = 8;
    Horizon horizon;
    int min_run = 4;
    int max_work = 16;
    int initial_travel = 2;
    Rational travel_speed_kmh{10};
    PriorityStructure priorities;
    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline const std::vector<int>& allowed_max_volunteers() { static const std::vector<int> v{5000, 10000}; return v; }
inline const std::vector<int>& allowed_added_tasks() { static const std::vector<int> v{1, 2}; return v; }
inline const std::vector<Rational>& allowed_capability_probability() {
    static const std::vector<Rational> v{make_rational(3, 10), make_rational(1, 2)};
    return v;
}
inline const std::vector<int>& allowed_lambda() { static const std::vector<int> v{7, 11}; return v; }

/// The 2^4 factorial design, rows 1..16: volunteers, then added tasks,
/// then capability probability, then lambda varying fastest.
inline std::vector<ScenarioConfig> design_configs() {
    std::vector<ScenarioConfig> out;
    int id = 0;
    for (int volunteers : allowed_max_volunteers())
        for (int tasks : allowed_added_tasks())
            for (const auto& prob : allowed_capability_probability())
                for (int lambda : allowed_lambda()) {
                    ScenarioConfig c;
                    c.scenario_id = ++id;
                    c.max_volunteers = volunteers;
                    c.added_tasks_per_instance = tasks;
                    c.capability_probability = prob;
                    c.arrival_lambda = lambda;
                    out.push_back(c);
                }
    return out;
}

/// Design row whose factors equal c's, 0 when c is off the design.
inline int design_row(const ScenarioConfig& c) {
    for (const auto& d : design_configs())
        if (d.max_volunteers == c.max_volunteers && d.added_tasks_per_instance == c.added_tasks_per_instance &&
            d.capability_probability == c.capability_probability && d.arrival_lambda == c.arrival_lambda)
            return d.scenario_id;
    return 0;
}

inline std::vector<std::string> validate_config(const ScenarioConfig& c) {
    std::vector<std::string> out;
    if (c.max_volunteers < 0) out.push_back("max_volunteers must be non-negative");
    if (c.added_tasks_per_instance < 0) out.push_back("added_tasks_per_instance must be non-negative");
    if (c.capability_probability < 0 || c.capability_probability > 1) out.push_back("capability_probability outside [0,1]");
    if (c.arrival_lambda < 0) out.push_back("arrival_lambda must be non-negative");
    if (c.arrival_scale <= 0) out.push_back("arrival_scale must be positive");
    if (c.num_instances < 1) out.push_back("num_instances must be at least 1");
    if (c.decision_interval_slots < 1) out.push_back("decision_interval_slots must be at least 1");
    if (c.initial_tasks < 0) out.push_back("initial_tasks must be non-negative");
    if (c.horizon.num_slots < 1 || c.horizon.slot_minutes < 1) out.push_back("horizon must be positive");
    if (c.min_run < 1 || c.min_run > c.max_work || c.max_work > c.horizon.num_slots)
        out.push_back("need 1 <= tau_min <= tau_max <= T");
    if (c.initial_travel < 0) out.push_back("initial_travel must be non-negative");
    if (c.travel_speed_kmh <= 0) out.push_back("travel speed must be positive");
    return out;
}

/// Total time covered by the rolling horizon: the last instance starts
/// (N-1) decision intervals after the first and spans T slots.
inline Rational scenario_span_hours(const ScenarioConfig& c) {
    const long slots = static_cast<long>(c.num_instances - 1) * c.decision_interval_slots + c.horizon.num_slots;
    return make_rational(slots * c.horizon.slot_minutes, 60);
}

/// Poisson(lambda * kappa) arrivals clamped to the remaining pool capacity.
template <class Rng>
int sample_arrivals(int lambda, const Rational& kappa, int remaining_capacity, Rng& rng) {
    if (remaining_capacity <= 0) return 0;
    const double mean = static_cast<double>(lambda) * to_double(kappa);
    if (mean <= 0) return 0;
    std::poisson_distribution<long> poisson(mean);
    const long drawn = poisson(rng);
    return static_cast<int>(std::min<long>(drawn, remaining_capacity));
}

struct VolunteerArrival {
    int id = 0;
    std::vector<bool> capabilities;
    int available_from = 0;  // absolute slots, inclusive
    int available_to = 0;
    friend bool operator==(const VolunteerArrival&, const VolunteerArrival&) = default;
};

struct InstanceDelta {
    int index = 0;
    int absolute_start = 0;
    std::vector<int> new_tasks;
    std::vector<VolunteerArrival> new_volunteers;
    friend bool operator==(const InstanceDelta&, const InstanceDelta&) = default;
};

struct Scenario {
    ScenarioConfig config;
    Catalog catalog;
    std::vector<InstanceDelta> deltas;
};

/// Seeded arrivals of tasks (catalog order, without replacement) and
/// volunteers for every instance of the rolling horizon.
inline Scenario generate_scenario(const ScenarioConfig& config, const Catalog& catalog = halle_catalog()) {
    if (auto errors = validate_config(config); !errors.empty()) throw InputError("invalid scenario config: " + errors.front());
    Scenario sc{config, catalog, {}};
    std::mt19937_64 rng(config.seed);
    const int C = static_cast<int>(catalog.capabilities.size());
    const int T = config.horizon.num_slots;
    const double p = to_double(config.capability_probability);
    std::size_t next_task = 0;
    int pool = 0;
    for (int i = 0; i < config.num_instances; ++i) {
        InstanceDelta delta;
        delta.index = i;
        delta.absolute_start = i * config.decision_interval_slots;
        const int tasks = i == 0 ? config.initial_tasks : config.added_tasks_per_instance;
        for (int k = 0; k < tasks && next_task < catalog.tasks.size(); ++k)
            delta.new_tasks.push_back(catalog.tasks[next_task++].task_id);
        const int arrivals = sample_arrivals(config.arrival_lambda, config.arrival_scale, config.max_volunteers - pool, rng);
        std::bernoulli_distribution has(p);
        std::uniform_int_distribution<int> duration(config.min_run, T);
        for (int n = 0; n < arrivals; ++n) {
            VolunteerArrival va;
            va.id = ++pool;
            va.capabilities.resize(static_cast<std::size_t>(C));
            for (int c = 0; c < C; ++c) va.capabilities[static_cast<std::size_t>(c)] = has(rng);
            va.available_from = delta.absolute_start;
            va.available_to = delta.absolute_start + duration(rng) - 1;
            delta.new_volunteers.push_back(std::move(va));
        }
        sc.deltas.push_back(std::move(delta));
    }
    return sc;
}

/// Instance i of the scenario without carry-over: every volunteer and task
/// that has arrived so far, local slot 0 at absolute slot i*d.
inline Instance build_instance(const Scenario& sc, int i) {
    const auto& cfg = sc.config;
    if (i < 0 || i >= static_cast<int>(sc.deltas.size())) throw InputError("instance index out of range");
    const int T = cfg.horizon.num_slots;
    const int start = sc.deltas[static_cast<std::size_t>(i)].absolute_start;

    Instance inst;
    inst.horizon = cfg.horizon;
    inst.constants.min_run = cfg.min_run;
    inst.constants.max_work = cfg.max_work;
    inst.constants.travel_speed_kmh = cfg.travel_speed_kmh;
    inst.constants.weights = default_weights(T);
    inst.priorities = cfg.priorities;
    inst.capabilities = sc.catalog.capabilities;
    inst.meta.index = i;
    inst.meta.absolute_start = start;
    inst.meta.label = "scenario " + std::to_string(cfg.scenario_id) + " seed " + std::to_string(cfg.seed) +
                      " instance " + std::to_string(i + 1);

    for (int j = 0; j <= i; ++j) {
        const auto& delta = sc.deltas[static_cast<std::size_t>(j)];
        for (int task_id : delta.new_tasks) {
            const auto& task = find_task(sc.catalog, task_id);
            for (const auto& ca : task.activities) {
                TaskActivity act;
                act.id = inst.num_activities() + 1;
                act.task_id = task.task_id;
                act.label = ca.label;
                act.capability = ca.capability - 1;
                act.priority = task.priority;
                act.demand = ca.demand;
                act.window.assign(static_cast<std::size_t>(T), true);
                act.location = task.location;
                inst.activities.push_back(std::move(act));
            }
        }
        for (const auto& va : delta.new_volunteers) {
            Volunteer vol;
            vol.id = va.id;
            vol.capabilities = va.capabilities;
            vol.availability.assign(static_cast<std::size_t>(T), false);
            for (int t = 0; t < T; ++t)
                vol.availability[static_cast<std::size_t>(t)] = va.available_from <= start + t && start + t <= va.available_to;
            vol.initial_travel = cfg.initial_travel;
            inst.volunteers.push_back(std::move(vol));
        }
    }
    return inst;
}

/// Projects the solved instance `prev` (assignment x) onto `next`, whose
/// window starts `shift` slots later and whose volunteers and activities
/// extend prev's. Sets next's prior runs and each volunteer's worked-time
/// offset, continuing-run credit and per-activity initial travel.
inline void carry_over(const Instance& prev, const Assignment& x, int shift, Instance& next) {
    if (next.num_volunteers() < prev.num_volunteers() || next.num_activities() < prev.num_activities())
        throw InputError("carry-over target must extend the previous instance");
    const int A = next.num_activities();
    const TravelTable travel(next);
    next.prior_runs.clear();

    std::vector<std::vector<Run>> by_volunteer(static_cast<std::size_t>(prev.num_volunteers()));
    for (const auto& run : x.runs()) by_volunteer[static_cast<std::size_t>(run.volunteer)].push_back(run);

    for (int v = 0; v < prev.num_volunteers(); ++v) {
        const auto& old = prev.volunteers[static_cast<std::size_t>(v)];
        auto& vol = next.volunteers[static_cast<std::size_t>(v)];
        auto runs = by_volunteer[static_cast<std::size_t>(v)];
        std::sort(runs.begin(), runs.end(), [](const Run& l, const Run& r) { return l.start < r.start; });

        vol.worked_offset = old.worked_offset;
        vol.continuing = {};
        vol.travel_overrides.clear();
        const Run* last_started = nullptr;
        for (const auto& run : runs) {
            vol.worked_offset += std::max(0, std::min(run.end, shift - 1) - run.start + 1);
            if (run.start < shift) last_started = &run;
            if (run.end >= shift)
                next.prior_runs.push_back({v, run.activity, std::max(run.start, shift) - shift, run.end - shift});
        }

        if (last_started && last_started->end >= shift) {
            // still on activity b at local slot 0
            const Run& r = *last_started;
            int credit = shift - r.start;
            if (r.start == 0 && old.continuing.activity == r.activity) credit += old.continuing.slots;
            vol.continuing = {r.activity, credit};
            for (int a = 0; a < A; ++a) vol.travel_overrides[a] = travel(r.activity, a);
        } else if (last_started) {
            const Run& r = *last_started;
            for (int a = 0; a < A; ++a) vol.travel_overrides[a] = std::max(0, r.end - shift + 1 + travel(r.activity, a));
        } else if (!runs.empty()) {
            for (int a = 0; a < A; ++a) vol.travel_overrides[a] = std::max(0, old.travel_to(a) - shift);
        } else {
            for (const auto& [a, slots] : old.travel_overrides) vol.travel_overrides[a] = std::max(0, slots - shift);
        }
    }
    std::sort(next.prior_runs.begin(), next.prior_runs.end(), [](const Run& l, const Run& r) {
        return std::tie(l.volunteer, l.activity, l.start) < std::tie(r.volunteer, r.activity, r.start);
    });
}

struct SolverOutput {
    Assignment assignment;
    long evaluations = 0;
};

using Solver = std::function<SolverOutput(const Instance&)>;

inline Solver heuristic_solver() {
    return [](const Instance& inst) {
        auto r = solve(inst);
        return SolverOutput{std::move(r.assignment), r.evaluations};
    };
}

struct RollingStep {
    int index = 0;
    Assignment assignment;
    ObjectiveVector objective;
    long wall_us = 0;
    long evaluations = 0;
    bool feasible = false;
    int num_volunteers = 0;
    int num_activities = 0;
};

struct RollingResult {
    std::vector<RollingStep> steps;
    std::vector<Run> carried;  // prior runs handed to the instance after the last step
    bool completed = false;
    std::string error;
    std::exception_ptr failure;  // the solver's exception when !completed
};

/// Observer sees each instance (with its carried prior runs) and its step.
using RollingObserver = std::function<void(const Instance&, const RollingStep&)>;

/// Solves the instances in order, carrying each assignment into the next
/// instance. A solver failure stops the run and keeps the finished steps.
/// With keep_assignments off only the last assignment survives in memory.
inline RollingResult roll_horizon(const Scenario& sc, const Solver& solver, const RollingObserver& observer = {},
                                  bool keep_assignments = true) {
    RollingResult result;
    const int N = static_cast<int>(sc.deltas.size());
    Instance current = build_instance(sc, 0);
    for (int i = 0; i < N; ++i) {
        RollingStep step;
        step.index = i;
        step.num_volunteers = current.num_volunteers();
        step.num_activities = current.num_activities();
        try {
            const auto t0 = std::chrono::steady_clock::now();
            SolverOutput out = solver(current);
            const auto t1 = std::chrono::steady_clock::now();
            step.wall_us = std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
            step.evaluations = out.evaluations;
            step.feasible = check_feasibility(current, out.assignment).empty();
            step.objective = objective_vector(current, out.assignment);
            step.assignment = std::move(out.assignment);
        } catch (const std::exception& e) {
            result.error = "instance " + std::to_string(i + 1) + ": " + e.what();
            result.failure = std::current_exception();
            return result;
        }
        if (observer) observer(current, step);
        if (i + 1 < N) {
            Instance next = build_instance(sc, i + 1);
            carry_over(current, step.assignment, sc.config.decision_interval_slots, next);
            current = std::move(next);
        } else {
            Instance tail = current;
            carry_over(current, step.assignment, sc.config.decision_interval_slots, tail);
            result.carried = tail.prior_runs;
        }
        if (!keep_assignments && i + 1 < N) step.assignment = Assignment();
        result.steps.push_back(std::move(step));
    }
    result.completed = true;
    return result;
}

}  // namespace svcp
