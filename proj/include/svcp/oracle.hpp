#pragma once

#include "svcp/feasibility.hpp"
#include "svcp/objectives.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace svcp {

struct OracleLimits {
    int max_volunteers = 4;
    int max_activities = 3;
    int max_slots = 8;
    long max_states = 10'000'000;
};

/// Instance outside OracleLimits.
struct RefusalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Enumeration exceeded the state budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExactResult {
    Assignment assignment;
    ObjectiveVector objective;
    long states = 0;
};

namespace detail {

/// One volunteer's complete row: activity per slot (-1 idle) plus its
/// contribution to every class objective.
struct Schedule {
    std::vector<int> slot_activity;
    std::vector<Rational> class_value;  // OF order: index 0 = class K
};

/// Every schedule of volunteer v satisfying C1-C3 and C5-C10 on its own,
/// built slot by slot. Order: idle before activities, activities ascending.
inline std::vector<Schedule> enumerate_schedules(const Instance& inst, const TravelTable& travel, int v,
                                                 long& states, long max_states) {
    const int A = inst.num_activities(), T = inst.num_slots();
    const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
    const auto& k = inst.constants;
    const int budget = k.max_work - vol.worked_offset;
    const int K = inst.priorities.num_classes();

    std::vector<int> forced(static_cast<std::size_t>(T), -1);
    for (const auto& run : inst.prior_runs)
        if (run.volunteer == v)
            for (int t = run.start; t <= run.end; ++t) forced[static_cast<std::size_t>(t)] = run.activity;

    std::vector<Schedule> out;
    std::vector<int> row(static_cast<std::size_t>(T), -1);

    // current: activity of the open run (-1 none) and its effective length;
    // last_end/last_activity describe the most recently closed run.
    struct State {
        int current = -1;
        int length = 0;
        int last_end = -1;
        int last_activity = -1;
        bool any = false;
        int worked = 0;
    };

    auto finish = [&](const State& s) {
        if (s.current >= 0 && s.length < k.min_run) return;
        Schedule sched;
        sched.slot_activity = row;
        sched.class_value.assign(static_cast<std::size_t>(K), Rational{0});
        for (int t = 0; t < T; ++t) {
            const int a = row[static_cast<std::size_t>(t)];
            if (a < 0) continue;
            const int cls = inst.priorities.class_of(inst.activities[static_cast<std::size_t>(a)].priority);
            sched.class_value[static_cast<std::size_t>(K - cls)] += k.weights[static_cast<std::size_t>(t)];
        }
        out.push_back(std::move(sched));
    };

    auto rec = [&](auto&& self, int t, State s) -> void {
        if (++states > max_states) throw ResourceError("oracle state budget exhausted");
        if (t == T) {
            finish(s);
            return;
        }
        const int must = forced[static_cast<std::size_t>(t)];
        if (must < 0 && (s.current < 0 || s.length >= k.min_run)) {
            State idle = s;
            if (idle.current >= 0) {
                idle.last_end = t - 1;
                idle.last_activity = idle.current;
                idle.current = -1;
                idle.length = 0;
            }
            row[static_cast<std::size_t>(t)] = -1;
            self(self, t + 1, idle);
        }
        if (s.worked + 1 > budget) return;
        if (!vol.availability[static_cast<std::size_t>(t)]) return;
        for (int a = 0; a < A; ++a) {
            if (must >= 0 && a != must) continue;
            const auto& act = inst.activities[static_cast<std::size_t>(a)];
            if (!vol.has_capability(act.capability) || !act.window[static_cast<std::size_t>(t)]) continue;
            State next = s;
            next.worked += 1;
            if (s.current == a) {
                next.length += 1;
            } else {
                if (s.current >= 0) {
                    if (s.length < k.min_run) continue;
                    next.last_end = t - 1;
                    next.last_activity = s.current;
                }
                if (next.last_activity >= 0) {
                    if (t - next.last_end - 1 < travel(next.last_activity, a)) continue;
                } else if (!next.any) {
                    if (t < vol.travel_to(a)) continue;
                }
                next.current = a;
                next.length = 1;
                if (t == 0 && vol.continuing.slots > 0 && vol.continuing.activity == a) next.length += vol.continuing.slots;
                next.any = true;
            }
            row[static_cast<std::size_t>(t)] = a;
            self(self, t + 1, next);
        }
        row[static_cast<std::size_t>(t)] = -1;
    };
    rec(rec, 0, State{});
    return out;
}

}  // namespace detail

/// Exhaustive lexicographic optimum for tiny instances. Per-volunteer
/// schedules are enumerated first, then composed volunteer by volunteer
/// under the staffing limit; the first lex-best composition found wins.
inline ExactResult solve_exact(const Instance& inst, const OracleLimits& limits = {}) {
    if (auto defects = validate_instance(inst); !defects.empty())
        throw InputError("invalid instance: " + defects.front().message);
    if (inst.num_volunteers() > limits.max_volunteers || inst.num_activities() > limits.max_activities ||
        inst.num_slots() > limits.max_slots)
        throw RefusalError("instance exceeds oracle limits (" + std::to_string(limits.max_volunteers) + " volunteers, " +
                           std::to_string(limits.max_activities) + " activities, " + std::to_string(limits.max_slots) +
                           " slots)");

    const int V = inst.num_volunteers(), A = inst.num_activities(), T = inst.num_slots();
    const int K = inst.priorities.num_classes();
    const TravelTable travel(inst);
    const SupplyTable supply(inst);
    long states = 0;

    std::vector<std::vector<detail::Schedule>> schedules(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) {
        schedules[static_cast<std::size_t>(v)] = detail::enumerate_schedules(inst, travel, v, states, limits.max_states);
        if (schedules[static_cast<std::size_t>(v)].empty())
            throw InputError("volunteer " + std::to_string(v + 1) + " has no feasible schedule");
    }

    std::vector<int> counts(static_cast<std::size_t>(A) * T, 0);
    std::vector<int> choice(static_cast<std::size_t>(V), 0);
    std::vector<std::vector<Rational>> partial(static_cast<std::size_t>(V) + 1,
                                               std::vector<Rational>(static_cast<std::size_t>(K), Rational{0}));
    bool have_best = false;
    ObjectiveVector best;
    std::vector<int> best_choice;

    auto compose = [&](auto&& self, int v) -> void {
        if (v == V) {
            const auto& pv = partial[static_cast<std::size_t>(V)];
            if (have_best) {
                for (int i = 0; i < K; ++i) {
                    const int c = cmp(pv[static_cast<std::size_t>(i)], best.priority_values[static_cast<std::size_t>(i)]);
                    if (c < 0) return;
                    if (c > 0) break;
                }
            }
            ObjectiveVector candidate = objective_from_counts(inst, supply, counts);
            if (!have_best || lex_compare(candidate, best) == LexOrder::Better) {
                best = std::move(candidate);
                best_choice = choice;
                have_best = true;
            }
            return;
        }
        const auto& options = schedules[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < options.size(); ++i) {
            if (++states > limits.max_states) throw ResourceError("oracle state budget exhausted");
            const auto& sched = options[i];
            bool fits = true;
            int t = 0;
            for (; t < T; ++t) {
                const int a = sched.slot_activity[static_cast<std::size_t>(t)];
                if (a < 0) continue;
                auto& c = counts[static_cast<std::size_t>(a) * T + t];
                if (++c > inst.activities[static_cast<std::size_t>(a)].demand) fits = false;
            }
            if (fits) {
                choice[static_cast<std::size_t>(v)] = static_cast<int>(i);
                for (int k = 0; k < K; ++k)
                    partial[static_cast<std::size_t>(v) + 1][static_cast<std::size_t>(k)] =
                        partial[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] + sched.class_value[static_cast<std::size_t>(k)];
                self(self, v + 1);
            }
            for (t = 0; t < T; ++t) {
                const int a = sched.slot_activity[static_cast<std::size_t>(t)];
                if (a >= 0) --counts[static_cast<std::size_t>(a) * T + t];
            }
        }
    };
    compose(compose, 0);

    ExactResult result{Assignment(inst), {}, states};
    if (!have_best) {
        // C10 can make every composition overstaffed only if the prior assignments were invalid.
        throw InputError("no feasible composition exists");
    }
    for (int v = 0; v < V; ++v) {
        const auto& sched = schedules[static_cast<std::size_t>(v)][static_cast<std::size_t>(best_choice[static_cast<std::size_t>(v)])];
        for (int t = 0; t < T; ++t)
            if (const int a = sched.slot_activity[static_cast<std::size_t>(t)]; a >= 0) result.assignment.set(v, a, t);
    }
    result.objective = std::move(best);
    return result;
}

/// Per-objective relative gaps of a heuristic vector against a reference.
struct GapReport {
    std::vector<Rational> gaps;    // OF 1..K+2
    std::vector<bool> near_zero;   // reference below epsilon (or not positive for maximized entries)
    int num_classes = 0;
};

inline Rational default_gap_epsilon() { return make_rational(1, 1'000'000'000); }

/// Maximized entries: (opt - heur) / opt, or 0 with a flag when opt <= 0.
/// Minimized entries: (heur - opt) / opt when opt >= epsilon, else
/// (heur - opt) / epsilon with the near-zero flag set.
inline GapReport relative_gap(const ObjectiveVector& heuristic, const ObjectiveVector& optimal,
                              const Rational& epsilon = default_gap_epsilon()) {
    if (heuristic.num_classes() != optimal.num_classes())
        throw InputError("gap between objective vectors with different class counts");
    GapReport report;
    report.num_classes = optimal.num_classes();
    const auto h = heuristic.entries();
    const auto o = optimal.entries();
    for (std::size_t i = 0; i < o.size(); ++i) {
        const bool maximize = static_cast<int>(i) < report.num_classes;
        if (maximize) {
            if (sgn(o[i]) > 0) {
                report.gaps.push_back((o[i] - h[i]) / o[i]);
                report.near_zero.push_back(false);
            } else {
                report.gaps.push_back(Rational{0});
                report.near_zero.push_back(true);
            }
        } else if (o[i] >= epsilon) {
            report.gaps.push_back((h[i] - o[i]) / o[i]);
            report.near_zero.push_back(false);
        } else {
            report.gaps.push_back((h[i] - o[i]) / epsilon);
            report.near_zero.push_back(true);
        }
    }
    return report;
}

}  // namespace svcp
