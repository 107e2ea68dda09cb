#pragma once

#include "svcp/domain.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace svcp {

/// Number of whole slots needed to travel between two activity locations:
/// ceil(distance / speed * 60 / slot_minutes), evaluated exactly.
inline int travel_slots(const Point& from, const Point& to, const Rational& speed_kmh, int slot_minutes) {
    const Rational dx = from.x - to.x;
    const Rational dy = from.y - to.y;
    const Rational dist2 = dx * dx + dy * dy;
    if (sgn(dist2) == 0) return 0;
    const Rational km_per_slot = speed_kmh * slot_minutes / 60;
    const Rational km2 = km_per_slot * km_per_slot;
    auto covers = [&](long k) { return Rational{k * k} * km2 >= dist2; };
    long k = static_cast<long>(std::ceil(std::sqrt(dist2.get_d()) / km_per_slot.get_d()));
    k = std::max(k, 1L);
    while (k > 1 && covers(k - 1)) --k;
    while (!covers(k)) ++k;
    return static_cast<int>(k);
}

inline int travel_slots(const Instance& inst, int a, int b) {
    if (a == b) return 0;
    return travel_slots(inst.activities[static_cast<std::size_t>(a)].location,
                        inst.activities[static_cast<std::size_t>(b)].location, inst.constants.travel_speed_kmh,
                        inst.horizon.slot_minutes);
}

/// Dense s_{a,a'} table.
class TravelTable {
public:
    TravelTable() = default;
    explicit TravelTable(const Instance& inst) : n_(inst.num_activities()) {
        table_.assign(static_cast<std::size_t>(n_) * n_, 0);
        for (int a = 0; a < n_; ++a)
            for (int b = a + 1; b < n_; ++b) {
                const int s = travel_slots(inst, a, b);
                table_[static_cast<std::size_t>(a) * n_ + b] = s;
                table_[static_cast<std::size_t>(b) * n_ + a] = s;
            }
    }
    int operator()(int a, int b) const { return table_[static_cast<std::size_t>(a) * n_ + b]; }

private:
    int n_ = 0;
    std::vector<int> table_;
};

/// Sum over (a,t) of x_{v,a,t}; excludes slots worked in earlier instances.
inline int total_working_time(const Assignment& x, int v) {
    int total = 0;
    for (int a = 0; a < x.num_activities(); ++a)
        for (int t = 0; t < x.num_slots(); ++t) total += x.at(v, a, t) ? 1 : 0;
    return total;
}

enum class Rule { C1, C2, C3, C4, C5, C6, C7, C8, C9, C10 };

inline const char* rule_name(Rule r) {
    static const char* names[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10"};
    return names[static_cast<int>(r)];
}

inline const char* rule_description(Rule r) {
    switch (r) {
        case Rule::C1: return "capability compatibility";
        case Rule::C2: return "availability";
        case Rule::C3: return "activity window";
        case Rule::C4: return "overstaffing";
        case Rule::C5: return "one activity at a time";
        case Rule::C6: return "total working time";
        case Rule::C7: return "minimum run duration";
        case Rule::C8: return "initial travel";
        case Rule::C9: return "inter-activity travel";
        case Rule::C10: return "non-preemption";
    }
    return "?";
}

struct Violation {
    Rule rule;
    int volunteer = -1;  // -1 when not volunteer-specific
    int activity = -1;
    int slot = -1;
    std::string detail;

    std::string describe() const {
        std::ostringstream os;
        os << rule_name(rule) << " (" << rule_description(rule) << ")";
        if (volunteer >= 0) os << " volunteer " << volunteer + 1;
        if (activity >= 0) os << " activity " << activity + 1;
        if (slot >= 0) os << " slot " << slot + 1;
        if (!detail.empty()) os << ": " << detail;
        return os.str();
    }
};

namespace detail {

inline int effective_length(const Instance& inst, const Run& run) {
    const auto& cont = inst.volunteers[static_cast<std::size_t>(run.volunteer)].continuing;
    int len = run.length();
    if (run.start == 0 && cont.slots > 0 && cont.activity == run.activity) len += cont.slots;
    return len;
}

}  // namespace detail

/// Every violated rule C1..C10 of `x` against `inst` (empty = feasible).
inline std::vector<Violation> check_feasibility(const Instance& inst, const Assignment& x, const TravelTable& travel) {
    const int V = inst.num_volunteers(), A = inst.num_activities(), T = inst.num_slots();
    if (x.num_volunteers() != V || x.num_activities() != A || x.num_slots() != T)
        throw InputError("assignment dimensions do not match the instance");

    std::vector<Violation> out;

    for (int v = 0; v < V; ++v) {
        const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
        for (int a = 0; a < A; ++a) {
            const auto& act = inst.activities[static_cast<std::size_t>(a)];
            for (int t = 0; t < T; ++t) {
                if (!x.at(v, a, t)) continue;
                if (!vol.has_capability(act.capability)) out.push_back({Rule::C1, v, a, t, {}});
                if (!vol.availability[static_cast<std::size_t>(t)]) out.push_back({Rule::C2, v, a, t, {}});
                if (!act.window[static_cast<std::size_t>(t)]) out.push_back({Rule::C3, v, a, t, {}});
            }
        }
    }

    for (int a = 0; a < A; ++a) {
        const int demand = inst.activities[static_cast<std::size_t>(a)].demand;
        for (int t = 0; t < T; ++t) {
            int assigned = 0;
            for (int v = 0; v < V; ++v) assigned += x.at(v, a, t) ? 1 : 0;
            if (assigned > demand)
                out.push_back({Rule::C4, -1, a, t, std::to_string(assigned) + " assigned, demand " + std::to_string(demand)});
        }
    }

    std::vector<std::vector<Run>> by_volunteer(static_cast<std::size_t>(V));
    for (const auto& run : x.runs()) by_volunteer[static_cast<std::size_t>(run.volunteer)].push_back(run);

    for (int v = 0; v < V; ++v) {
        const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
        for (int t = 0; t < T; ++t) {
            int busy = 0;
            for (int a = 0; a < A; ++a) busy += x.at(v, a, t) ? 1 : 0;
            if (busy > 1) out.push_back({Rule::C5, v, -1, t, std::to_string(busy) + " activities"});
        }
        int worked = vol.worked_offset;
        for (const auto& run : by_volunteer[static_cast<std::size_t>(v)]) worked += run.length();
        if (worked > inst.constants.max_work)
            out.push_back({Rule::C6, v, -1, -1, std::to_string(worked) + " slots exceed " +
                                                     std::to_string(inst.constants.max_work)});

        auto runs = by_volunteer[static_cast<std::size_t>(v)];
        for (const auto& run : runs) {
            const int len = detail::effective_length(inst, run);
            if (len < inst.constants.min_run)
                out.push_back({Rule::C7, v, run.activity, run.start,
                               "run of " + std::to_string(len) + " slots, minimum " +
                                   std::to_string(inst.constants.min_run)});
        }
        if (runs.empty()) continue;
        std::sort(runs.begin(), runs.end(), [](const Run& l, const Run& r) {
            return l.start != r.start ? l.start < r.start : l.activity < r.activity;
        });
        const Run& first = runs.front();
        if (first.start < vol.travel_to(first.activity))
            out.push_back({Rule::C8, v, first.activity, first.start,
                           "initial travel needs " + std::to_string(vol.travel_to(first.activity)) + " slots"});
        for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
            const Run& prev = runs[i];
            const Run& next = runs[i + 1];
            if (next.start <= prev.end) continue;  // overlap is a C5 matter
            const int gap = next.start - prev.end - 1;
            const int need = travel(prev.activity, next.activity);
            if (gap < need)
                out.push_back({Rule::C9, v, next.activity, next.start,
                               "gap " + std::to_string(gap) + " after activity " + std::to_string(prev.activity + 1) +
                                   ", travel needs " + std::to_string(need)});
        }
    }

    for (const auto& run : inst.prior_runs)
        for (int t = run.start; t <= run.end; ++t)
            if (run.volunteer < V && run.activity < A && t >= 0 && t < T && !x.at(run.volunteer, run.activity, t))
                out.push_back({Rule::C10, run.volunteer, run.activity, t, {}});
    return out;
}

inline std::vector<Violation> check_feasibility(const Instance& inst, const Assignment& x) {
    return check_feasibility(inst, x, TravelTable(inst));
}

enum class Defect {
    BadHorizon,
    CapabilityIds,
    VolunteerIds,
    VolunteerCapabilityLength,
    VolunteerAvailabilityLength,
    NegativeTravel,
    BadWorkedOffset,
    BadContinuingRun,
    ActivityIds,
    ActivityCapability,
    ActivityPriority,
    ActivityDemand,
    ActivityWindowLength,
    PriorityLevels,
    EmptyClass,
    ClassesNotDisjoint,
    ClassesIncomplete,
    ClassesUnordered,
    MissingSigma,
    NonPositiveSigma,
    StraySigma,
    MinRunBelowOne,
    MinRunExceedsMaxWork,
    MaxWorkExceedsHorizon,
    NonPositiveSpeed,
    WeightsLength,
    WeightsNotDecreasing,
    PriorRunOutOfRange,
    PriorAssignmentInfeasible,
};

struct InstanceDefect {
    Defect code;
    std::string message;
};

/// Every structural defect of `inst`; an empty report means the instance is valid.
inline std::vector<InstanceDefect> validate_instance(const Instance& inst) {
    std::vector<InstanceDefect> out;
    auto report = [&](Defect code, std::string msg) { out.push_back({code, std::move(msg)}); };
    const int T = inst.num_slots();
    const int C = inst.num_capabilities();
    const int A = inst.num_activities();
    const int V = inst.num_volunteers();
    const int P = inst.priorities.levels;

    if (T < 1 || inst.horizon.slot_minutes < 1) report(Defect::BadHorizon, "horizon needs T >= 1 and slot_minutes >= 1");
    for (int c = 0; c < C; ++c)
        if (inst.capabilities[static_cast<std::size_t>(c)].id != c + 1)
            report(Defect::CapabilityIds, "capability ids must be contiguous from 1");

    for (int v = 0; v < V; ++v) {
        const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
        const std::string who = "volunteer " + std::to_string(v + 1);
        if (vol.id != v + 1) report(Defect::VolunteerIds, "volunteer ids must be contiguous from 1");
        if (static_cast<int>(vol.capabilities.size()) != C)
            report(Defect::VolunteerCapabilityLength, who + ": capability vector length differs from C");
        if (static_cast<int>(vol.availability.size()) != T)
            report(Defect::VolunteerAvailabilityLength, who + ": availability length differs from T");
        bool bad_travel = vol.initial_travel < 0;
        for (const auto& [a, s] : vol.travel_overrides) bad_travel = bad_travel || s < 0 || a < 0 || a >= A;
        if (bad_travel) report(Defect::NegativeTravel, who + ": travel entries must be >= 0 and reference activities");
        if (vol.worked_offset < 0) report(Defect::BadWorkedOffset, who + ": worked offset below zero");
        if (vol.continuing.slots < 0 || (vol.continuing.slots > 0 && (vol.continuing.activity < 0 || vol.continuing.activity >= A)))
            report(Defect::BadContinuingRun, who + ": continuing run references no activity");
    }

    for (int a = 0; a < A; ++a) {
        const auto& act = inst.activities[static_cast<std::size_t>(a)];
        const std::string what = "activity " + std::to_string(a + 1);
        if (act.id != a + 1) report(Defect::ActivityIds, "activity ids must be contiguous from 1");
        if (act.capability < 0 || act.capability >= C) report(Defect::ActivityCapability, what + ": unknown capability");
        if (act.priority < 1 || act.priority > P) report(Defect::ActivityPriority, what + ": priority outside 1..P");
        if (act.demand < 1) report(Defect::ActivityDemand, what + ": demand must be >= 1");
        if (static_cast<int>(act.window.size()) != T)
            report(Defect::ActivityWindowLength, what + ": window length differs from T");
    }

    const auto& ps = inst.priorities;
    if (P < 1) report(Defect::PriorityLevels, "at least one priority level required");
    std::map<int, int> seen;
    for (std::size_t k = 0; k < ps.classes.size(); ++k) {
        if (ps.classes[k].empty()) report(Defect::EmptyClass, "priority class " + std::to_string(k + 1) + " is empty");
        for (int p : ps.classes[k]) seen[p] += 1;
    }
    bool disjoint = true;
    for (const auto& [p, n] : seen) disjoint = disjoint && n == 1;
    if (!disjoint) report(Defect::ClassesNotDisjoint, "classes not disjoint");
    bool complete = static_cast<int>(seen.size()) == P;
    for (const auto& [p, n] : seen) complete = complete && p >= 1 && p <= P;
    if (!complete) report(Defect::ClassesIncomplete, "classes do not partition priority levels 1..P");
    for (std::size_t k = 0; k + 1 < ps.classes.size(); ++k) {
        if (ps.classes[k].empty() || ps.classes[k + 1].empty()) continue;
        const int hi = *std::max_element(ps.classes[k].begin(), ps.classes[k].end());
        const int lo = *std::min_element(ps.classes[k + 1].begin(), ps.classes[k + 1].end());
        if (hi >= lo) report(Defect::ClassesUnordered, "classes must be ordered by priority level");
    }
    if (disjoint) {
        for (int p = 1; p < P; ++p) {
            if (!ps.same_class(p, p + 1)) continue;
            auto it = ps.sigma.find(p);
            if (it == ps.sigma.end())
                report(Defect::MissingSigma, "missing sigma for pair (" + std::to_string(p) + "," + std::to_string(p + 1) + ")");
            else if (sgn(it->second) <= 0)
                report(Defect::NonPositiveSigma, "sigma for pair (" + std::to_string(p) + "," + std::to_string(p + 1) + ") must be > 0");
        }
        for (const auto& [p, s] : ps.sigma)
            if (!ps.same_class(p, p + 1))
                report(Defect::StraySigma, "sigma given for pair (" + std::to_string(p) + "," + std::to_string(p + 1) +
                                               ") outside a single class");
    }

    const auto& k = inst.constants;
    if (k.min_run < 1) report(Defect::MinRunBelowOne, "tau_min must be >= 1");
    if (k.min_run > k.max_work) report(Defect::MinRunExceedsMaxWork, "tau_min exceeds tau_max");
    if (k.max_work > T) report(Defect::MaxWorkExceedsHorizon, "tau_max exceeds T");
    if (sgn(k.travel_speed_kmh) <= 0) report(Defect::NonPositiveSpeed, "travel speed must be positive");
    if (static_cast<int>(k.weights.size()) != T) {
        report(Defect::WeightsLength, "weights length differs from T");
    } else {
        bool ok = T == 0 || sgn(k.weights.back()) > 0;
        for (int t = 0; t + 1 < T; ++t) ok = ok && k.weights[static_cast<std::size_t>(t)] > k.weights[static_cast<std::size_t>(t + 1)];
        if (!ok) report(Defect::WeightsNotDecreasing, "weights must be strictly decreasing and positive");
    }

    bool runs_in_range = true;
    for (const auto& run : inst.prior_runs) {
        if (run.volunteer < 0 || run.volunteer >= V || run.activity < 0 || run.activity >= A || run.start < 0 ||
            run.end >= T || run.start > run.end) {
            runs_in_range = false;
            report(Defect::PriorRunOutOfRange, "prior run (volunteer " + std::to_string(run.volunteer + 1) +
                                                   ", activity " + std::to_string(run.activity + 1) + ") out of range");
        }
    }

    // Feasibility of the prior assignments only makes sense on a well-formed instance.
    if (out.empty() && runs_in_range) {
        const Assignment prior = Assignment::from_prior(inst);
        for (const auto& violation : check_feasibility(inst, prior))
            report(Defect::PriorAssignmentInfeasible, "prior assignments infeasible: " + violation.describe());
    }
    return out;
}

}  // namespace svcp
