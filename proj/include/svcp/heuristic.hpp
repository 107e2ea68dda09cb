#pragma once

#include "svcp/feasibility.hpp"
#include "svcp/objectives.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace svcp {

struct ActivitySlot {
    int activity = 0;
    int slot = 0;
    friend bool operator==(const ActivitySlot&, const ActivitySlot&) = default;
};

// ---------------------------------------------------------------------------
// Preprocessing: scarcity order
// ---------------------------------------------------------------------------

struct ScarcityOrder {
    std::vector<int> volunteers;                 // volunteer indices, best first
    std::vector<std::optional<Rational>> score;  // s_v by volunteer index; nullopt = no compatible (a,t)
    std::vector<int> position;                   // rank of each volunteer in `volunteers`
};

/// s_v = min d_{a,t} over active (a,t) whose capability v offers; volunteers
/// sorted by nondecreasing s_v, ties by ascending id, incompatible ones last.
inline ScarcityOrder scarcity_sort(const Instance& inst) {
    const int V = inst.num_volunteers(), C = inst.num_capabilities(), T = inst.num_slots();
    const SupplyTable supply(inst);
    std::vector<std::optional<Rational>> per_capability(static_cast<std::size_t>(C));
    for (int a = 0; a < inst.num_activities(); ++a) {
        const auto& act = inst.activities[static_cast<std::size_t>(a)];
        auto& best = per_capability[static_cast<std::size_t>(act.capability)];
        for (int t = 0; t < T; ++t) {
            if (!act.window[static_cast<std::size_t>(t)]) continue;
            Rational d = supply_weight(inst, supply, a, t);
            if (!best || d < *best) best = std::move(d);
        }
    }
    ScarcityOrder order;
    order.score.resize(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) {
        const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
        auto& s = order.score[static_cast<std::size_t>(v)];
        for (int c = 0; c < C; ++c) {
            const auto& m = per_capability[static_cast<std::size_t>(c)];
            if (vol.has_capability(c) && m && (!s || *m < *s)) s = *m;
        }
    }
    order.volunteers.resize(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) order.volunteers[static_cast<std::size_t>(v)] = v;
    std::stable_sort(order.volunteers.begin(), order.volunteers.end(), [&](int l, int r) {
        const auto& sl = order.score[static_cast<std::size_t>(l)];
        const auto& sr = order.score[static_cast<std::size_t>(r)];
        if (!sl || !sr) return sl.has_value() && !sr.has_value();
        return *sl < *sr;
    });
    order.position.resize(static_cast<std::size_t>(V));
    for (int i = 0; i < V; ++i) order.position[static_cast<std::size_t>(order.volunteers[static_cast<std::size_t>(i)])] = i;
    return order;
}

// ---------------------------------------------------------------------------
// Active set
// ---------------------------------------------------------------------------

/// Activity-slot pairs with r_{a,t} = 1 and L_{a,t} < 1. Pairs only ever leave.
class ActiveSet {
public:
    ActiveSet(const Instance& inst, const Assignment& x)
        : activities_(inst.num_activities()),
          slots_(inst.num_slots()),
          classes_(inst.priorities.num_classes()),
          member_(static_cast<std::size_t>(activities_) * slots_, 0),
          class_of_(static_cast<std::size_t>(activities_), 0),
          class_size_(static_cast<std::size_t>(classes_) + 1, 0),
          class_slot_count_(static_cast<std::size_t>(classes_ + 1) * slots_, 0),
          earliest_(static_cast<std::size_t>(classes_) + 1, 0),
          class_activities_(static_cast<std::size_t>(classes_) + 1) {
        for (int a = 0; a < activities_; ++a) {
            const auto& act = inst.activities[static_cast<std::size_t>(a)];
            const int k = inst.priorities.class_of(act.priority);
            class_of_[static_cast<std::size_t>(a)] = k;
            if (k == 0) continue;
            class_activities_[static_cast<std::size_t>(k)].push_back(a);
            for (int t = 0; t < slots_; ++t)
                if (act.window[static_cast<std::size_t>(t)] && x.count(a, t) < act.demand) {
                    member_[idx(a, t)] = 1;
                    ++class_size_[static_cast<std::size_t>(k)];
                    ++class_slot_count_[static_cast<std::size_t>(k) * slots_ + t];
                    ++size_;
                }
        }
    }

    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }
    bool contains(int a, int t) const { return member_[idx(a, t)] != 0; }

    void remove(int a, int t) {
        auto& m = member_[idx(a, t)];
        if (!m) return;
        m = 0;
        const int k = class_of_[static_cast<std::size_t>(a)];
        --class_size_[static_cast<std::size_t>(k)];
        --class_slot_count_[static_cast<std::size_t>(k) * slots_ + t];
        --size_;
    }

    /// k*: the highest class index with a member; 0 when empty.
    int highest_class() const {
        for (int k = classes_; k >= 1; --k)
            if (class_size_[static_cast<std::size_t>(k)] > 0) return k;
        return 0;
    }

    /// t*: the earliest slot with a member of class k (class must be nonempty).
    int earliest_slot(int k) {
        auto& t = earliest_[static_cast<std::size_t>(k)];
        while (t < slots_ && class_slot_count_[static_cast<std::size_t>(k) * slots_ + t] == 0) ++t;
        return t;
    }

    const std::vector<int>& class_activities(int k) const { return class_activities_[static_cast<std::size_t>(k)]; }

    /// Members ordered by (activity, slot).
    std::vector<ActivitySlot> members() const {
        std::vector<ActivitySlot> out;
        for (int a = 0; a < activities_; ++a)
            for (int t = 0; t < slots_; ++t)
                if (contains(a, t)) out.push_back({a, t});
        return out;
    }

private:
    std::size_t idx(int a, int t) const { return static_cast<std::size_t>(a) * slots_ + t; }

    int activities_;
    int slots_;
    int classes_;
    std::size_t size_ = 0;
    std::vector<char> member_;
    std::vector<int> class_of_;
    std::vector<std::size_t> class_size_;
    std::vector<int> class_slot_count_;
    std::vector<int> earliest_;
    std::vector<std::vector<int>> class_activities_;
};

// ---------------------------------------------------------------------------
// Selection rules
// ---------------------------------------------------------------------------

/// Members whose priority lies in the highest class present.
inline std::vector<ActivitySlot> select_highest_priority_subset(const Instance& inst,
                                                                const std::vector<ActivitySlot>& active) {
    if (active.empty()) throw InputError("highest priority subset of an empty active set");
    const auto& ps = inst.priorities;
    auto class_of = [&](const ActivitySlot& m) {
        return ps.class_of(inst.activities[static_cast<std::size_t>(m.activity)].priority);
    };
    int best = 0;
    for (const auto& m : active) best = std::max(best, class_of(m));
    std::vector<ActivitySlot> out;
    for (const auto& m : active)
        if (class_of(m) == best) out.push_back(m);
    return out;
}

/// Earliest slot, then minimal sigma_{p_a,p_a+1} L_{a,t*}, then smallest activity index.
inline ActivitySlot select_best_combination(const Instance& inst, const Assignment& x,
                                            const std::vector<ActivitySlot>& subset) {
    if (subset.empty()) throw InputError("best combination of an empty subset");
    int t_star = std::numeric_limits<int>::max();
    for (const auto& m : subset) t_star = std::min(t_star, m.slot);
    std::optional<ActivitySlot> best;
    Rational best_value;
    for (const auto& m : subset) {
        if (m.slot != t_star) continue;
        const auto& act = inst.activities[static_cast<std::size_t>(m.activity)];
        Rational value = inst.priorities.activity_weight(act.priority) * workload(inst, x, m.activity, t_star);
        if (!best || value < best_value || (value == best_value && m.activity < best->activity)) {
            best = m;
            best_value = std::move(value);
        }
    }
    return *best;
}

// ---------------------------------------------------------------------------
// Volunteer feasibility
// ---------------------------------------------------------------------------

struct Interval {
    int start = 0;
    int end = 0;
    int length() const { return end - start + 1; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Candidate {
    int volunteer = 0;
    int start = 0;
    int end = 0;
    friend bool operator==(const Candidate&, const Candidate&) = default;
};

namespace detail {

/// Runs of one volunteer sorted by start.
inline std::vector<Run> volunteer_runs(const Assignment& x, int v) {
    std::vector<Run> out;
    const int A = x.num_activities(), T = x.num_slots();
    for (int a = 0; a < A; ++a) {
        int t = 0;
        while (t < T) {
            if (!x.at(v, a, t)) { ++t; continue; }
            int s = t;
            while (t + 1 < T && x.at(v, a, t + 1)) ++t;
            out.push_back(Run{v, a, s, t});
            ++t;
        }
    }
    std::sort(out.begin(), out.end(), [](const Run& l, const Run& r) { return l.start < r.start; });
    return out;
}

/// Slot range a new run of v on activity a around seed slot t may occupy
/// given v's other runs: the initial-travel floor when no run precedes it,
/// travel gaps to the neighbouring runs otherwise. nullopt when t is busy.
template <class TravelFn>
std::optional<Interval> travel_bounds(const Volunteer& vol, const std::vector<Run>& runs, int a, int t, int num_slots,
                                      TravelFn&& travel) {
    const Run* prev = nullptr;
    const Run* next = nullptr;
    for (const auto& run : runs) {
        if (run.start <= t && t <= run.end) return std::nullopt;
        if (run.end < t && (!prev || run.end > prev->end)) prev = &run;
        if (run.start > t && (!next || run.start < next->start)) next = &run;
    }
    Interval b;
    b.start = prev ? prev->end + 1 + travel(prev->activity, a) : vol.travel_to(a);
    b.end = next ? next->start - 1 - travel(a, next->activity) : num_slots - 1;
    return b;
}

}  // namespace detail

/// Grows [t_s, t_e] from seed t: backward first, then forward, one slot at a
/// time while the slot is available, inside the activity window, below full
/// workload, free for v, travel-compatible with v's other runs and within
/// v's remaining working time. nullopt if t fails or the result is shorter
/// than tau_min.
inline std::optional<Interval> maximal_feasible_interval(const Instance& inst, const Assignment& x,
                                                         const TravelTable& travel, int v, int a, int t) {
    const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
    const auto& act = inst.activities[static_cast<std::size_t>(a)];
    const int remaining = inst.constants.max_work - vol.worked_offset - x.worked(v);
    if (remaining <= 0) return std::nullopt;
    const auto runs = detail::volunteer_runs(x, v);
    const auto bounds = detail::travel_bounds(vol, runs, a, t, inst.num_slots(), travel);
    if (!bounds) return std::nullopt;
    auto slot_ok = [&](int s) {
        return s >= bounds->start && s <= bounds->end && vol.availability[static_cast<std::size_t>(s)] &&
               act.window[static_cast<std::size_t>(s)] && x.count(a, s) < act.demand && x.occupancy(v, s) == 0;
    };
    if (!slot_ok(t)) return std::nullopt;
    Interval iv{t, t};
    while (iv.length() < remaining && slot_ok(iv.start - 1)) --iv.start;
    while (iv.length() < remaining && iv.end + 1 < inst.num_slots() && slot_ok(iv.end + 1)) ++iv.end;
    if (iv.length() < inst.constants.min_run) return std::nullopt;
    return iv;
}

inline std::optional<Interval> maximal_feasible_interval(const Instance& inst, const Assignment& x, int v, int a, int t) {
    return maximal_feasible_interval(inst, x, TravelTable(inst), v, a, t);
}

/// Candidates for (a,t) in scarcity order; volunteers at their working-time
/// cap or lacking a's capability are skipped.
inline std::vector<Candidate> feasible_candidates(const Instance& inst, const Assignment& x, const TravelTable& travel,
                                                  const ScarcityOrder& order, int a, int t) {
    std::vector<Candidate> out;
    const int capability = inst.activities[static_cast<std::size_t>(a)].capability;
    for (int v : order.volunteers) {
        const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
        if (vol.worked_offset + x.worked(v) >= inst.constants.max_work) continue;
        if (!vol.has_capability(capability)) continue;
        if (auto iv = maximal_feasible_interval(inst, x, travel, v, a, t)) out.push_back({v, iv->start, iv->end});
    }
    return out;
}

inline std::vector<Candidate> feasible_candidates(const Instance& inst, const Assignment& x, const ScarcityOrder& order,
                                                  int a, int t) {
    return feasible_candidates(inst, x, TravelTable(inst), order, a, t);
}

/// Earliest start wins; ties keep the first candidate in scarcity order.
inline std::optional<Candidate> earliest_start(const std::vector<Candidate>& candidates) {
    std::optional<Candidate> best;
    for (const auto& c : candidates)
        if (!best || c.start < best->start) best = c;
    return best;
}

// ---------------------------------------------------------------------------
// Main constructive loop
// ---------------------------------------------------------------------------

struct TraceStep {
    long iteration = 0;
    int priority_class = 0;  // k*, 1-based
    int activity = 0;        // a*
    int slot = 0;            // t*
    bool assigned = false;
    Candidate chosen;        // meaningful when assigned
    long evaluations = 0;    // cumulative
};

struct SolveOptions {
    bool record_trace = false;
    /// Called after every iteration with the updated assignment.
    std::function<void(const TraceStep&, const Assignment&)> on_step;
};

struct SolveResult {
    Assignment assignment;
    std::vector<TraceStep> trace;
    long iterations = 0;
    long evaluations = 0;  // volunteer feasibility evaluations
};

/// |A| |T| |V|: the bound on volunteer feasibility evaluations of one solve.
inline std::int64_t step_count_bound(const Instance& inst) {
    return static_cast<std::int64_t>(inst.num_activities()) * inst.num_slots() * inst.num_volunteers();
}

namespace detail {

inline std::string first_defect(const Instance& inst) {
    const auto defects = validate_instance(inst);
    return defects.empty() ? std::string{} : defects.front().message;
}

/// Small exact fraction for the hot selection comparisons.
struct SmallRatio {
    std::int64_t num = 1;
    std::int64_t den = 1;
};

inline SmallRatio small_ratio(const Rational& r) {
    if (!r.get_num().fits_slong_p() || !r.get_den().fits_slong_p())
        throw InputError("balancing factor does not fit 64-bit integers");
    return {r.get_num().get_si(), r.get_den().get_si()};
}

}  // namespace detail

/// Priority-driven constructive heuristic. Each (a*,t*) pair caches, in
/// scarcity order, the volunteers that pass the per-volunteer guards together
/// with their own feasible slot range; every later assignment covers t*, so
/// only the assigned volunteer's entry goes stale and is skipped as busy.
/// Each volunteer is therefore evaluated at most once per pair.
inline SolveResult solve(const Instance& inst, const SolveOptions& options = {}) {
    if (auto defect = detail::first_defect(inst); !defect.empty()) throw InputError("invalid instance: " + defect);

    const int V = inst.num_volunteers(), A = inst.num_activities(), T = inst.num_slots();
    const auto& k = inst.constants;
    const ScarcityOrder order = scarcity_sort(inst);
    const TravelTable travel(inst);

    SolveResult result{Assignment::from_prior(inst), {}, 0, 0};
    Assignment& x = result.assignment;
    ActiveSet active(inst, x);

    std::vector<std::vector<Run>> runs(static_cast<std::size_t>(V));
    for (int v = 0; v < V; ++v) runs[static_cast<std::size_t>(v)] = detail::volunteer_runs(x, v);

    std::vector<detail::SmallRatio> weight(static_cast<std::size_t>(A));
    for (int a = 0; a < A; ++a)
        weight[static_cast<std::size_t>(a)] =
            detail::small_ratio(inst.priorities.activity_weight(inst.activities[static_cast<std::size_t>(a)].priority));

    struct Cached {
        int volunteer;
        int lo;
        int hi;
    };
    std::vector<std::vector<Cached>> cache(static_cast<std::size_t>(A));
    std::vector<int> cache_slot(static_cast<std::size_t>(A), -1);

    auto drop_pair = [&](int a, int t) {
        active.remove(a, t);
        if (cache_slot[static_cast<std::size_t>(a)] == t) {
            cache_slot[static_cast<std::size_t>(a)] = -1;
            cache[static_cast<std::size_t>(a)].clear();
            cache[static_cast<std::size_t>(a)].shrink_to_fit();
        }
    };

    auto build_cache = [&](int a, int t) {
        auto& entries = cache[static_cast<std::size_t>(a)];
        entries.clear();
        cache_slot[static_cast<std::size_t>(a)] = t;
        const int capability = inst.activities[static_cast<std::size_t>(a)].capability;
        for (int v : order.volunteers) {
            ++result.evaluations;
            const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
            if (vol.worked_offset + x.worked(v) >= k.max_work) continue;
            if (!vol.has_capability(capability)) continue;
            if (!vol.availability[static_cast<std::size_t>(t)]) continue;
            const auto bounds = detail::travel_bounds(vol, runs[static_cast<std::size_t>(v)], a, t, T, travel);
            if (!bounds || t < bounds->start || t > bounds->end) continue;
            int lo = t, hi = t;
            while (lo - 1 >= bounds->start && vol.availability[static_cast<std::size_t>(lo - 1)]) --lo;
            while (hi + 1 <= bounds->end && vol.availability[static_cast<std::size_t>(hi + 1)]) ++hi;
            entries.push_back({v, lo, hi});
        }
    };

    while (!active.empty()) {
        const int k_star = active.highest_class();
        const int t_star = active.earliest_slot(k_star);
        int a_star = -1;
        for (int a : active.class_activities(k_star)) {
            if (!active.contains(a, t_star)) continue;
            if (a_star < 0) { a_star = a; continue; }
            // sigma_a c_a / n_a < sigma_b c_b / n_b, cross-multiplied
            const auto& wa = weight[static_cast<std::size_t>(a)];
            const auto& wb = weight[static_cast<std::size_t>(a_star)];
            const __int128 lhs = static_cast<__int128>(wa.num) * x.count(a, t_star) * wb.den *
                                 inst.activities[static_cast<std::size_t>(a_star)].demand;
            const __int128 rhs = static_cast<__int128>(wb.num) * x.count(a_star, t_star) * wa.den *
                                 inst.activities[static_cast<std::size_t>(a)].demand;
            if (lhs < rhs) a_star = a;
        }
        ++result.iterations;

        if (cache_slot[static_cast<std::size_t>(a_star)] != t_star) build_cache(a_star, t_star);

        const auto& act = inst.activities[static_cast<std::size_t>(a_star)];
        int shared_lo = t_star, shared_hi = t_star;
        auto open = [&](int s) { return act.window[static_cast<std::size_t>(s)] && x.count(a_star, s) < act.demand; };
        while (shared_lo - 1 >= 0 && open(shared_lo - 1)) --shared_lo;
        while (shared_hi + 1 < T && open(shared_hi + 1)) ++shared_hi;

        std::optional<Candidate> best;
        for (const auto& c : cache[static_cast<std::size_t>(a_star)]) {
            if (x.occupancy(c.volunteer, t_star) != 0) continue;
            const int remaining =
                k.max_work - inst.volunteers[static_cast<std::size_t>(c.volunteer)].worked_offset - x.worked(c.volunteer);
            if (remaining < k.min_run) continue;
            const int start = std::max({c.lo, shared_lo, t_star - remaining + 1});
            const int end = std::min({c.hi, shared_hi, start + remaining - 1});
            if (end - start + 1 < k.min_run) continue;
            if (!best || start < best->start) best = Candidate{c.volunteer, start, end};
        }

        TraceStep step{result.iterations, k_star, a_star, t_star, best.has_value(), best.value_or(Candidate{-1, -1, -1}), 0};
        if (best) {
            Run run{best->volunteer, a_star, best->start, best->end};
            x.assign_run(run);
            auto& vr = runs[static_cast<std::size_t>(best->volunteer)];
            vr.push_back(run);
            std::sort(vr.begin(), vr.end(), [](const Run& l, const Run& r) { return l.start < r.start; });
            // merge with adjacent runs on the same activity
            std::vector<Run> merged;
            for (const auto& r : vr) {
                if (!merged.empty() && merged.back().activity == r.activity && merged.back().end + 1 == r.start)
                    merged.back().end = r.end;
                else
                    merged.push_back(r);
            }
            vr = std::move(merged);
            for (int s = best->start; s <= best->end; ++s)
                if (x.count(a_star, s) >= act.demand) drop_pair(a_star, s);
        } else {
            drop_pair(a_star, t_star);
        }
        step.evaluations = result.evaluations;
        if (options.record_trace) result.trace.push_back(step);
        if (options.on_step) options.on_step(step, x);
    }
    return result;
}

}  // namespace svcp
