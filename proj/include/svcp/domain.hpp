#pragma once

#include "svcp/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Indexing convention: ids in documents are 1-based and contiguous; in memory
// every volunteer, activity, capability and slot is addressed by its 0-based
// index (id - 1). Priority levels and class indices stay 1-based.
namespace svcp {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct Horizon {
    int num_slots = 48;
    int slot_minutes = 30;
    friend bool operator==(const Horizon&, const Horizon&) = default;
};

struct Capability {
    int id = 0;
    std::string label;
    friend bool operator==(const Capability&, const Capability&) = default;
};

struct Point {
    Rational x;
    Rational y;
    friend bool operator==(const Point&, const Point&) = default;
};

/// A run already worked contiguously before slot 0 of this instance.
struct ContinuingRun {
    int activity = -1;
    int slots = 0;
    friend bool operator==(const ContinuingRun&, const ContinuingRun&) = default;
};

struct Volunteer {
    int id = 0;
    std::vector<bool> capabilities;  // size C
    std::vector<bool> availability;  // size T
    int initial_travel = 2;
    std::map<int, int> travel_overrides;  // activity index -> slots
    int worked_offset = 0;                // slots consumed in earlier instances
    ContinuingRun continuing;

    int travel_to(int activity) const {
        auto it = travel_overrides.find(activity);
        return it == travel_overrides.end() ? initial_travel : it->second;
    }
    bool has_capability(int c) const {
        return c >= 0 && c < static_cast<int>(capabilities.size()) && capabilities[c];
    }
    friend bool operator==(const Volunteer&, const Volunteer&) = default;
};

struct TaskActivity {
    int id = 0;
    int task_id = 0;
    std::string label;
    int capability = 0;  // 0-based capability index
    int priority = 1;    // 1..P
    int demand = 1;
    std::vector<bool> window;  // r_{a,t}, size T
    Point location;
    friend bool operator==(const TaskActivity&, const TaskActivity&) = default;
};

struct PriorityStructure {
    int levels = 3;
    std::vector<std::vector<int>> classes{{1, 2}, {3}};
    std::map<int, Rational> sigma{{1, make_rational(1, 3)}};  // p -> sigma_{p,p+1}

    int num_classes() const { return static_cast<int>(classes.size()); }

    /// 1-based class containing level p, 0 when none.
    int class_of(int p) const {
        for (std::size_t k = 0; k < classes.size(); ++k)
            if (std::find(classes[k].begin(), classes[k].end(), p) != classes[k].end())
                return static_cast<int>(k) + 1;
        return 0;
    }
    bool alpha(int k) const { return classes.at(static_cast<std::size_t>(k - 1)).size() > 1; }
    bool same_class(int p, int q) const {
        int k = class_of(p);
        return k != 0 && k == class_of(q);
    }
    /// sigma_{p,p+1} when p+1 shares p's class, otherwise 1.
    Rational activity_weight(int p) const {
        if (!same_class(p, p + 1)) return Rational{1};
        auto it = sigma.find(p);
        return it == sigma.end() ? Rational{1} : it->second;
    }
    friend bool operator==(const PriorityStructure&, const PriorityStructure&) = default;
};

struct Constants {
    int min_run = 4;    // tau_min
    int max_work = 16;  // tau-bar_max
    Rational travel_speed_kmh{10};
    std::vector<Rational> weights;  // w_t, size T
    friend bool operator==(const Constants&, const Constants&) = default;
};

/// w_t = 1 - (t-1)/T for 1-based t.
inline std::vector<Rational> default_weights(int num_slots) {
    std::vector<Rational> w;
    w.reserve(static_cast<std::size_t>(num_slots));
    for (int t = 0; t < num_slots; ++t) w.push_back(make_rational(num_slots - t, num_slots));
    return w;
}

/// Contiguous block [start, end] (inclusive, 0-based) of one volunteer on one activity.
struct Run {
    int volunteer = 0;
    int activity = 0;
    int start = 0;
    int end = 0;

    int length() const { return end - start + 1; }
    friend bool operator==(const Run&, const Run&) = default;
};

struct InstanceMeta {
    std::string label;
    int index = 0;           // position within a rolling horizon, 0-based
    int absolute_start = 0;  // absolute slot of local slot 0
    friend bool operator==(const InstanceMeta&, const InstanceMeta&) = default;
};

struct Instance {
    Horizon horizon;
    Constants constants;
    PriorityStructure priorities;
    std::vector<Capability> capabilities;
    std::vector<Volunteer> volunteers;
    std::vector<TaskActivity> activities;
    std::vector<Run> prior_runs;
    InstanceMeta meta;

    int num_slots() const { return horizon.num_slots; }
    int num_volunteers() const { return static_cast<int>(volunteers.size()); }
    int num_activities() const { return static_cast<int>(activities.size()); }
    int num_capabilities() const { return static_cast<int>(capabilities.size()); }
    friend bool operator==(const Instance&, const Instance&) = default;
};

/// Binary decision tensor x_{v,a,t} with incrementally maintained caches:
/// per-(a,t) assigned counts, per-(p,t) priority counts, per-volunteer worked
/// slots and per-(v,t) occupancy.
class Assignment {
public:
    Assignment() = default;

    explicit Assignment(const Instance& inst)
        : volunteers_(inst.num_volunteers()),
          activities_(inst.num_activities()),
          slots_(inst.num_slots()),
          levels_(inst.priorities.levels),
          x_(static_cast<std::size_t>(volunteers_) * activities_ * slots_, 0),
          counts_(static_cast<std::size_t>(activities_) * slots_, 0),
          priority_counts_(static_cast<std::size_t>(std::max(levels_, 0)) * slots_, 0),
          worked_(static_cast<std::size_t>(volunteers_), 0),
          occupancy_(static_cast<std::size_t>(volunteers_) * slots_, 0) {
        priority_of_.reserve(inst.activities.size());
        for (const auto& a : inst.activities) priority_of_.push_back(a.priority);
    }

    /// x = o, the prior assignments of the instance.
    static Assignment from_prior(const Instance& inst) {
        Assignment x(inst);
        for (const auto& run : inst.prior_runs) x.assign_run(run);
        return x;
    }

    int num_volunteers() const { return volunteers_; }
    int num_activities() const { return activities_; }
    int num_slots() const { return slots_; }

    bool at(int v, int a, int t) const { return x_[index(v, a, t)] != 0; }

    void set(int v, int a, int t, bool value = true) {
        auto& cell = x_[index(v, a, t)];
        if ((cell != 0) == value) return;
        const int delta = value ? 1 : -1;
        cell = value ? 1 : 0;
        counts_[static_cast<std::size_t>(a) * slots_ + t] += delta;
        const int p = priority_of_[static_cast<std::size_t>(a)];
        if (p >= 1 && p <= levels_) priority_counts_[static_cast<std::size_t>(p - 1) * slots_ + t] += delta;
        worked_[static_cast<std::size_t>(v)] += delta;
        occupancy_[static_cast<std::size_t>(v) * slots_ + t] += delta;
    }

    void assign_run(const Run& run) {
        for (int t = run.start; t <= run.end; ++t) set(run.volunteer, run.activity, t);
    }

    int count(int a, int t) const { return counts_[static_cast<std::size_t>(a) * slots_ + t]; }
    int priority_count(int p, int t) const {
        return priority_counts_[static_cast<std::size_t>(p - 1) * slots_ + t];
    }
    /// Sum over (a,t) of x_{v,a,t}.
    int worked(int v) const { return worked_[static_cast<std::size_t>(v)]; }
    int occupancy(int v, int t) const { return occupancy_[static_cast<std::size_t>(v) * slots_ + t]; }

    /// True when every cache equals its from-scratch recomputation.
    bool caches_consistent() const {
        Assignment fresh;
        fresh.volunteers_ = volunteers_;
        fresh.activities_ = activities_;
        fresh.slots_ = slots_;
        fresh.levels_ = levels_;
        fresh.priority_of_ = priority_of_;
        fresh.x_.assign(x_.size(), 0);
        fresh.counts_.assign(counts_.size(), 0);
        fresh.priority_counts_.assign(priority_counts_.size(), 0);
        fresh.worked_.assign(worked_.size(), 0);
        fresh.occupancy_.assign(occupancy_.size(), 0);
        for (int v = 0; v < volunteers_; ++v)
            for (int a = 0; a < activities_; ++a)
                for (int t = 0; t < slots_; ++t)
                    if (at(v, a, t)) fresh.set(v, a, t);
        return fresh.counts_ == counts_ && fresh.priority_counts_ == priority_counts_ &&
               fresh.worked_ == worked_ && fresh.occupancy_ == occupancy_;
    }

    /// Maximal contiguous runs, ordered by (volunteer, activity, start).
    std::vector<Run> runs() const {
        std::vector<Run> out;
        for (int v = 0; v < volunteers_; ++v)
            for (int a = 0; a < activities_; ++a) {
                int t = 0;
                while (t < slots_) {
                    if (!at(v, a, t)) { ++t; continue; }
                    int s = t;
                    while (t + 1 < slots_ && at(v, a, t + 1)) ++t;
                    out.push_back(Run{v, a, s, t});
                    ++t;
                }
            }
        return out;
    }

    friend bool operator==(const Assignment& l, const Assignment& r) {
        return l.volunteers_ == r.volunteers_ && l.activities_ == r.activities_ && l.slots_ == r.slots_ &&
               l.x_ == r.x_;
    }

private:
    std::size_t index(int v, int a, int t) const {
        return (static_cast<std::size_t>(v) * activities_ + a) * slots_ + t;
    }

    int volunteers_ = 0;
    int activities_ = 0;
    int slots_ = 0;
    int levels_ = 0;
    std::vector<int> priority_of_;
    std::vector<std::uint8_t> x_;
    std::vector<int> counts_;
    std::vector<int> priority_counts_;
    std::vector<int> worked_;
    std::vector<int> occupancy_;
};

}  // namespace svcp
