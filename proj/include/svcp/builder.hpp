#pragma once

#include "svcp/domain.hpp"

#include <initializer_list>
#include <string>
#include <vector>

namespace svcp {

/// Fluent construction of small instances. Defaults: the three-level,
/// two-class priority structure with sigma_{1,2} = 1/3, 30-minute slots,
/// 10 km/h travel, time weights 1 - (t-1)/T.
class InstanceBuilder {
public:
    explicit InstanceBuilder(int num_slots, int num_capabilities = 1) {
        inst_.horizon.num_slots = num_slots;
        for (int c = 0; c < num_capabilities; ++c) inst_.capabilities.push_back({c + 1, "capability " + std::to_string(c + 1)});
        inst_.constants.min_run = std::min(4, num_slots);
        inst_.constants.max_work = std::min(16, num_slots);
        inst_.constants.weights = default_weights(num_slots);
    }

    InstanceBuilder& min_run(int slots) { inst_.constants.min_run = slots; return *this; }
    InstanceBuilder& max_work(int slots) { inst_.constants.max_work = slots; return *this; }
    InstanceBuilder& priorities(PriorityStructure ps) { inst_.priorities = std::move(ps); return *this; }

    /// Volunteer with the listed 0-based capabilities, available on [from, to] (whole horizon by default).
    InstanceBuilder& volunteer(std::initializer_list<int> caps, int travel = 0, int from = 0, int to = -1) {
        Volunteer vol;
        vol.id = inst_.num_volunteers() + 1;
        vol.capabilities.assign(static_cast<std::size_t>(inst_.num_capabilities()), false);
        for (int c : caps) vol.capabilities[static_cast<std::size_t>(c)] = true;
        vol.availability = span(from, to);
        vol.initial_travel = travel;
        inst_.volunteers.push_back(std::move(vol));
        return *this;
    }

    /// Activity needing 0-based capability `cap`, active on [from, to].
    InstanceBuilder& activity(int cap, int priority, int demand, int from = 0, int to = -1, Point where = {}) {
        TaskActivity act;
        act.id = inst_.num_activities() + 1;
        act.task_id = act.id;
        act.label = "activity " + std::to_string(act.id);
        act.capability = cap;
        act.priority = priority;
        act.demand = demand;
        act.window = span(from, to);
        act.location = std::move(where);
        inst_.activities.push_back(std::move(act));
        return *this;
    }

    InstanceBuilder& prior(int v, int a, int start, int end) {
        inst_.prior_runs.push_back({v, a, start, end});
        return *this;
    }

    Instance& get() { return inst_; }
    Instance build() const { return inst_; }

private:
    std::vector<bool> span(int from, int to) const {
        const int T = inst_.num_slots();
        if (to < 0) to = T - 1;
        std::vector<bool> out(static_cast<std::size_t>(T), false);
        for (int t = std::max(from, 0); t <= std::min(to, T - 1); ++t) out[static_cast<std::size_t>(t)] = true;
        return out;
    }

    Instance inst_;
};

}  // namespace svcp
