#pragma once

#include "svcp/builder.hpp"
#include "svcp/feasibility.hpp"

#include <cstdint>
#include <random>

namespace svcp {

struct RandomInstanceParams {
    int min_volunteers = 1;
    int max_volunteers = 6;
    int min_activities = 1;
    int max_activities = 4;
    int min_slots = 6;
    int max_slots = 12;
    int num_capabilities = 3;
    int max_demand = 3;
    double capability_probability = 0.6;
    int max_initial_travel = 2;
    int box_half_km = 6;        // coordinates on a 0.5 km grid in [0, 2*box_half_km/2]
    int prior_run_attempts = 3;  // random prior runs kept only when the instance stays valid
    bool vary_priorities = true;
};

/// Seeded random instance that always passes validate_instance.
inline Instance random_instance(const RandomInstanceParams& params, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

    const int T = uniform(params.min_slots, params.max_slots);
    const int C = params.num_capabilities;
    InstanceBuilder b(T, C);

    if (params.vary_priorities) {
        PriorityStructure ps;
        switch (uniform(0, 3)) {
            case 0: break;  // {1,2},{3}, sigma_{1,2} = 1/3
            case 1:
                ps.classes = {{1}, {2, 3}};
                ps.sigma = {{2, make_rational(uniform(1, 4), uniform(1, 4))}};
                break;
            case 2:
                ps.classes = {{1, 2, 3}};
                ps.sigma = {{1, make_rational(1, 3)}, {2, make_rational(uniform(1, 3), 2)}};
                break;
            default:
                ps.levels = 2;
                ps.classes = {{1}, {2}};
                ps.sigma = {};
                break;
        }
        b.priorities(ps);
    }
    const int P = b.get().priorities.levels;

    const int min_run = uniform(1, std::min(4, T));
    b.min_run(min_run).max_work(uniform(min_run, T));

    const int V = uniform(params.min_volunteers, params.max_volunteers);
    for (int v = 0; v < V; ++v) {
        Volunteer vol;
        vol.id = v + 1;
        vol.capabilities.assign(static_cast<std::size_t>(C), false);
        for (int c = 0; c < C; ++c) vol.capabilities[static_cast<std::size_t>(c)] = chance(params.capability_probability);
        vol.availability.assign(static_cast<std::size_t>(T), false);
        int from = 0, to = T - 1;
        if (chance(0.5)) {
            from = uniform(0, T - 1);
            to = uniform(from, T - 1);
        }
        for (int t = from; t <= to; ++t) vol.availability[static_cast<std::size_t>(t)] = true;
        vol.initial_travel = uniform(0, params.max_initial_travel);
        b.get().volunteers.push_back(std::move(vol));
    }

    const int A = uniform(params.min_activities, params.max_activities);
    for (int a = 0; a < A; ++a) {
        int from = 0, to = T - 1;
        if (chance(0.5)) {
            from = uniform(0, T - 1);
            to = uniform(from, T - 1);
        }
        Point where{make_rational(uniform(0, 2 * params.box_half_km), 2), make_rational(uniform(0, 2 * params.box_half_km), 2)};
        b.activity(uniform(0, C - 1), uniform(1, P), uniform(1, params.max_demand), from, to, where);
    }

    Instance inst = b.build();
    for (int i = 0; i < params.prior_run_attempts && V > 0 && A > 0; ++i) {
        const int v = uniform(0, V - 1);
        const int a = uniform(0, A - 1);
        const int len = uniform(inst.constants.min_run, inst.constants.max_work);
        if (len > T) continue;
        const int start = uniform(0, T - len);
        inst.prior_runs.push_back({v, a, start, start + len - 1});
        if (!validate_instance(inst).empty()) inst.prior_runs.pop_back();
    }
    return inst;
}

}  // namespace svcp
