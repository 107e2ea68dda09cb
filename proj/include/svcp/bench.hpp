#pragma once

#include "svcp/heuristic.hpp"
#include "svcp/oracle.hpp"
#include "svcp/random_instance.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <random>
#include <vector>

namespace svcp {

/// Scaling-sweep instance: V volunteers, A activities, T slots, six
/// capabilities. Each activity demands about V/A volunteers, so supply and
/// demand stay in proportion as V grows.
inline Instance bench_instance(int V, int A, int T, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    constexpr int C = 6;
    InstanceBuilder b(T, C);
    b.min_run(std::min(4, T)).max_work(std::min(16, T));
    const int min_run = b.get().constants.min_run;

    for (int v = 0; v < V; ++v) {
        Volunteer vol;
        vol.id = v + 1;
        vol.capabilities.assign(C, false);
        vol.capabilities[static_cast<std::size_t>(uniform(0, C - 1))] = true;
        for (int c = 0; c < C; ++c)
            if (uniform(0, 9) < 3) vol.capabilities[static_cast<std::size_t>(c)] = true;
        const int from = uniform(0, T - min_run);
        const int to = uniform(from + min_run - 1, T - 1);
        vol.availability.assign(static_cast<std::size_t>(T), false);
        for (int t = from; t <= to; ++t) vol.availability[static_cast<std::size_t>(t)] = true;
        vol.initial_travel = 2;
        b.get().volunteers.push_back(std::move(vol));
    }
    const int per_activity = std::max(1, V / std::max(A, 1));
    const int demand_lo = std::max(1, per_activity / 2), demand_hi = std::max(1, per_activity * 3 / 2);
    for (int a = 0; a < A; ++a) {
        const int from = uniform(0, T / 2);
        const int to = uniform(std::min(T - 1, from + min_run - 1), T - 1);
        b.activity(uniform(0, C - 1), uniform(1, 3), uniform(demand_lo, demand_hi), from, to,
                   {make_rational(uniform(0, 1000), 100), make_rational(uniform(0, 1000), 100)});
    }
    return b.build();
}

struct BenchSample {
    int volunteers = 0;
    int activities = 0;
    int slots = 0;
    int repeat = 0;  // 0-based
    long wall_us = 0;
    long evaluations = 0;
    std::int64_t bound = 0;  // |A| |T| |V|
};

/// Heuristic runs over every V in `volunteer_counts`; each repeat uses a
/// fresh instance seed. Wall time covers the solver's setup, validation and main loop.
inline std::vector<BenchSample> run_sweep(const std::vector<int>& volunteer_counts, int A, int T, int repeats,
                                          std::uint64_t seed) {
    std::vector<BenchSample> out;
    for (int r = 0; r < repeats; ++r)
        for (int V : volunteer_counts) {
            const std::uint64_t s = seed * 1'000'003ULL + static_cast<std::uint64_t>(r) * 7919ULL + static_cast<std::uint64_t>(V);
            const Instance inst = bench_instance(V, A, T, s);
            const auto t0 = std::chrono::steady_clock::now();
            const SolveResult res = solve(inst);
            const auto t1 = std::chrono::steady_clock::now();
            out.push_back({V, A, T, r, static_cast<long>(std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count()),
                           res.evaluations, step_count_bound(inst)});
        }
    return out;
}

template <class T>
T median_of(std::vector<T> values) {
    if (values.empty()) return T{};
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

/// Median over repeats of evaluations(V_{i+1}) / evaluations(V_i), one per consecutive pair.
inline std::vector<double> doubling_ratios(const std::vector<BenchSample>& samples, const std::vector<int>& volunteer_counts) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < volunteer_counts.size(); ++i) {
        std::vector<double> ratios;
        for (const auto& lo : samples) {
            if (lo.volunteers != volunteer_counts[i]) continue;
            for (const auto& hi : samples)
                if (hi.volunteers == volunteer_counts[i + 1] && hi.repeat == lo.repeat && lo.evaluations > 0)
                    ratios.push_back(static_cast<double>(hi.evaluations) / static_cast<double>(lo.evaluations));
        }
        out.push_back(median_of(ratios));
    }
    return out;
}

struct OracleComparison {
    std::uint64_t seed = 0;
    long heuristic_us = 0;
    long oracle_us = 0;
    long oracle_states = 0;
};

/// Micro instances small enough for the exact oracle, timed with both solvers.
inline std::vector<OracleComparison> run_oracle_comparison(int count, std::uint64_t seed) {
    RandomInstanceParams p;
    p.max_volunteers = 3;
    p.max_activities = 3;
    p.max_slots = 8;
    p.max_demand = 2;
    std::vector<OracleComparison> out;
    for (int i = 0; i < count; ++i) {
        const std::uint64_t s = seed * 1'000'003ULL + static_cast<std::uint64_t>(i);
        const Instance inst = random_instance(p, s);
        const auto t0 = std::chrono::steady_clock::now();
        solve(inst);
        const auto t1 = std::chrono::steady_clock::now();
        const auto exact = solve_exact(inst);
        const auto t2 = std::chrono::steady_clock::now();
        using us = std::chrono::microseconds;
        out.push_back({s, static_cast<long>(std::chrono::duration_cast<us>(t1 - t0).count()),
                       static_cast<long>(std::chrono::duration_cast<us>(t2 - t1).count()), static_cast<long>(exact.states)});
    }
    return out;
}

}  // namespace svcp
