#pragma once

// Test-only brute force over assignment tensors, filtered by
// check_feasibility. Each (volunteer, slot) cell ranges over idle plus the
// activities that cell could legally hold under capability, availability
// and window; every other tensor already fails C1-C3 or C5. Independent of
// the run-based search in the oracle.

#include "svcp/feasibility.hpp"
#include "svcp/objectives.hpp"

#include <optional>
#include <stdexcept>

namespace svcp::testing {

struct RawOptimum {
    ObjectiveVector objective;
    Assignment assignment;
    long feasible = 0;
};

inline std::optional<RawOptimum> raw_enumerate(const Instance& inst, long max_tensors = 2'000'000) {
    const int V = inst.num_volunteers(), A = inst.num_activities(), T = inst.num_slots();
    const int cells = V * T;
    std::vector<std::vector<int>> domain(static_cast<std::size_t>(cells));
    long total = 1;
    for (int i = 0; i < cells; ++i) {
        const int v = i / T, t = i % T;
        auto& d = domain[static_cast<std::size_t>(i)];
        d.push_back(-1);
        const auto& vol = inst.volunteers[static_cast<std::size_t>(v)];
        for (int a = 0; a < A; ++a) {
            const auto& act = inst.activities[static_cast<std::size_t>(a)];
            if (vol.has_capability(act.capability) && vol.availability[static_cast<std::size_t>(t)] &&
                act.window[static_cast<std::size_t>(t)])
                d.push_back(a);
        }
        total *= static_cast<long>(d.size());
        if (total > max_tensors) throw std::length_error("raw enumeration too large");
    }

    const TravelTable travel(inst);
    const SupplyTable supply(inst);
    std::vector<std::size_t> digit(static_cast<std::size_t>(cells), 0);
    Assignment x(inst);
    std::optional<RawOptimum> best;
    long feasible = 0;
    for (long n = 0; n < total; ++n) {
        if (check_feasibility(inst, x, travel).empty()) {
            ++feasible;
            ObjectiveVector ov = objective_from_counts(inst, supply, count_table(inst, x));
            if (!best || lex_compare(ov, best->objective) == LexOrder::Better) best = RawOptimum{std::move(ov), x, 0};
        }
        for (int i = 0; i < cells; ++i) {
            auto& d = digit[static_cast<std::size_t>(i)];
            const auto& dom = domain[static_cast<std::size_t>(i)];
            const int v = i / T, t = i % T;
            if (dom[d] >= 0) x.set(v, dom[d], t, false);
            d = (d + 1) % dom.size();
            if (dom[d] >= 0) x.set(v, dom[d], t, true);
            if (d != 0) break;
        }
    }
    if (best) best->feasible = feasible;
    return best;
}

}  // namespace svcp::testing
