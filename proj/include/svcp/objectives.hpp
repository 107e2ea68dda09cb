#pragma once

#include "svcp/domain.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace svcp {

/// L_{a,t} from the assignment's incremental count cache.
inline Rational workload(const Instance& inst, const Assignment& x, int a, int t) {
    return make_rational(x.count(a, t), inst.activities[static_cast<std::size_t>(a)].demand);
}

/// n_{p,t}: total demand of the activities with priority p active at t.
inline std::vector<std::vector<long>> priority_demand(const Instance& inst) {
    std::vector<std::vector<long>> n(static_cast<std::size_t>(inst.priorities.levels),
                                     std::vector<long>(static_cast<std::size_t>(inst.num_slots()), 0));
    for (const auto& act : inst.activities)
        for (int t = 0; t < inst.num_slots(); ++t)
            if (act.window[static_cast<std::size_t>(t)])
                n[static_cast<std::size_t>(act.priority - 1)][static_cast<std::size_t>(t)] += act.demand;
    return n;
}

/// Workloads recomputed from x alone, without touching the assignment caches.
struct WorkloadTable {
    int slots = 0;
    std::vector<Rational> activity;  // L_{a,t}, index a*T + t
    std::vector<Rational> priority;  // Lbar_{p,t}, index (p-1)*T + t
    std::vector<long> priority_demand_total;  // n_{p,t}

    const Rational& L(int a, int t) const { return activity[static_cast<std::size_t>(a) * slots + t]; }
    const Rational& Lbar(int p, int t) const { return priority[static_cast<std::size_t>(p - 1) * slots + t]; }
};

/// Per-(a,t) assigned counts recomputed from x, index a*T + t.
inline std::vector<int> count_table(const Instance& inst, const Assignment& x) {
    const int V = inst.num_volunteers(), A = inst.num_activities(), T = inst.num_slots();
    std::vector<int> counts(static_cast<std::size_t>(A) * T, 0);
    for (int v = 0; v < V; ++v)
        for (int a = 0; a < A; ++a)
            for (int t = 0; t < T; ++t)
                if (x.at(v, a, t)) ++counts[static_cast<std::size_t>(a) * T + t];
    return counts;
}

inline WorkloadTable build_workload_table(const Instance& inst, const std::vector<int>& counts) {
    const int A = inst.num_activities(), T = inst.num_slots();
    const int P = inst.priorities.levels;
    WorkloadTable table;
    table.slots = T;
    table.activity.assign(static_cast<std::size_t>(A) * T, Rational{0});
    std::vector<long> assigned_p(static_cast<std::size_t>(P) * T, 0);
    table.priority_demand_total.assign(static_cast<std::size_t>(P) * T, 0);
    for (int a = 0; a < A; ++a) {
        const auto& act = inst.activities[static_cast<std::size_t>(a)];
        for (int t = 0; t < T; ++t) {
            const int assigned = counts[static_cast<std::size_t>(a) * T + t];
            if (assigned != 0) table.activity[static_cast<std::size_t>(a) * T + t] = make_rational(assigned, act.demand);
            if (act.window[static_cast<std::size_t>(t)]) {
                const auto idx = static_cast<std::size_t>(act.priority - 1) * T + t;
                assigned_p[idx] += assigned;
                table.priority_demand_total[idx] += act.demand;
            }
        }
    }
    table.priority.assign(static_cast<std::size_t>(P) * T, Rational{0});
    for (std::size_t i = 0; i < table.priority.size(); ++i)
        if (table.priority_demand_total[i] > 0 && assigned_p[i] != 0)
            table.priority[i] = make_rational(assigned_p[i], table.priority_demand_total[i]);
    return table;
}

inline WorkloadTable build_workload_table(const Instance& inst, const Assignment& x) {
    return build_workload_table(inst, count_table(inst, x));
}

/// Lbar_{p,t} from the cached priority counts; 0 when no activity of level p is active at t.
inline Rational avg_priority_workload(const Instance& inst, const Assignment& x, int p, int t) {
    long demand = 0;
    for (const auto& act : inst.activities)
        if (act.priority == p && act.window[static_cast<std::size_t>(t)]) demand += act.demand;
    if (demand == 0) return Rational{0};
    return make_rational(x.priority_count(p, t), demand);
}

/// Lambda_{p,q,t} given the two average workloads; p and q adjacent in one class.
inline Rational lambda_value(const PriorityStructure& ps, int p, int q, const Rational& Lp, const Rational& Lq) {
    if (std::abs(p - q) != 1 || !ps.same_class(p, q))
        throw InputError("lambda imbalance needs adjacent levels inside one class, got (" + std::to_string(p) + "," +
                         std::to_string(q) + ")");
    const Rational sigma = ps.sigma.at(std::min(p, q));
    if (p == q + 1) return positive_part(Lp - Lq / sigma);
    return positive_part(Lp - sigma * Lq);
}

inline Rational lambda_imbalance(const Instance& inst, const Assignment& x, int p, int q, int t) {
    return lambda_value(inst.priorities, p, q, avg_priority_workload(inst, x, p, t), avg_priority_workload(inst, x, q, t));
}

inline Rational delta_imbalance(const Instance& inst, const Assignment& x, int a, int b, int t) {
    return positive_part(workload(inst, x, a, t) - workload(inst, x, b, t));
}

/// Capable-available supply per (capability, slot): sum_v av_{v,t} cap_{v,c}.
class SupplyTable {
public:
    explicit SupplyTable(const Instance& inst) : slots_(inst.num_slots()) {
        supply_.assign(static_cast<std::size_t>(inst.num_capabilities()) * slots_, 0);
        for (const auto& vol : inst.volunteers)
            for (int c = 0; c < inst.num_capabilities(); ++c) {
                if (!vol.has_capability(c)) continue;
                for (int t = 0; t < slots_; ++t)
                    if (vol.availability[static_cast<std::size_t>(t)]) ++supply_[static_cast<std::size_t>(c) * slots_ + t];
            }
    }
    long operator()(int c, int t) const { return supply_[static_cast<std::size_t>(c) * slots_ + t]; }

private:
    int slots_;
    std::vector<long> supply_;
};

/// d_{a,t} = min(1, n_a r_{a,t} / supply) with d = 1 on zero supply of an active activity.
inline Rational supply_weight(const Instance& inst, const SupplyTable& supply, int a, int t) {
    const auto& act = inst.activities[static_cast<std::size_t>(a)];
    if (!act.window[static_cast<std::size_t>(t)]) return Rational{0};
    const long s = supply(act.capability, t);
    if (s == 0 || act.demand >= s) return Rational{1};
    return make_rational(act.demand, s);
}

inline Rational supply_weight(const Instance& inst, int a, int t) {
    return supply_weight(inst, SupplyTable(inst), a, t);
}

/// Lexicographic objective values. priority_values[0] is the top class K
/// (OF 1), priority_values[K-1] the lowest class (OF K).
struct ObjectiveVector {
    std::vector<Rational> priority_values;
    Rational intra_class_imbalance;
    Rational inter_activity_imbalance;

    int num_classes() const { return static_cast<int>(priority_values.size()); }

    /// OF 1..K+2 in lexicographic order.
    std::vector<Rational> entries() const {
        auto out = priority_values;
        out.push_back(intra_class_imbalance);
        out.push_back(inter_activity_imbalance);
        return out;
    }
    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// Objective vector of any assignment with the given per-(a,t) counts.
inline ObjectiveVector objective_from_counts(const Instance& inst, const SupplyTable& supply,
                                             const std::vector<int>& counts) {
    const int A = inst.num_activities(), T = inst.num_slots();
    const auto& ps = inst.priorities;
    const int K = ps.num_classes();
    const WorkloadTable table = build_workload_table(inst, counts);

    ObjectiveVector out;
    out.priority_values.assign(static_cast<std::size_t>(K), Rational{0});
    for (int a = 0; a < A; ++a) {
        const auto& act = inst.activities[static_cast<std::size_t>(a)];
        const int k = ps.class_of(act.priority);
        if (k == 0) continue;
        Rational sum;
        for (int t = 0; t < T; ++t) {
            if (!act.window[static_cast<std::size_t>(t)]) continue;
            const int assigned = counts[static_cast<std::size_t>(a) * T + t];
            if (assigned != 0) sum += inst.constants.weights[static_cast<std::size_t>(t)] * assigned;
        }
        out.priority_values[static_cast<std::size_t>(K - k)] += sum;
    }

    for (int k = 1; k <= K; ++k) {
        if (!ps.alpha(k)) continue;
        for (int p : ps.classes[static_cast<std::size_t>(k - 1)]) {
            if (!ps.same_class(p, p + 1)) continue;
            for (int t = 0; t < T; ++t) {
                out.intra_class_imbalance += lambda_value(ps, p, p + 1, table.Lbar(p, t), table.Lbar(p + 1, t));
                out.intra_class_imbalance += lambda_value(ps, p + 1, p, table.Lbar(p + 1, t), table.Lbar(p, t));
            }
        }
    }

    // Sum over ordered pairs of d_a d_a' (L_a - L_a')^+ per (p,t); with the
    // activities sorted by workload each item pairs against a running prefix.
    struct Item {
        Rational L;
        Rational d;
    };
    std::vector<Item> items;
    for (int p = 1; p <= ps.levels; ++p) {
        for (int t = 0; t < T; ++t) {
            items.clear();
            for (int a = 0; a < A; ++a) {
                const auto& act = inst.activities[static_cast<std::size_t>(a)];
                if (act.priority != p || !act.window[static_cast<std::size_t>(t)]) continue;
                items.push_back({table.L(a, t), supply_weight(inst, supply, a, t)});
            }
            if (items.size() < 2) continue;
            std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) { return l.L < r.L; });
            Rational d_prefix, dl_prefix;
            for (const auto& item : items) {
                out.inter_activity_imbalance += item.d * (item.L * d_prefix - dl_prefix);
                d_prefix += item.d;
                dl_prefix += item.d * item.L;
            }
        }
    }
    return out;
}

inline ObjectiveVector objective_vector(const Instance& inst, const Assignment& x) {
    return objective_from_counts(inst, SupplyTable(inst), count_table(inst, x));
}

enum class LexOrder { Better, Equal, Worse };

/// Compares u against v: priority values maximized (class K first), then both
/// imbalance terms minimized.
inline LexOrder lex_compare(const ObjectiveVector& u, const ObjectiveVector& v) {
    if (u.num_classes() != v.num_classes()) throw InputError("objective vectors with different class counts");
    for (std::size_t i = 0; i < u.priority_values.size(); ++i) {
        const int c = cmp(u.priority_values[i], v.priority_values[i]);
        if (c != 0) return c > 0 ? LexOrder::Better : LexOrder::Worse;
    }
    if (const int c = cmp(u.intra_class_imbalance, v.intra_class_imbalance); c != 0)
        return c < 0 ? LexOrder::Better : LexOrder::Worse;
    if (const int c = cmp(u.inter_activity_imbalance, v.inter_activity_imbalance); c != 0)
        return c < 0 ? LexOrder::Better : LexOrder::Worse;
    return LexOrder::Equal;
}

}  // namespace svcp
