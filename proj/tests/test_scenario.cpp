#include "svcp/oracle.hpp"
#include "svcp/scenario.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

using namespace svcp;

namespace {

const CatalogActivity& activity_of(const TaskCatalogEntry& task, int type) {
    for (const auto& a : task.activities)
        if (a.type == type) return a;
    throw std::out_of_range("activity type missing");
}

ScenarioConfig small_config(std::uint64_t seed) {
    ScenarioConfig c;
    c.max_volunteers = 300;
    c.arrival_lambda = 7;
    c.arrival_scale = make_rational(5);
    c.added_tasks_per_instance = 2;
    c.seed = seed;
    c.num_instances = 8;
    return c;
}

/// One task with two activities, T = 8: small enough for the exact oracle.
Scenario tiny_scenario(std::uint64_t seed, int shift) {
    Catalog cat;
    cat.capabilities = {{1, "lifting"}, {2, "writing"}};
    cat.activity_types = {{1, "carry", 1}, {2, "log", 2}};
    cat.tasks.push_back({1, {{1, "carry", 1, 2}, {2, "log", 2, 1}}, 3, {make_rational(0), make_rational(0)}});
    ScenarioConfig c;
    c.max_volunteers = 4;
    c.arrival_lambda = 1;
    c.arrival_scale = make_rational(3, 2);
    c.capability_probability = make_rational(7, 10);
    c.horizon.num_slots = 8;
    c.min_run = 2;
    c.max_work = 5;
    c.initial_travel = 1;
    c.initial_tasks = 1;
    c.num_instances = 6;
    c.decision_interval_slots = shift;
    c.seed = seed;
    return generate_scenario(c, cat);
}

}  // namespace

TEST(HalleCatalog, SpotChecks) {
    const Catalog cat = halle_catalog();
    ASSERT_EQ(cat.tasks.size(), 27u);
    EXPECT_TRUE(validate_catalog(cat).empty());

    const auto& t11 = find_task(cat, 11);
    EXPECT_EQ(activity_of(t11, 3).demand, 9);
    EXPECT_EQ(activity_of(t11, 8).demand, 440);
    EXPECT_EQ(activity_of(t11, 12).demand, 44);

    const auto& t17 = find_task(cat, 17);
    EXPECT_EQ(activity_of(t17, 3).demand, 8);
    EXPECT_EQ(activity_of(t17, 7).demand, 90);
    EXPECT_EQ(activity_of(t17, 8).demand, 270);
    EXPECT_EQ(activity_of(t17, 12).demand, 36);

    std::vector<int> t18;
    for (const auto& a : find_task(cat, 18).activities) t18.push_back(a.demand);
    EXPECT_EQ(t18, (std::vector<int>{22, 270, 810, 108}));

    const auto& t2 = find_task(cat, 2);
    EXPECT_EQ(activity_of(t2, 3).demand, 2);
    EXPECT_EQ(activity_of(t2, 8).demand, 96);
    EXPECT_EQ(activity_of(t2, 12).demand, 10);

    EXPECT_EQ(activity_of(t11, 8).capability, 1);
    EXPECT_EQ(cat.capabilities[0].label, "Heavy physical work");
    EXPECT_EQ(activity_of(find_task(cat, 20), 9).label, "Transport missions");
    EXPECT_EQ(activity_of(find_task(cat, 20), 9).capability, 6);
    EXPECT_EQ(activity_of(find_task(cat, 22), 15).capability, 4);

    int activities = 0, demand = 0;
    for (const auto& t : cat.tasks)
        for (const auto& a : t.activities) {
            ++activities;
            demand += a.demand;
        }
    EXPECT_EQ(activities, 85);
    EXPECT_EQ(demand, 3030);
}

TEST(SampleArrivals, ClampAndMean) {
    std::mt19937_64 rng(1);
    EXPECT_EQ(sample_arrivals(7, make_rational(30), 0, rng), 0);
    for (int i = 0; i < 1000; ++i) EXPECT_LE(sample_arrivals(11, make_rational(30), 100, rng), 100);

    const int n = 10000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += sample_arrivals(7, make_rational(30), 1'000'000, rng);
    EXPECT_NEAR(sum / n, 210.0, 210.0 * 0.02);
}

TEST(SampleArrivals, MeanWithinThreeStandardErrors) {
    std::mt19937_64 rng(2);
    const int n = 1000;
    double sum = 0;
    for (int i = 0; i < n; ++i) sum += sample_arrivals(11, make_rational(30), 1'000'000, rng);
    const double mean = 330.0;
    EXPECT_LE(std::abs(sum / n - mean), 3 * std::sqrt(mean) / std::sqrt(n));
}

TEST(Design, SixteenRowsInTableOrder) {
    const auto rows = design_configs();
    ASSERT_EQ(rows.size(), 16u);
    EXPECT_EQ(rows[0].max_volunteers, 5000);
    EXPECT_EQ(rows[0].added_tasks_per_instance, 1);
    EXPECT_EQ(rows[0].capability_probability, make_rational(3, 10));
    EXPECT_EQ(rows[0].arrival_lambda, 7);
    EXPECT_EQ(rows[1].arrival_lambda, 11);
    EXPECT_EQ(rows[2].capability_probability, make_rational(1, 2));
    EXPECT_EQ(rows[4].added_tasks_per_instance, 2);
    EXPECT_EQ(rows[8].max_volunteers, 10000);
    EXPECT_EQ(rows[15].scenario_id, 16);
    for (const auto& r : rows) EXPECT_EQ(design_row(r), r.scenario_id);
    EXPECT_EQ(rows.size() * 10 * 20, 3200u);
}

TEST(Design, SpanIsThirtyThreeAndAHalfHours) {
    EXPECT_EQ(scenario_span_hours(ScenarioConfig{}), make_rational(67, 2));
    ScenarioConfig one;
    one.num_instances = 1;
    EXPECT_EQ(scenario_span_hours(one), make_rational(24));
}

TEST(GenerateScenario, DeterministicAndBounded) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cfg = small_config(seed);
        const Scenario a = generate_scenario(cfg);
        const Scenario b = generate_scenario(cfg);
        EXPECT_EQ(a.deltas, b.deltas);
        std::set<int> tasks;
        int pool = 0;
        for (const auto& d : a.deltas) {
            for (int t : d.new_tasks) EXPECT_TRUE(tasks.insert(t).second);
            for (const auto& v : d.new_volunteers) {
                EXPECT_EQ(v.id, ++pool);
                EXPECT_EQ(v.available_from, d.absolute_start);
                const int len = v.available_to - v.available_from + 1;
                EXPECT_GE(len, cfg.min_run);
                EXPECT_LE(len, cfg.horizon.num_slots);
            }
        }
        EXPECT_LE(pool, cfg.max_volunteers);
        EXPECT_EQ(tasks.size(), std::min<std::size_t>(27, 8 + 2 * 7));
        cfg.seed += 100;
        EXPECT_NE(generate_scenario(cfg).deltas, a.deltas);
    }
}

TEST(GenerateScenario, CatalogExhaustionStopsTaskArrivals) {
    ScenarioConfig cfg = small_config(3);
    cfg.num_instances = 20;
    const Scenario sc = generate_scenario(cfg);
    std::size_t total = 0;
    for (const auto& d : sc.deltas) total += d.new_tasks.size();
    EXPECT_EQ(total, 27u);
    EXPECT_EQ(build_instance(sc, 19).num_activities(), 85);
}

TEST(GenerateScenario, RejectsInvalidConfig) {
    ScenarioConfig cfg;
    cfg.num_instances = 0;
    EXPECT_THROW(generate_scenario(cfg), InputError);
}

TEST(RollHorizon, SingleInstanceHasEmptyCarry) {
    ScenarioConfig cfg = small_config(4);
    cfg.num_instances = 1;
    const auto result = roll_horizon(generate_scenario(cfg), heuristic_solver());
    ASSERT_TRUE(result.completed);
    ASSERT_EQ(result.steps.size(), 1u);
    EXPECT_TRUE(result.steps[0].feasible);
}

TEST(RollHorizon, CarriedRunsAreShiftedAssignments) {
    for (int shift : {1, 2, 3}) {
        ScenarioConfig cfg = small_config(7);
        cfg.decision_interval_slots = shift;
        const Scenario sc = generate_scenario(cfg);
        std::vector<Instance> instances;
        std::vector<Assignment> xs;
        int last_pool = 0;
        const auto result = roll_horizon(sc, heuristic_solver(), [&](const Instance& inst, const RollingStep& step) {
            EXPECT_TRUE(validate_instance(inst).empty()) << inst.meta.label;
            EXPECT_TRUE(step.feasible);
            EXPECT_GE(inst.num_volunteers(), last_pool);
            last_pool = inst.num_volunteers();
            instances.push_back(inst);
            xs.push_back(step.assignment);
        });
        ASSERT_TRUE(result.completed) << result.error;
        for (std::size_t i = 0; i + 1 < instances.size(); ++i) {
            const auto& cur = instances[i];
            const auto& nxt = instances[i + 1];
            const Assignment o = Assignment::from_prior(nxt);
            const int T = cur.num_slots();
            for (int v = 0; v < cur.num_volunteers(); ++v)
                for (int a = 0; a < cur.num_activities(); ++a)
                    for (int t = shift; t < T; ++t)
                        ASSERT_EQ(o.at(v, a, t - shift), xs[i].at(v, a, t)) << "shift " << shift << " step " << i;
            for (int v = 0; v < nxt.num_volunteers(); ++v) {
                for (int a = 0; a < nxt.num_activities(); ++a)
                    for (int t = T - shift; t < T; ++t) EXPECT_FALSE(o.at(v, a, t));
                // working time is cumulative
                if (v < cur.num_volunteers())
                    EXPECT_EQ(nxt.volunteers[static_cast<std::size_t>(v)].worked_offset + o.worked(v),
                              cur.volunteers[static_cast<std::size_t>(v)].worked_offset + xs[i].worked(v));
            }
        }
    }
}

TEST(RollHorizon, OracleOnTinyScenarios) {
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed)
        for (int shift : {1, 2}) {
            const Scenario sc = tiny_scenario(seed, shift);
            const Solver oracle = [](const Instance& inst) { return SolverOutput{solve_exact(inst).assignment, 0}; };
            const auto exact = roll_horizon(sc, oracle, [](const Instance& inst, const RollingStep& step) {
                EXPECT_TRUE(validate_instance(inst).empty());
                EXPECT_TRUE(step.feasible);
            });
            if (!exact.completed) {
                // the pool outgrew the oracle limits
                EXPECT_NE(exact.error.find("oracle limits"), std::string::npos) << exact.error;
                continue;
            }
            const auto heur = roll_horizon(sc, heuristic_solver());
            ASSERT_TRUE(heur.completed);
            // the first instances are identical, so the oracle cannot lose there
            EXPECT_NE(lex_compare(heur.steps[0].objective, exact.steps[0].objective), LexOrder::Better);
            ++solved;
        }
    EXPECT_GT(solved, 5);
}

TEST(RollHorizon, SolverFailureKeepsPartialResults) {
    const Scenario sc = generate_scenario(small_config(9));
    int calls = 0;
    const Solver flaky = [&](const Instance& inst) {
        if (++calls == 3) throw std::runtime_error("boom");
        return heuristic_solver()(inst);
    };
    const auto result = roll_horizon(sc, flaky);
    EXPECT_FALSE(result.completed);
    EXPECT_EQ(result.steps.size(), 2u);
    EXPECT_EQ(result.error, "instance 3: boom");
}
