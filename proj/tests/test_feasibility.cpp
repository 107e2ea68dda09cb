#include "svcp/builder.hpp"
#include "svcp/feasibility.hpp"
#include "svcp/random_instance.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace svcp;

namespace {

bool has_defect(const std::vector<InstanceDefect>& report, Defect code) {
    return std::any_of(report.begin(), report.end(), [&](const InstanceDefect& d) { return d.code == code; });
}

long count_rule(const std::vector<Violation>& vs, Rule r) {
    return std::count_if(vs.begin(), vs.end(), [&](const Violation& v) { return v.rule == r; });
}

Instance two_volunteers_one_activity() {
    return InstanceBuilder(8).volunteer({0}).volunteer({0}).activity(0, 3, 2).build();
}

}  // namespace

TEST(ValidateInstance, WellFormedInstanceHasEmptyReport) {
    EXPECT_TRUE(validate_instance(two_volunteers_one_activity()).empty());
}

TEST(ValidateInstance, OverlappingClassesAreReported) {
    Instance inst = two_volunteers_one_activity();
    inst.priorities.classes = {{1, 2}, {2, 3}};
    const auto report = validate_instance(inst);
    ASSERT_TRUE(has_defect(report, Defect::ClassesNotDisjoint));
    const auto it = std::find_if(report.begin(), report.end(),
                                 [](const InstanceDefect& d) { return d.code == Defect::ClassesNotDisjoint; });
    EXPECT_EQ(it->message, "classes not disjoint");
}

TEST(ValidateInstance, MinRunAboveMaxWorkIsReported) {
    Instance inst = two_volunteers_one_activity();
    inst.constants.min_run = 5;
    inst.constants.max_work = 4;
    EXPECT_TRUE(has_defect(validate_instance(inst), Defect::MinRunExceedsMaxWork));
}

TEST(ValidateInstance, MissingSigmaInsideAClass) {
    Instance inst = two_volunteers_one_activity();
    inst.priorities.sigma.clear();
    EXPECT_TRUE(has_defect(validate_instance(inst), Defect::MissingSigma));
}

TEST(ValidateInstance, StructuralDefects) {
    Instance inst = two_volunteers_one_activity();
    inst.activities[0].window.pop_back();
    inst.volunteers[1].availability.push_back(true);
    inst.activities[0].demand = 0;
    inst.constants.weights[3] = inst.constants.weights[2];
    inst.priorities.classes = {{3}, {1, 2}};
    const auto report = validate_instance(inst);
    EXPECT_TRUE(has_defect(report, Defect::ActivityWindowLength));
    EXPECT_TRUE(has_defect(report, Defect::VolunteerAvailabilityLength));
    EXPECT_TRUE(has_defect(report, Defect::ActivityDemand));
    EXPECT_TRUE(has_defect(report, Defect::WeightsNotDecreasing));
    EXPECT_TRUE(has_defect(report, Defect::ClassesUnordered));
}

TEST(ValidateInstance, IncompletePartition) {
    Instance inst = two_volunteers_one_activity();
    inst.priorities.classes = {{1, 2}};
    EXPECT_TRUE(has_defect(validate_instance(inst), Defect::ClassesIncomplete));
}

TEST(ValidateInstance, InfeasiblePriorAssignmentsAreReported) {
    Instance inst = InstanceBuilder(8).volunteer({0}).activity(0, 3, 1).prior(0, 0, 0, 1).build();
    EXPECT_TRUE(has_defect(validate_instance(inst), Defect::PriorAssignmentInfeasible));
    inst.prior_runs = {{0, 0, 2, 5}};
    EXPECT_TRUE(validate_instance(inst).empty());
}

TEST(CheckFeasibility, EmptyScheduleIsFeasible) {
    const Instance inst = two_volunteers_one_activity();
    EXPECT_TRUE(check_feasibility(inst, Assignment(inst)).empty());
}

TEST(CheckFeasibility, DimensionMismatchThrows) {
    const Instance inst = two_volunteers_one_activity();
    const Instance other = InstanceBuilder(8).volunteer({0}).activity(0, 3, 2).build();
    EXPECT_THROW(check_feasibility(inst, Assignment(other)), InputError);
}

TEST(CheckFeasibility, MissingCapabilityGivesOneViolationPerSlot) {
    const Instance inst = InstanceBuilder(8, 2).volunteer({1}).activity(0, 3, 1).build();
    Assignment x(inst);
    x.assign_run({0, 0, 0, 3});
    const auto vs = check_feasibility(inst, x);
    EXPECT_EQ(count_rule(vs, Rule::C1), 4);
    EXPECT_EQ(vs.size(), 4u);
}

TEST(CheckFeasibility, ShortRunViolatesMinimumDuration) {
    const Instance inst = InstanceBuilder(8).volunteer({0}).activity(0, 3, 1).build();
    ASSERT_EQ(inst.constants.min_run, 4);
    Assignment x(inst);
    x.assign_run({0, 0, 0, 2});
    const auto vs = check_feasibility(inst, x);
    ASSERT_EQ(vs.size(), 1u);
    EXPECT_EQ(vs[0].rule, Rule::C7);
}

TEST(CheckFeasibility, EachRuleIsDetected) {
    // Two activities 10 km apart: 2 slots of travel at 10 km/h with 30-minute slots.
    Instance inst = InstanceBuilder(12)
                        .min_run(2)
                        .max_work(6)
                        .volunteer({0}, 1, 0, 9)
                        .volunteer({0}, 0)
                        .activity(0, 3, 1, 0, 7, {make_rational(0), make_rational(0)})
                        .activity(0, 3, 1, 0, 11, {make_rational(10), make_rational(0)})
                        .build();
    inst.prior_runs = {{1, 1, 8, 9}};

    Assignment x(inst);
    x.assign_run({0, 0, 0, 1});   // C8: initial travel 1
    x.assign_run({0, 1, 3, 4});   // C9: gap 1 < 2
    x.assign_run({0, 1, 10, 11}); // C2 at 10, 11
    x.assign_run({1, 1, 3, 4});   // C4 at 3, 4 (and 11 below)
    x.set(1, 0, 3);               // C5 at slot 3, C7 single slot
    x.set(1, 1, 11);              // C7 single slot; prior 8..9 missing -> C10
    const auto vs = check_feasibility(inst, x);
    EXPECT_EQ(count_rule(vs, Rule::C2), 2);
    EXPECT_EQ(count_rule(vs, Rule::C4), 3);
    EXPECT_GE(count_rule(vs, Rule::C5), 1);
    EXPECT_EQ(count_rule(vs, Rule::C7), 2);
    EXPECT_EQ(count_rule(vs, Rule::C8), 1);
    EXPECT_GE(count_rule(vs, Rule::C9), 1);
    EXPECT_EQ(count_rule(vs, Rule::C10), 2);
    EXPECT_EQ(count_rule(vs, Rule::C1), 0);

    Assignment y(inst);
    y.assign_run({0, 0, 1, 2});
    y.assign_run({0, 1, 5, 6});
    y.assign_run({0, 1, 8, 9});
    y.assign_run({1, 1, 8, 9});
    const auto ws = check_feasibility(inst, y);
    EXPECT_EQ(count_rule(ws, Rule::C4), 2);
    EXPECT_EQ(count_rule(ws, Rule::C6), 0);
    y.assign_run({0, 0, 3, 3});
    EXPECT_EQ(count_rule(check_feasibility(inst, y), Rule::C6), 1);
}

TEST(CheckFeasibility, ActivityWindow) {
    const Instance inst = InstanceBuilder(8).volunteer({0}).activity(0, 3, 1, 0, 3).build();
    Assignment x(inst);
    x.assign_run({0, 0, 2, 5});
    EXPECT_EQ(count_rule(check_feasibility(inst, x), Rule::C3), 2);
}

TEST(CheckFeasibility, AdjacentRunsAtSameLocationNeedNoGap) {
    const Instance inst = InstanceBuilder(8).min_run(2).volunteer({0}).activity(0, 3, 1).activity(0, 3, 1).build();
    Assignment x(inst);
    x.assign_run({0, 0, 0, 1});
    x.assign_run({0, 1, 2, 3});
    EXPECT_TRUE(check_feasibility(inst, x).empty());
}

TEST(CheckFeasibility, ContinuingRunCreditCountsTowardMinimumDuration) {
    Instance inst = InstanceBuilder(8).volunteer({0}, 2).activity(0, 3, 1).build();
    inst.volunteers[0].travel_overrides[0] = 0;
    inst.volunteers[0].continuing = {0, 1};
    Assignment x(inst);
    x.assign_run({0, 0, 0, 2});
    EXPECT_TRUE(check_feasibility(inst, x).empty());
    inst.volunteers[0].continuing = {};
    EXPECT_EQ(count_rule(check_feasibility(inst, x), Rule::C7), 1);
}

TEST(CheckFeasibility, WorkedOffsetCountsTowardWorkingTime) {
    Instance inst = InstanceBuilder(20).volunteer({0}).activity(0, 3, 1).build();
    Assignment x(inst);
    x.assign_run({0, 0, 0, 9});
    EXPECT_TRUE(check_feasibility(inst, x).empty());
    inst.volunteers[0].worked_offset = 7;
    EXPECT_EQ(count_rule(check_feasibility(inst, x), Rule::C6), 1);
}

TEST(TravelSlots, WorkedExamples) {
    const Rational speed{10};
    const Point origin{make_rational(0), make_rational(0)};
    EXPECT_EQ(travel_slots(origin, origin, speed, 30), 0);
    EXPECT_EQ(travel_slots(origin, {make_rational(5), make_rational(0)}, speed, 30), 1);
    EXPECT_EQ(travel_slots(origin, {make_rational(51, 10), make_rational(0)}, speed, 30), 2);
    // 3-4-5 triangle: exactly 5 km
    EXPECT_EQ(travel_slots(origin, {make_rational(3), make_rational(4)}, speed, 30), 1);
    EXPECT_EQ(travel_slots(origin, {make_rational(10), make_rational(0)}, speed, 30), 2);
    EXPECT_EQ(travel_slots(origin, {make_rational(1, 1000), make_rational(0)}, speed, 30), 1);
}

TEST(TravelSlots, SymmetricAndTriangleUpToCeilingSlack) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coord(-400, 400);
    auto point = [&] { return Point{make_rational(coord(rng), 37), make_rational(coord(rng), 41)}; };
    const Rational speed{10};
    for (int i = 0; i < 500; ++i) {
        const Point a = point(), b = point(), c = point();
        const int ab = travel_slots(a, b, speed, 30), ba = travel_slots(b, a, speed, 30);
        EXPECT_EQ(ab, ba);
        EXPECT_LE(travel_slots(a, c, speed, 30), ab + travel_slots(b, c, speed, 30) + 1);
    }
}

TEST(TotalWorkingTime, SumsAssignedSlots) {
    const Instance inst = InstanceBuilder(20).volunteer({0}).activity(0, 3, 1).activity(0, 3, 1).build();
    Assignment x(inst);
    EXPECT_EQ(total_working_time(x, 0), 0);
    x.assign_run({0, 0, 0, 3});
    EXPECT_EQ(total_working_time(x, 0), 4);
    x.assign_run({0, 1, 6, 11});
    EXPECT_EQ(total_working_time(x, 0), 10);
    EXPECT_EQ(x.worked(0), 10);
}

TEST(Assignment, CachesMatchRecomputationUnderRandomEdits) {
    const Instance inst = random_instance({}, 11);
    Assignment x(inst);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        const int v = static_cast<int>(rng() % static_cast<unsigned>(inst.num_volunteers()));
        const int a = static_cast<int>(rng() % static_cast<unsigned>(inst.num_activities()));
        const int t = static_cast<int>(rng() % static_cast<unsigned>(inst.num_slots()));
        x.set(v, a, t, (rng() & 1) != 0);
        if (i % 97 == 0) ASSERT_TRUE(x.caches_consistent());
    }
    EXPECT_TRUE(x.caches_consistent());
}

TEST(RandomInstance, AlwaysValidAndPriorAssignmentsFeasible) {
    RandomInstanceParams params;
    params.prior_run_attempts = 6;
    int with_prior = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const Instance inst = random_instance(params, seed);
        ASSERT_TRUE(validate_instance(inst).empty()) << "seed " << seed;
        EXPECT_TRUE(check_feasibility(inst, Assignment::from_prior(inst)).empty());
        with_prior += inst.prior_runs.empty() ? 0 : 1;
    }
    EXPECT_GT(with_prior, 30);
}
