#pragma once

#include "svcp/domain.hpp"

#include <string>
#include <vector>

namespace svcp {

struct ActivityType {
    int id = 0;
    std::string label;
    int capability = 0;  // 1-based capability id
    friend bool operator==(const ActivityType&, const ActivityType&) = default;
};

struct CatalogActivity {
    int type = 0;        // ActivityType id
    std::string label;   // as written in the task table
    int capability = 0;  // 1-based
    int demand = 0;
    friend bool operator==(const CatalogActivity&, const CatalogActivity&) = default;
};

struct TaskCatalogEntry {
    int task_id = 0;
    std::vector<CatalogActivity> activities;
    int priority = 1;
    Point location;
    friend bool operator==(const TaskCatalogEntry&, const TaskCatalogEntry&) = default;
};

struct Catalog {
    std::vector<Capability> capabilities;
    std::vector<ActivityType> activity_types;
    std::vector<TaskCatalogEntry> tasks;
    friend bool operator==(const Catalog&, const Catalog&) = default;
};

inline std::vector<Capability> halle_capabilities() {
    return {{1, "Heavy physical work"},
            {2, "Medium physical work"},
            {3, "Light physical work"},
            {4, "Caregiving tasks"},
            {5, "Light documentation work"},
            {6, "Caregiving tasks including vehicle operation"}};
}

inline std::vector<ActivityType> halle_activity_types() {
    return {{1, "Carrying water containers", 1}, {2, "Filling water containers", 2},
            {3, "On-site documentation", 5},     {4, "Cleaning and disinfection", 2},
            {5, "Information dissemination", 3}, {6, "Domestic assistance", 3},
            {7, "Filling sandbags", 2},          {8, "Carrying sandbags", 1},
            {9, "Transport assignments", 6},     {10, "Local logistics", 3},
            {11, "Dike inspection", 3},          {12, "Meal distribution", 4},
            {13, "Meal preparation", 2},         {14, "Meal delivery", 2},
            {15, "Caregiving", 4}};
}

namespace detail {

struct CatalogRow {
    int task;
    int type;
    const char* label;
    int demand;
};

// Task table rows in order. "Transport missions" and "Care support" are
// the task table's names for activity types 9 and 15.
inline constexpr CatalogRow halle_rows[] = {
    {1, 3, "On-site documentation", 1},  {1, 8, "Carrying sandbags", 25},  {1, 12, "Meal distribution", 3},
    {2, 3, "On-site documentation", 2},  {2, 8, "Carrying sandbags", 96},  {2, 12, "Meal distribution", 10},
    {3, 3, "On-site documentation", 1},  {3, 8, "Carrying sandbags", 25},  {3, 12, "Meal distribution", 3},
    {4, 3, "On-site documentation", 1},  {4, 8, "Carrying sandbags", 25},  {4, 12, "Meal distribution", 3},
    {5, 3, "On-site documentation", 1},  {5, 8, "Carrying sandbags", 25},  {5, 12, "Meal distribution", 3},
    {6, 3, "On-site documentation", 1},  {6, 8, "Carrying sandbags", 25},  {6, 12, "Meal distribution", 3},
    {7, 3, "On-site documentation", 1},  {7, 8, "Carrying sandbags", 40},  {7, 12, "Meal distribution", 4},
    {8, 3, "On-site documentation", 1},  {8, 8, "Carrying sandbags", 25},  {8, 12, "Meal distribution", 3},
    {9, 3, "On-site documentation", 1},  {9, 8, "Carrying sandbags", 25},  {9, 12, "Meal distribution", 3},
    {10, 3, "On-site documentation", 1}, {10, 8, "Carrying sandbags", 30}, {10, 12, "Meal distribution", 3},
    {11, 3, "On-site documentation", 9}, {11, 8, "Carrying sandbags", 440}, {11, 12, "Meal distribution", 44},
    {12, 3, "On-site documentation", 1}, {12, 8, "Carrying sandbags", 25}, {12, 12, "Meal distribution", 3},
    {13, 3, "On-site documentation", 1}, {13, 8, "Carrying sandbags", 25}, {13, 12, "Meal distribution", 3},
    {14, 3, "On-site documentation", 1}, {14, 8, "Carrying sandbags", 25}, {14, 12, "Meal distribution", 3},
    {15, 3, "On-site documentation", 1}, {15, 8, "Carrying sandbags", 25}, {15, 12, "Meal distribution", 3},
    {16, 3, "On-site documentation", 1}, {16, 8, "Carrying sandbags", 25}, {16, 12, "Meal distribution", 3},
    {17, 3, "On-site documentation", 8}, {17, 7, "Filling sandbags", 90},  {17, 8, "Carrying sandbags", 270},
    {17, 12, "Meal distribution", 36},
    {18, 3, "On-site documentation", 22}, {18, 7, "Filling sandbags", 270}, {18, 8, "Carrying sandbags", 810},
    {18, 12, "Meal distribution", 108},
    {19, 3, "On-site documentation", 3}, {19, 7, "Filling sandbags", 30},  {19, 8, "Carrying sandbags", 90},
    {19, 12, "Meal distribution", 12},
    {20, 3, "On-site documentation", 1}, {20, 5, "Information dissemination", 8}, {20, 9, "Transport missions", 8},
    {20, 12, "Meal distribution", 8},    {20, 15, "Care support", 16},
    {21, 3, "On-site documentation", 1}, {21, 5, "Information dissemination", 8}, {21, 9, "Transport missions", 8},
    {21, 12, "Meal distribution", 8},    {21, 15, "Care support", 16},
    {22, 2, "Filling water containers", 8}, {22, 3, "On-site documentation", 1},
    {22, 5, "Information dissemination", 8}, {22, 12, "Meal distribution", 8}, {22, 15, "Care support", 16},
    {23, 3, "On-site documentation", 1}, {23, 12, "Meal distribution", 25},
    {24, 3, "On-site documentation", 1}, {24, 12, "Meal distribution", 25},
    {25, 3, "On-site documentation", 1}, {25, 12, "Meal distribution", 25},
    {26, 3, "On-site documentation", 1}, {26, 12, "Meal distribution", 25},
    {27, 3, "On-site documentation", 1}, {27, 12, "Meal distribution", 25},
};

// Priority and position (hundredths of a km inside a 10 x 10 km box) per
// task. Not tabulated in the source; drawn once from a fixed seed and frozen.
struct TaskSite {
    int priority;
    int x;
    int y;
};

inline constexpr TaskSite halle_sites[] = {
    {2, 828, 857}, {2, 756, 389}, {3, 450, 768}, {3, 565, 766}, {3, 56, 394},  {1, 769, 244}, {2, 558, 945},
    {3, 309, 440}, {2, 277, 182}, {3, 293, 590}, {1, 127, 331}, {2, 468, 339}, {3, 642, 767}, {1, 724, 691},
    {1, 571, 512}, {1, 165, 626}, {1, 149, 205}, {1, 913, 927}, {2, 506, 934}, {2, 127, 689}, {3, 613, 403},
    {1, 816, 689}, {2, 381, 955}, {2, 163, 842}, {1, 593, 514}, {1, 46, 898},  {1, 5, 585},
};

}  // namespace detail

/// The 27 tasks of the 2013 Halle flood with their activity demands.
inline Catalog halle_catalog() {
    Catalog catalog;
    catalog.capabilities = halle_capabilities();
    catalog.activity_types = halle_activity_types();
    for (std::size_t i = 0; i < std::size(detail::halle_sites); ++i) {
        const auto& site = detail::halle_sites[i];
        TaskCatalogEntry task;
        task.task_id = static_cast<int>(i) + 1;
        task.priority = site.priority;
        task.location = {make_rational(site.x, 100), make_rational(site.y, 100)};
        catalog.tasks.push_back(std::move(task));
    }
    for (const auto& row : detail::halle_rows) {
        const auto& type = catalog.activity_types[static_cast<std::size_t>(row.type - 1)];
        catalog.tasks[static_cast<std::size_t>(row.task - 1)].activities.push_back(
            {row.type, row.label, type.capability, row.demand});
    }
    return catalog;
}

inline const TaskCatalogEntry& find_task(const Catalog& catalog, int task_id) {
    for (const auto& t : catalog.tasks)
        if (t.task_id == task_id) return t;
    throw InputError("unknown task id " + std::to_string(task_id));
}

/// Structural checks: contiguous ids, known activity types with matching
/// capabilities, positive demands and priorities in 1..levels.
inline std::vector<std::string> validate_catalog(const Catalog& catalog, int levels = 3) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < catalog.capabilities.size(); ++i)
        if (catalog.capabilities[i].id != static_cast<int>(i) + 1) out.push_back("capability ids not contiguous");
    for (std::size_t i = 0; i < catalog.tasks.size(); ++i) {
        const auto& task = catalog.tasks[i];
        const std::string where = "task " + std::to_string(task.task_id);
        if (task.task_id != static_cast<int>(i) + 1) out.push_back(where + ": ids not contiguous");
        if (task.priority < 1 || task.priority > levels) out.push_back(where + ": priority out of range");
        if (task.activities.empty()) out.push_back(where + ": no activities");
        for (const auto& act : task.activities) {
            if (act.demand < 1) out.push_back(where + ": non-positive demand");
            if (act.capability < 1 || act.capability > static_cast<int>(catalog.capabilities.size()))
                out.push_back(where + ": unknown capability");
            const ActivityType* type = nullptr;
            for (const auto& at : catalog.activity_types)
                if (at.id == act.type) type = &at;
            if (!type)
                out.push_back(where + ": unknown activity type");
            else if (type->capability != act.capability)
                out.push_back(where + ": capability does not match activity type " + std::to_string(act.type));
        }
    }
    return out;
}

}  // namespace svcp
