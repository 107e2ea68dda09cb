#pragma once

#include "svcp/feasibility.hpp"
#include "svcp/halle_catalog.hpp"
#include "svcp/objectives.hpp"
#include "svcp/oracle.hpp"
#include "svcp/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

// Document formats. JSON with ordered keys; ids and slots are 1-based;
// rationals are [numerator, denominator] pairs; slot sets are lists of
// inclusive [from, to] intervals. Unknown keys are rejected.
namespace svcp::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* schema_version = "svcp/1";

/// Malformed or semantically invalid document; `path` names the offending field.
struct FormatError : InputError {
    FormatError(std::string path_, const std::string& message)
        : InputError(path_.empty() ? message : path_ + ": " + message), path(std::move(path_)) {}
    std::string path;
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

// ---------------------------------------------------------------------------
// Strict reading helpers
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}
inline std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

/// Object view that records which keys were read and rejects the rest.
class Obj {
public:
    Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw FormatError(path_, "expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const Json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw FormatError(join_path(path_, key), "missing field");
        return j_.at(key);
    }

    std::string path(const std::string& key) const { return join_path(path_, key); }

    void mark(const std::string& key) { seen_.insert(key); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw FormatError(join_path(path_, it.key()), "unknown field");
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline std::int64_t as_int(const Json& j, const std::string& path) {
    if (!j.is_number_integer()) throw FormatError(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline int as_small(const Json& j, const std::string& path) {
    const auto v = as_int(j, path);
    if (v < -1'000'000'000 || v > 1'000'000'000) throw FormatError(path, "integer out of range");
    return static_cast<int>(v);
}

inline std::uint64_t as_u64(const Json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw FormatError(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

inline std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw FormatError(path, "expected a string");
    return j.get<std::string>();
}

inline bool as_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) throw FormatError(path, "expected a boolean");
    return j.get<bool>();
}

inline const Json& as_array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw FormatError(path, "expected an array");
    return j;
}

inline Rational as_rational(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw FormatError(path, "expected a [numerator, denominator] pair");
    const auto num = as_int(j[0], path + "[0]");
    const auto den = as_int(j[1], path + "[1]");
    if (den == 0) throw FormatError(path, "zero denominator");
    return make_rational(num, den);
}

inline Json rational_json(const Rational& r) {
    if (!r.get_num().fits_slong_p() || !r.get_den().fits_slong_p())
        throw InputError("rational does not fit 64-bit integers: " + to_fraction_string(r));
    return Json::array({r.get_num().get_si(), r.get_den().get_si()});
}

/// Inclusive 1-based intervals of the set bits.
inline Json intervals_json(const std::vector<bool>& bits) {
    Json out = Json::array();
    const int n = static_cast<int>(bits.size());
    int t = 0;
    while (t < n) {
        if (!bits[static_cast<std::size_t>(t)]) { ++t; continue; }
        int s = t;
        while (t + 1 < n && bits[static_cast<std::size_t>(t + 1)]) ++t;
        out.push_back(Json::array({s + 1, t + 1}));
        ++t;
    }
    return out;
}

inline std::vector<bool> intervals_from(const Json& j, int n, const std::string& path) {
    std::vector<bool> bits(static_cast<std::size_t>(std::max(n, 0)), false);
    as_array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = index_path(path, i);
        if (!j[i].is_array() || j[i].size() != 2) throw FormatError(p, "expected a [from, to] interval");
        const int from = as_small(j[i][0], p + "[0]"), to = as_small(j[i][1], p + "[1]");
        if (from < 1 || to > n || from > to) throw FormatError(p, "interval outside 1.." + std::to_string(n));
        for (int t = from; t <= to; ++t) bits[static_cast<std::size_t>(t - 1)] = true;
    }
    return bits;
}

inline Json id_list(const std::vector<bool>& bits) {
    Json out = Json::array();
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) out.push_back(static_cast<int>(i) + 1);
    return out;
}

inline std::vector<bool> ids_from(const Json& j, int n, const std::string& path) {
    std::vector<bool> bits(static_cast<std::size_t>(std::max(n, 0)), false);
    as_array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const int id = as_small(j[i], index_path(path, i));
        if (id < 1 || id > n) throw FormatError(index_path(path, i), "id outside 1.." + std::to_string(n));
        bits[static_cast<std::size_t>(id - 1)] = true;
    }
    return bits;
}

inline Json parse_json(std::string_view bytes) {
    try {
        return Json::parse(bytes.begin(), bytes.end());
    } catch (const nlohmann::json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte, bytes.size());
        const auto line = 1 + std::count(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(pos > 0 ? pos - 1 : 0), '\n');
        throw FormatError("line " + std::to_string(line), "malformed JSON");
    }
}

inline void check_header(Obj& doc, const std::string& kind) {
    const auto schema = as_string(doc.at("schema"), "schema");
    if (schema != schema_version) throw FormatError("schema", "unsupported schema version '" + schema + "'");
    const auto k = as_string(doc.at("kind"), "kind");
    if (k != kind) throw FormatError("kind", "expected '" + kind + "', found '" + k + "'");
}

inline Json header(const std::string& kind) {
    Json j;
    j["schema"] = schema_version;
    j["kind"] = kind;
    return j;
}

inline Json point_json(const Point& p) { return Json::array({rational_json(p.x), rational_json(p.y)}); }

inline Point point_from(const Json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2) throw FormatError(path, "expected [x, y]");
    return {as_rational(j[0], path + "[0]"), as_rational(j[1], path + "[1]")};
}

inline Json priorities_json(const PriorityStructure& ps) {
    Json j;
    j["levels"] = ps.levels;
    j["classes"] = ps.classes;
    Json sigma = Json::array();
    for (const auto& [p, value] : ps.sigma) {
        Json s;
        s["pair"] = Json::array({p, p + 1});
        s["value"] = rational_json(value);
        sigma.push_back(s);
    }
    j["sigma"] = sigma;
    return j;
}

inline PriorityStructure priorities_from(const Json& j, const std::string& path) {
    Obj o(j, path);
    PriorityStructure ps;
    ps.levels = as_small(o.at("levels"), o.path("levels"));
    const auto& classes = as_array(o.at("classes"), o.path("classes"));
    ps.classes.clear();
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const auto p = index_path(o.path("classes"), k);
        as_array(classes[k], p);
        std::vector<int> levels;
        for (std::size_t i = 0; i < classes[k].size(); ++i) levels.push_back(as_small(classes[k][i], index_path(p, i)));
        ps.classes.push_back(std::move(levels));
    }
    ps.sigma.clear();
    const auto& sigma = as_array(o.at("sigma"), o.path("sigma"));
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        const auto p = index_path(o.path("sigma"), i);
        Obj s(sigma[i], p);
        const auto& pair = s.at("pair");
        if (!pair.is_array() || pair.size() != 2) throw FormatError(s.path("pair"), "expected [p, p+1]");
        const int lo = as_small(pair[0], s.path("pair") + "[0]"), hi = as_small(pair[1], s.path("pair") + "[1]");
        if (hi != lo + 1) throw FormatError(s.path("pair"), "sigma pairs must be adjacent levels");
        if (ps.sigma.count(lo)) throw FormatError(s.path("pair"), "duplicate sigma pair");
        ps.sigma[lo] = as_rational(s.at("value"), s.path("value"));
        s.finish();
    }
    o.finish();
    return ps;
}

inline Json capabilities_json(const std::vector<Capability>& caps) {
    Json out = Json::array();
    for (const auto& c : caps) out.push_back(Json{{"id", c.id}, {"label", c.label}});
    return out;
}

inline std::vector<Capability> capabilities_from(const Json& j, const std::string& path) {
    std::vector<Capability> out;
    as_array(j, path);
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto p = index_path(path, i);
        Obj o(j[i], p);
        Capability c;
        c.id = as_small(o.at("id"), o.path("id"));
        c.label = as_string(o.at("label"), o.path("label"));
        if (c.id != static_cast<int>(i) + 1) throw FormatError(o.path("id"), "capability ids must be contiguous from 1");
        o.finish();
        out.push_back(std::move(c));
    }
    return out;
}

/// Field path for an instance defect.
inline std::string defect_path(Defect d) {
    switch (d) {
        case Defect::BadHorizon: return "horizon";
        case Defect::CapabilityIds: return "capabilities";
        case Defect::VolunteerIds:
        case Defect::VolunteerCapabilityLength:
        case Defect::VolunteerAvailabilityLength:
        case Defect::NegativeTravel:
        case Defect::BadWorkedOffset:
        case Defect::BadContinuingRun: return "volunteers";
        case Defect::ActivityIds:
        case Defect::ActivityCapability:
        case Defect::ActivityPriority:
        case Defect::ActivityDemand:
        case Defect::ActivityWindowLength: return "activities";
        case Defect::PriorityLevels: return "priorities.levels";
        case Defect::EmptyClass:
        case Defect::ClassesNotDisjoint:
        case Defect::ClassesIncomplete:
        case Defect::ClassesUnordered: return "priorities.classes";
        case Defect::MissingSigma:
        case Defect::NonPositiveSigma:
        case Defect::StraySigma: return "priorities.sigma";
        case Defect::MinRunBelowOne:
        case Defect::MinRunExceedsMaxWork:
        case Defect::MaxWorkExceedsHorizon:
        case Defect::NonPositiveSpeed:
        case Defect::WeightsLength:
        case Defect::WeightsNotDecreasing: return "constants";
        case Defect::PriorRunOutOfRange:
        case Defect::PriorAssignmentInfeasible: return "prior_runs";
    }
    return {};
}

}  // namespace detail

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Instances
// ---------------------------------------------------------------------------

inline Json instance_json(const Instance& inst) {
    using namespace detail;
    Json j = header("instance");
    j["meta"] = Json{{"label", inst.meta.label}, {"index", inst.meta.index}, {"absolute_start", inst.meta.absolute_start}};
    j["horizon"] = Json{{"num_slots", inst.horizon.num_slots}, {"slot_minutes", inst.horizon.slot_minutes}};
    Json k;
    k["min_run"] = inst.constants.min_run;
    k["max_work"] = inst.constants.max_work;
    k["travel_speed_kmh"] = rational_json(inst.constants.travel_speed_kmh);
    if (inst.constants.weights == default_weights(inst.num_slots())) {
        k["weights"] = "default";
    } else {
        Json w = Json::array();
        for (const auto& r : inst.constants.weights) w.push_back(rational_json(r));
        k["weights"] = w;
    }
    j["constants"] = k;
    j["priorities"] = priorities_json(inst.priorities);
    j["capabilities"] = capabilities_json(inst.capabilities);

    Json vols = Json::array();
    for (const auto& v : inst.volunteers) {
        Json o;
        o["id"] = v.id;
        o["capabilities"] = id_list(v.capabilities);
        o["availability"] = intervals_json(v.availability);
        o["initial_travel"] = v.initial_travel;
        if (!v.travel_overrides.empty()) {
            Json tr = Json::array();
            for (const auto& [a, s] : v.travel_overrides) tr.push_back(Json::array({a + 1, s}));
            o["travel_overrides"] = tr;
        }
        if (v.worked_offset != 0) o["worked_offset"] = v.worked_offset;
        if (v.continuing.slots > 0) o["continuing"] = Json{{"activity", v.continuing.activity + 1}, {"slots", v.continuing.slots}};
        vols.push_back(o);
    }
    j["volunteers"] = vols;

    Json acts = Json::array();
    for (const auto& a : inst.activities) {
        Json o;
        o["id"] = a.id;
        o["task_id"] = a.task_id;
        o["label"] = a.label;
        o["capability"] = a.capability + 1;
        o["priority"] = a.priority;
        o["demand"] = a.demand;
        o["window"] = intervals_json(a.window);
        o["location"] = point_json(a.location);
        acts.push_back(o);
    }
    j["activities"] = acts;

    Json prior = Json::array();
    for (const auto& r : inst.prior_runs)
        prior.push_back(Json::array({r.volunteer + 1, r.activity + 1, r.start + 1, r.end + 1}));
    j["prior_runs"] = prior;
    return j;
}

inline std::string write_instance(const Instance& inst) { return dump(instance_json(inst)); }

/// Structure only; no semantic validation.
inline Instance instance_from_json(const Json& j, const std::string& base = {}) {
    using namespace detail;
    Obj doc(j, base);
    check_header(doc, "instance");
    Instance inst;

    if (doc.has("meta")) {
        Obj m(doc.at("meta"), doc.path("meta"));
        inst.meta.label = as_string(m.at("label"), m.path("label"));
        inst.meta.index = as_small(m.at("index"), m.path("index"));
        inst.meta.absolute_start = as_small(m.at("absolute_start"), m.path("absolute_start"));
        m.finish();
    }

    {
        Obj h(doc.at("horizon"), doc.path("horizon"));
        inst.horizon.num_slots = as_small(h.at("num_slots"), h.path("num_slots"));
        inst.horizon.slot_minutes = as_small(h.at("slot_minutes"), h.path("slot_minutes"));
        if (inst.horizon.num_slots < 1 || inst.horizon.num_slots > 100000) throw FormatError(h.path("num_slots"), "out of range");
        h.finish();
    }
    const int T = inst.num_slots();

    {
        Obj k(doc.at("constants"), doc.path("constants"));
        inst.constants.min_run = as_small(k.at("min_run"), k.path("min_run"));
        inst.constants.max_work = as_small(k.at("max_work"), k.path("max_work"));
        inst.constants.travel_speed_kmh = as_rational(k.at("travel_speed_kmh"), k.path("travel_speed_kmh"));
        const auto& w = k.at("weights");
        if (w.is_string()) {
            if (w.get<std::string>() != "default") throw FormatError(k.path("weights"), "expected \"default\" or a list");
            inst.constants.weights = default_weights(T);
        } else {
            as_array(w, k.path("weights"));
            for (std::size_t i = 0; i < w.size(); ++i)
                inst.constants.weights.push_back(as_rational(w[i], index_path(k.path("weights"), i)));
        }
        k.finish();
    }

    inst.priorities = priorities_from(doc.at("priorities"), doc.path("priorities"));
    inst.capabilities = capabilities_from(doc.at("capabilities"), doc.path("capabilities"));
    const int C = inst.num_capabilities();

    const auto& acts = as_array(doc.at("activities"), doc.path("activities"));
    const int A = static_cast<int>(acts.size());
    const auto& vols = as_array(doc.at("volunteers"), doc.path("volunteers"));
    for (std::size_t i = 0; i < vols.size(); ++i) {
        Obj o(vols[i], index_path(doc.path("volunteers"), i));
        Volunteer v;
        v.id = as_small(o.at("id"), o.path("id"));
        v.capabilities = ids_from(o.at("capabilities"), C, o.path("capabilities"));
        v.availability = intervals_from(o.at("availability"), T, o.path("availability"));
        v.initial_travel = as_small(o.at("initial_travel"), o.path("initial_travel"));
        if (o.has("travel_overrides")) {
            const auto& tr = as_array(o.at("travel_overrides"), o.path("travel_overrides"));
            for (std::size_t n = 0; n < tr.size(); ++n) {
                const auto p = index_path(o.path("travel_overrides"), n);
                if (!tr[n].is_array() || tr[n].size() != 2) throw FormatError(p, "expected [activity, slots]");
                const int a = as_small(tr[n][0], p + "[0]");
                if (a < 1 || a > A) throw FormatError(p, "activity outside 1.." + std::to_string(A));
                v.travel_overrides[a - 1] = as_small(tr[n][1], p + "[1]");
            }
        }
        if (o.has("worked_offset")) v.worked_offset = as_small(o.at("worked_offset"), o.path("worked_offset"));
        if (o.has("continuing")) {
            Obj c(o.at("continuing"), o.path("continuing"));
            const int a = as_small(c.at("activity"), c.path("activity"));
            if (a < 1 || a > A) throw FormatError(c.path("activity"), "activity outside 1.." + std::to_string(A));
            v.continuing = {a - 1, as_small(c.at("slots"), c.path("slots"))};
            if (v.continuing.slots < 1) throw FormatError(c.path("slots"), "must be >= 1");
            c.finish();
        }
        o.finish();
        inst.volunteers.push_back(std::move(v));
    }

    for (std::size_t i = 0; i < acts.size(); ++i) {
        Obj o(acts[i], index_path(doc.path("activities"), i));
        TaskActivity a;
        a.id = as_small(o.at("id"), o.path("id"));
        a.task_id = as_small(o.at("task_id"), o.path("task_id"));
        a.label = as_string(o.at("label"), o.path("label"));
        const int cap = as_small(o.at("capability"), o.path("capability"));
        if (cap < 1 || cap > C) throw FormatError(o.path("capability"), "capability outside 1.." + std::to_string(C));
        a.capability = cap - 1;
        a.priority = as_small(o.at("priority"), o.path("priority"));
        a.demand = as_small(o.at("demand"), o.path("demand"));
        a.window = intervals_from(o.at("window"), T, o.path("window"));
        a.location = point_from(o.at("location"), o.path("location"));
        o.finish();
        inst.activities.push_back(std::move(a));
    }

    const auto& prior = as_array(doc.at("prior_runs"), doc.path("prior_runs"));
    for (std::size_t i = 0; i < prior.size(); ++i) {
        const auto p = index_path(doc.path("prior_runs"), i);
        if (!prior[i].is_array() || prior[i].size() != 4) throw FormatError(p, "expected [volunteer, activity, start, end]");
        Run r{as_small(prior[i][0], p + "[0]") - 1, as_small(prior[i][1], p + "[1]") - 1, as_small(prior[i][2], p + "[2]") - 1,
              as_small(prior[i][3], p + "[3]") - 1};
        if (r.volunteer < 0 || r.volunteer >= inst.num_volunteers() || r.activity < 0 || r.activity >= A || r.start < 0 ||
            r.end >= T || r.start > r.end)
            throw FormatError(p, "run out of range");
        inst.prior_runs.push_back(r);
    }
    doc.finish();
    return inst;
}

/// Parses and validates; the first defect becomes a FormatError at its field.
inline Instance read_instance(std::string_view bytes) {
    Instance inst = instance_from_json(detail::parse_json(bytes));
    if (auto defects = validate_instance(inst); !defects.empty())
        throw FormatError(detail::defect_path(defects.front().code), defects.front().message);
    return inst;
}

// ---------------------------------------------------------------------------
// Assignments
// ---------------------------------------------------------------------------

inline std::string run_label(const Run& r) {
    return "(volunteer " + std::to_string(r.volunteer + 1) + ", activity " + std::to_string(r.activity + 1) + ", slots " +
           std::to_string(r.start + 1) + "-" + std::to_string(r.end + 1) + ")";
}

inline Json assignment_json(const Assignment& x) {
    Json j = detail::header("assignment");
    Json runs = Json::array();
    for (const auto& r : x.runs()) runs.push_back(Json::array({r.volunteer + 1, r.activity + 1, r.start + 1, r.end + 1}));
    j["runs"] = runs;
    return j;
}

inline std::string write_assignment(const Assignment& x) { return dump(assignment_json(x)); }

inline Assignment assignment_from_json(const Json& j, const Instance& inst, const std::string& base = {}) {
    using namespace detail;
    Obj doc(j, base);
    check_header(doc, "assignment");
    const auto& runs_json = as_array(doc.at("runs"), doc.path("runs"));
    doc.finish();
    std::vector<Run> runs;
    for (std::size_t i = 0; i < runs_json.size(); ++i) {
        const auto p = index_path(doc.path("runs"), i);
        const auto& e = runs_json[i];
        if (!e.is_array() || e.size() != 4) throw FormatError(p, "expected [volunteer, activity, start, end]");
        Run r{as_small(e[0], p + "[0]") - 1, as_small(e[1], p + "[1]") - 1, as_small(e[2], p + "[2]") - 1,
              as_small(e[3], p + "[3]") - 1};
        if (r.volunteer < 0 || r.volunteer >= inst.num_volunteers()) throw FormatError(p, "volunteer out of range");
        if (r.activity < 0 || r.activity >= inst.num_activities()) throw FormatError(p, "activity out of range");
        if (r.start < 0 || r.end >= inst.num_slots() || r.start > r.end) throw FormatError(p, "slots out of range");
        runs.push_back(r);
    }
    auto order = runs;
    std::stable_sort(order.begin(), order.end(), [](const Run& l, const Run& r) {
        return std::tie(l.volunteer, l.start) < std::tie(r.volunteer, r.start);
    });
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        // any overlap for a volunteer shows up between start-sorted neighbours
        for (std::size_t k = i + 1; k < order.size() && order[k].volunteer == order[i].volunteer; ++k) {
            if (order[k].start > order[i].end) break;
            throw FormatError(doc.path("runs"), "runs " + run_label(order[i]) + " and " + run_label(order[k]) + " overlap");
        }
    }
    Assignment x(inst);
    for (const auto& r : runs) x.assign_run(r);
    for (const auto& r : x.runs())
        if (svcp::detail::effective_length(inst, r) < inst.constants.min_run)
            throw FormatError(doc.path("runs"), "run " + run_label(r) + " shorter than tau_min");
    return x;
}

inline Assignment read_assignment(std::string_view bytes, const Instance& inst) {
    return assignment_from_json(detail::parse_json(bytes), inst);
}

// ---------------------------------------------------------------------------
// Catalog and scenarios
// ---------------------------------------------------------------------------

inline Json catalog_body(const Catalog& cat) {
    using namespace detail;
    Json j;
    j["capabilities"] = capabilities_json(cat.capabilities);
    Json types = Json::array();
    for (const auto& t : cat.activity_types)
        types.push_back(Json{{"id", t.id}, {"label", t.label}, {"capability", t.capability}});
    j["activity_types"] = types;
    Json tasks = Json::array();
    for (const auto& t : cat.tasks) {
        Json o;
        o["id"] = t.task_id;
        o["priority"] = t.priority;
        o["location"] = point_json(t.location);
        Json acts = Json::array();
        for (const auto& a : t.activities)
            acts.push_back(Json{{"type", a.type}, {"label", a.label}, {"capability", a.capability}, {"demand", a.demand}});
        o["activities"] = acts;
        tasks.push_back(o);
    }
    j["tasks"] = tasks;
    return j;
}

inline Catalog catalog_from(detail::Obj& o) {
    using namespace detail;
    Catalog cat;
    cat.capabilities = capabilities_from(o.at("capabilities"), o.path("capabilities"));
    const auto& types = as_array(o.at("activity_types"), o.path("activity_types"));
    for (std::size_t i = 0; i < types.size(); ++i) {
        Obj t(types[i], index_path(o.path("activity_types"), i));
        cat.activity_types.push_back({as_small(t.at("id"), t.path("id")), as_string(t.at("label"), t.path("label")),
                                      as_small(t.at("capability"), t.path("capability"))});
        t.finish();
    }
    const auto& tasks = as_array(o.at("tasks"), o.path("tasks"));
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        Obj t(tasks[i], index_path(o.path("tasks"), i));
        TaskCatalogEntry e;
        e.task_id = as_small(t.at("id"), t.path("id"));
        e.priority = as_small(t.at("priority"), t.path("priority"));
        e.location = point_from(t.at("location"), t.path("location"));
        const auto& acts = as_array(t.at("activities"), t.path("activities"));
        for (std::size_t k = 0; k < acts.size(); ++k) {
            Obj a(acts[k], index_path(t.path("activities"), k));
            e.activities.push_back({as_small(a.at("type"), a.path("type")), as_string(a.at("label"), a.path("label")),
                                    as_small(a.at("capability"), a.path("capability")),
                                    as_small(a.at("demand"), a.path("demand"))});
            a.finish();
        }
        t.finish();
        cat.tasks.push_back(std::move(e));
    }
    if (auto errors = validate_catalog(cat); !errors.empty()) throw FormatError(o.path("tasks"), errors.front());
    return cat;
}

inline std::string write_catalog(const Catalog& cat) {
    Json j = detail::header("catalog");
    const Json body = catalog_body(cat);
    for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
    return dump(j);
}

inline Catalog read_catalog(std::string_view bytes) {
    const Json j = detail::parse_json(bytes);
    detail::Obj doc(j, {});
    detail::check_header(doc, "catalog");
    Catalog cat = catalog_from(doc);
    doc.finish();
    return cat;
}

inline Json config_json(const ScenarioConfig& c) {
    using namespace detail;
    Json j;
    j["scenario_id"] = c.scenario_id;
    j["max_volunteers"] = c.max_volunteers;
    j["added_tasks_per_instance"] = c.added_tasks_per_instance;
    j["capability_probability"] = rational_json(c.capability_probability);
    j["arrival_lambda"] = c.arrival_lambda;
    j["arrival_scale"] = rational_json(c.arrival_scale);
    j["seed"] = c.seed;
    j["num_instances"] = c.num_instances;
    j["decision_interval_slots"] = c.decision_interval_slots;
    j["initial_tasks"] = c.initial_tasks;
    j["horizon"] = Json{{"num_slots", c.horizon.num_slots}, {"slot_minutes", c.horizon.slot_minutes}};
    j["min_run"] = c.min_run;
    j["max_work"] = c.max_work;
    j["initial_travel"] = c.initial_travel;
    j["travel_speed_kmh"] = rational_json(c.travel_speed_kmh);
    j["priorities"] = priorities_json(c.priorities);
    return j;
}

inline ScenarioConfig config_from(const Json& j, const std::string& path) {
    using namespace detail;
    Obj o(j, path);
    ScenarioConfig c;
    c.scenario_id = as_small(o.at("scenario_id"), o.path("scenario_id"));
    c.max_volunteers = as_small(o.at("max_volunteers"), o.path("max_volunteers"));
    c.added_tasks_per_instance = as_small(o.at("added_tasks_per_instance"), o.path("added_tasks_per_instance"));
    c.capability_probability = as_rational(o.at("capability_probability"), o.path("capability_probability"));
    c.arrival_lambda = as_small(o.at("arrival_lambda"), o.path("arrival_lambda"));
    c.arrival_scale = as_rational(o.at("arrival_scale"), o.path("arrival_scale"));
    c.seed = as_u64(o.at("seed"), o.path("seed"));
    c.num_instances = as_small(o.at("num_instances"), o.path("num_instances"));
    c.decision_interval_slots = as_small(o.at("decision_interval_slots"), o.path("decision_interval_slots"));
    c.initial_tasks = as_small(o.at("initial_tasks"), o.path("initial_tasks"));
    {
        Obj h(o.at("horizon"), o.path("horizon"));
        c.horizon.num_slots = as_small(h.at("num_slots"), h.path("num_slots"));
        c.horizon.slot_minutes = as_small(h.at("slot_minutes"), h.path("slot_minutes"));
        h.finish();
    }
    c.min_run = as_small(o.at("min_run"), o.path("min_run"));
    c.max_work = as_small(o.at("max_work"), o.path("max_work"));
    c.initial_travel = as_small(o.at("initial_travel"), o.path("initial_travel"));
    c.travel_speed_kmh = as_rational(o.at("travel_speed_kmh"), o.path("travel_speed_kmh"));
    c.priorities = priorities_from(o.at("priorities"), o.path("priorities"));
    o.finish();
    if (auto errors = validate_config(c); !errors.empty()) throw FormatError(path, errors.front());
    return c;
}

inline std::string write_scenario(const Scenario& sc) {
    using namespace detail;
    Json j = header("scenario");
    j["config"] = config_json(sc.config);
    j["catalog"] = catalog_body(sc.catalog);
    Json instances = Json::array();
    for (const auto& d : sc.deltas) {
        Json o;
        o["index"] = d.index + 1;
        o["absolute_start"] = d.absolute_start;
        o["new_tasks"] = d.new_tasks;
        Json vols = Json::array();
        for (const auto& v : d.new_volunteers)
            vols.push_back(Json::array({v.id, id_list(v.capabilities), v.available_from + 1, v.available_to + 1}));
        o["new_volunteers"] = vols;
        instances.push_back(o);
    }
    j["instances"] = instances;
    return dump(j);
}

inline Scenario read_scenario(std::string_view bytes) {
    using namespace detail;
    const Json j = parse_json(bytes);
    Obj doc(j, {});
    check_header(doc, "scenario");
    Scenario sc;
    sc.config = config_from(doc.at("config"), "config");
    {
        Obj cat(doc.at("catalog"), "catalog");
        sc.catalog = catalog_from(cat);
        cat.finish();
    }
    const int C = static_cast<int>(sc.catalog.capabilities.size());
    const auto& instances = as_array(doc.at("instances"), "instances");
    std::set<int> seen_tasks;
    int next_volunteer = 1;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        Obj o(instances[i], index_path("instances", i));
        InstanceDelta d;
        d.index = as_small(o.at("index"), o.path("index")) - 1;
        if (d.index != static_cast<int>(i)) throw FormatError(o.path("index"), "instances must be numbered 1..N in order");
        d.absolute_start = as_small(o.at("absolute_start"), o.path("absolute_start"));
        const auto& tasks = as_array(o.at("new_tasks"), o.path("new_tasks"));
        for (std::size_t k = 0; k < tasks.size(); ++k) {
            const int id = as_small(tasks[k], index_path(o.path("new_tasks"), k));
            find_task(sc.catalog, id);
            if (!seen_tasks.insert(id).second) throw FormatError(index_path(o.path("new_tasks"), k), "task added twice");
            d.new_tasks.push_back(id);
        }
        const auto& vols = as_array(o.at("new_volunteers"), o.path("new_volunteers"));
        for (std::size_t k = 0; k < vols.size(); ++k) {
            const auto p = index_path(o.path("new_volunteers"), k);
            if (!vols[k].is_array() || vols[k].size() != 4) throw FormatError(p, "expected [id, capabilities, from, to]");
            VolunteerArrival va;
            va.id = as_small(vols[k][0], p + "[0]");
            if (va.id != next_volunteer++) throw FormatError(p, "volunteer ids must be contiguous");
            va.capabilities = ids_from(vols[k][1], C, p + "[1]");
            va.available_from = as_small(vols[k][2], p + "[2]") - 1;
            va.available_to = as_small(vols[k][3], p + "[3]") - 1;
            if (va.available_from < 0 || va.available_to < va.available_from) throw FormatError(p, "bad availability");
            d.new_volunteers.push_back(std::move(va));
        }
        o.finish();
        sc.deltas.push_back(std::move(d));
    }
    if (static_cast<int>(sc.deltas.size()) != sc.config.num_instances)
        throw FormatError("instances", "expected " + std::to_string(sc.config.num_instances) + " instances");
    doc.finish();
    return sc;
}

// ---------------------------------------------------------------------------
// Result and gap CSV
// ---------------------------------------------------------------------------

struct ResultRow {
    int scenario = 0;
    std::uint64_t seed = 0;
    int instance = 0;  // 1-based
    std::string solver;
    ObjectiveVector objective;
    long wall_us = 0;
    long evaluations = 0;
    bool feasible = false;
};

namespace detail {

/// Objective columns for up to K classes: of1..ofK (of1 = top class), then
/// the two imbalance terms. Rows with fewer classes leave the tail blank.
inline std::vector<std::string> objective_names(int K) {
    std::vector<std::string> out;
    for (int k = 1; k <= K; ++k) out.push_back("of" + std::to_string(k));
    out.push_back("of_intra");
    out.push_back("of_inter");
    return out;
}

/// Entries aligned to objective_names(K); nullopt for classes the row lacks.
inline std::vector<std::optional<Rational>> aligned(const ObjectiveVector& v, int K) {
    std::vector<std::optional<Rational>> out(static_cast<std::size_t>(K) + 2);
    for (std::size_t k = 0; k < v.priority_values.size(); ++k) out[k] = v.priority_values[k];
    out[static_cast<std::size_t>(K)] = v.intra_class_imbalance;
    out[static_cast<std::size_t>(K) + 1] = v.inter_activity_imbalance;
    return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    throw InputError("CSV field may not contain separators: " + s);
}

inline int max_classes(const std::vector<ResultRow>& rows) {
    int K = 1;
    for (const auto& r : rows) K = std::max(K, r.objective.num_classes());
    return K;
}

}  // namespace detail

/// Header plus one line per row; the header carries as many class columns
/// as the row with the most priority classes.
inline std::string write_results(const std::vector<ResultRow>& rows) {
    const int K = detail::max_classes(rows);
    std::ostringstream os;
    os << "scenario,seed,instance,solver,num_classes";
    for (const auto& name : detail::objective_names(K)) os << ',' << name << ',' << name << "_exact";
    os << ",wall_us,evaluations,feasible\n";
    for (const auto& r : rows) {
        os << r.scenario << ',' << r.seed << ',' << r.instance << ',' << detail::csv_field(r.solver) << ','
           << r.objective.num_classes();
        for (const auto& e : detail::aligned(r.objective, K)) {
            if (e)
                os << ',' << to_decimal_string(*e) << ',' << to_fraction_string(*e);
            else
                os << ",,";
        }
        os << ',' << r.wall_us << ',' << r.evaluations << ',' << (r.feasible ? 1 : 0) << '\n';
    }
    return os.str();
}

inline std::vector<ResultRow> read_results(std::string_view bytes) {
    std::istringstream is{std::string(bytes)};
    std::string line;
    if (!std::getline(is, line)) throw FormatError("line 1", "missing header");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 5 || header[0] != "scenario" || header[4] != "num_classes")
        throw FormatError("line 1", "not a results file");
    const int K = (static_cast<int>(header.size()) - 8) / 2 - 2;
    if (K < 1 || static_cast<int>(header.size()) != 5 + 2 * (K + 2) + 3) throw FormatError("line 1", "unexpected column count");
    std::vector<ResultRow> rows;
    int n = 1;
    while (std::getline(is, line)) {
        ++n;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        const std::string where = "line " + std::to_string(n);
        if (f.size() != header.size()) throw FormatError(where, "wrong number of fields");
        try {
            ResultRow r;
            r.scenario = std::stoi(f[0]);
            r.seed = std::stoull(f[1]);
            r.instance = std::stoi(f[2]);
            r.solver = f[3];
            const int k_row = std::stoi(f[4]);
            if (k_row < 1 || k_row > K) throw FormatError(where, "class count outside 1.." + std::to_string(K));
            auto exact = [&](int col) { return parse_rational(f[static_cast<std::size_t>(6 + 2 * col)]); };
            for (int k = 0; k < k_row; ++k) r.objective.priority_values.push_back(exact(k));
            r.objective.intra_class_imbalance = exact(K);
            r.objective.inter_activity_imbalance = exact(K + 1);
            const std::size_t tail = 5 + 2 * static_cast<std::size_t>(K + 2);
            r.wall_us = std::stol(f[tail]);
            r.evaluations = std::stol(f[tail + 1]);
            r.feasible = f[tail + 2] == "1";
            rows.push_back(std::move(r));
        } catch (const FormatError&) {
            throw;
        } catch (const std::exception&) {
            throw FormatError(where, "unreadable field");
        }
    }
    return rows;
}

/// Linear-interpolation quantile (the usual "type 7") over sorted values.
inline Rational quantile(std::vector<Rational> values, const Rational& q) {
    if (values.empty()) throw InputError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const Rational pos = q * static_cast<long>(values.size() - 1);
    mpz_class lo_z = pos.get_num() / pos.get_den();
    const long lo = lo_z.get_si();
    const Rational frac = pos - lo;
    if (lo + 1 >= static_cast<long>(values.size())) return values.back();
    return values[static_cast<std::size_t>(lo)] + frac * (values[static_cast<std::size_t>(lo) + 1] - values[static_cast<std::size_t>(lo)]);
}

struct GapOutcome {
    std::string csv;
    std::vector<std::string> unmatched;  // keys present on only one side or with different class counts
};

/// Joins heuristic and reference rows on (scenario, seed, instance); one gap
/// row per match, then q1, median and q3 rows per scenario computed over the
/// unflagged gaps of each objective column.
inline GapOutcome gap_table(const std::vector<ResultRow>& heuristic, const std::vector<ResultRow>& reference,
                            const Rational& epsilon = default_gap_epsilon()) {
    using Key = std::tuple<int, std::uint64_t, int>;
    std::map<Key, const ResultRow*> ref;
    for (const auto& r : reference) ref[{r.scenario, r.seed, r.instance}] = &r;
    std::map<Key, const ResultRow*> heur;
    for (const auto& r : heuristic) heur[{r.scenario, r.seed, r.instance}] = &r;

    GapOutcome out;
    auto key_name = [](const Key& k) {
        return "scenario " + std::to_string(std::get<0>(k)) + " seed " + std::to_string(std::get<1>(k)) + " instance " +
               std::to_string(std::get<2>(k));
    };
    for (const auto& [k, r] : heur)
        if (!ref.count(k)) out.unmatched.push_back(key_name(k) + " missing from reference");
    for (const auto& [k, r] : ref)
        if (!heur.count(k)) out.unmatched.push_back(key_name(k) + " missing from heuristic");

    const int K = std::max(detail::max_classes(heuristic), detail::max_classes(reference));
    const std::size_t columns = static_cast<std::size_t>(K) + 2;
    std::map<int, std::vector<std::vector<Rational>>> per_scenario;  // scenario -> column -> gaps
    std::ostringstream body;
    for (const auto& [k, h] : heur) {
        auto it = ref.find(k);
        if (it == ref.end()) continue;
        if (h->objective.num_classes() != it->second->objective.num_classes()) {
            out.unmatched.push_back(key_name(k) + " has different class counts");
            continue;
        }
        const GapReport g = relative_gap(h->objective, it->second->objective, epsilon);
        ObjectiveVector gv;
        gv.priority_values.assign(g.gaps.begin(), g.gaps.end() - 2);
        gv.intra_class_imbalance = g.gaps[g.gaps.size() - 2];
        gv.inter_activity_imbalance = g.gaps.back();
        std::vector<std::optional<bool>> flags(columns);
        for (int c = 0; c < g.num_classes; ++c) flags[static_cast<std::size_t>(c)] = g.near_zero[static_cast<std::size_t>(c)];
        flags[columns - 2] = g.near_zero[g.near_zero.size() - 2];
        flags[columns - 1] = g.near_zero.back();

        body << "row," << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k);
        auto& bucket = per_scenario[std::get<0>(k)];
        bucket.resize(columns);
        const auto values = detail::aligned(gv, K);
        for (std::size_t c = 0; c < columns; ++c) {
            if (!values[c]) {
                body << ",,,";
                continue;
            }
            body << ',' << to_decimal_string(*values[c]) << ',' << to_fraction_string(*values[c]) << ',' << (*flags[c] ? 1 : 0);
            if (!*flags[c]) bucket[c].push_back(*values[c]);
        }
        body << '\n';
    }
    for (const auto& [scenario, buckets] : per_scenario) {
        const std::pair<const char*, Rational> stats[] = {
            {"q1", make_rational(1, 4)}, {"median", make_rational(1, 2)}, {"q3", make_rational(3, 4)}};
        for (const auto& [name, q] : stats) {
            body << name << ',' << scenario << ",,";
            for (const auto& values : buckets) {
                if (values.empty()) {
                    body << ",,,";
                    continue;
                }
                const Rational v = quantile(values, q);
                body << ',' << to_decimal_string(v) << ',' << to_fraction_string(v) << ',';
            }
            body << '\n';
        }
    }
    std::ostringstream os;
    os << "kind,scenario,seed,instance";
    for (const auto& name : detail::objective_names(K)) os << ",gap_" << name << ",gap_" << name << "_exact,near_zero_" << name;
    os << '\n' << body.str();
    out.csv = os.str();
    return out;
}

}  // namespace svcp::io
