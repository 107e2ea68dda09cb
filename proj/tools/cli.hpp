#pragma once

#include "svcp/bench.hpp"
#include "svcp/io.hpp"
#include "svcp/svcp.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#ifndef SVCP_VERSION
#define SVCP_VERSION "0.0.0"
#endif

namespace svcp::cli {

namespace fs = std::filesystem;
using io::Json;

enum Exit : int { ok = 0, usage = 1, data_defect = 2, refused = 3 };

inline const std::string tool_version = std::string("svcp ") + SVCP_VERSION;
inline constexpr const char* out_placeholder = "<out>";

/// Thrown inside a command to stop with a given exit code after printing.
struct CommandFailure : std::runtime_error {
    CommandFailure(Exit c, const std::string& message) : std::runtime_error(message), code(c) {}
    Exit code;
};

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw CommandFailure(data_defect, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, const std::string& bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw CommandFailure(data_defect, "cannot write " + p.string());
    out << bytes;
}

/// Number of worker threads: hardware concurrency, capped by SVCP_THREADS.
inline unsigned worker_count(std::size_t jobs) {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SVCP_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        } catch (const std::exception&) {
        }
    }
    return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

/// Runs job(i) for i in [0, n) on worker threads. The first failure in index
/// order is rethrown once every job has finished.
template <class Job>
void parallel_for(std::size_t n, const Job& job) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                job(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned w = worker_count(n);
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < w; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Output {
    std::string name;  // relative to the output directory
    std::string bytes;
    bool deterministic = true;
};

struct Manifest {
    std::vector<std::string> command;  // canonical arguments, output dir as <out>
    Json config;
    std::vector<std::uint64_t> seeds;
    std::vector<Output> outputs;
};

inline std::string manifest_text(const Manifest& m) {
    Json j = io::detail::header("manifest");
    j["tool_version"] = tool_version;
    j["command"] = m.command;
    j["config_hash"] = io::hex64(io::fnv1a64(m.config.dump()));
    j["config"] = m.config;
    j["seeds"] = m.seeds;
    Json outs = Json::array();
    for (const auto& o : m.outputs)
        outs.push_back(Json{{"path", o.name}, {"fnv1a64", io::hex64(io::fnv1a64(o.bytes))}, {"deterministic", o.deterministic}});
    j["outputs"] = outs;
    return io::dump(j);
}

/// Writes the outputs and manifest.json into `dir`.
inline void publish(const fs::path& dir, const Manifest& m) {
    fs::create_directories(dir);
    for (const auto& o : m.outputs) write_file(dir / o.name, o.bytes);
    write_file(dir / "manifest.json", manifest_text(m));
}

inline std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

inline std::string two_digits(int n) {
    std::ostringstream os;
    os << std::setw(2) << std::setfill('0') << n;
    return os.str();
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string design = "single";
    int volunteers = 5000;
    int tasks = 1;
    std::string capprob = "0.3";
    int lambda = 7;
    int seeds = 1;
    std::uint64_t first_seed = 1;
    int instances = 20;
    int volunteer_cap = 0;  // 0 = no cap
    std::string out;
};

inline std::string scenario_file(const ScenarioConfig& c) {
    return "scenario_" + two_digits(c.scenario_id) + "_seed_" + std::to_string(c.seed) + ".json";
}

inline std::vector<ScenarioConfig> generate_configs(const GenerateArgs& a) {
    std::vector<ScenarioConfig> base;
    if (a.design == "full") {
        base = design_configs();
    } else {
        ScenarioConfig c;
        c.max_volunteers = a.volunteers;
        c.added_tasks_per_instance = a.tasks;
        c.capability_probability = parse_rational(a.capprob);
        c.arrival_lambda = a.lambda;
        c.scenario_id = design_row(c);
        base.push_back(c);
    }
    std::vector<ScenarioConfig> out;
    for (const auto& b : base)
        for (int s = 0; s < a.seeds; ++s) {
            ScenarioConfig c = b;
            c.seed = a.first_seed + static_cast<std::uint64_t>(s);
            c.num_instances = a.instances;
            if (a.volunteer_cap > 0) c.max_volunteers = std::min(c.max_volunteers, a.volunteer_cap);
            out.push_back(c);
        }
    return out;
}

inline Manifest cmd_generate(const GenerateArgs& a) {
    const auto configs = generate_configs(a);
    std::vector<Output> outputs(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) {
        outputs[i] = {scenario_file(configs[i]), io::write_scenario(generate_scenario(configs[i])), true};
    });
    Manifest m;
    m.command = {"generate", "--design", a.design, "--volunteers", std::to_string(a.volunteers), "--tasks",
                 std::to_string(a.tasks), "--capprob", a.capprob, "--lambda", std::to_string(a.lambda), "--seeds",
                 std::to_string(a.seeds), "--seed", std::to_string(a.first_seed), "--instances",
                 std::to_string(a.instances), "--volunteer-cap", std::to_string(a.volunteer_cap), "--out", out_placeholder};
    m.config = Json::array();
    for (const auto& c : configs) {
        m.config.push_back(io::config_json(c));
        m.seeds.push_back(c.seed);
    }
    m.outputs = std::move(outputs);
    return m;
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

struct SolveArgs {
    std::vector<std::string> inputs;
    std::vector<std::string> solvers{"heuristic"};
    bool trace = false;
    bool no_timing = false;
    std::string out;
};

struct SolveJob {
    std::size_t input = 0;
    std::string solver;
};

struct SolveJobResult {
    std::vector<io::ResultRow> rows;
    std::vector<Output> outputs;
    std::vector<std::string> infeasible;  // messages
    std::exception_ptr failure;           // solver refusal, kept to report after writing partial results
    std::uint64_t seed = 0;
    bool is_scenario = false;
};

inline std::string trace_header() { return "instance,iteration,class,activity,slot,assigned,volunteer,start,end,evaluations\n"; }

inline void append_trace(std::string& csv, int instance, const std::vector<TraceStep>& trace) {
    std::ostringstream os;
    for (const auto& s : trace) {
        os << instance << ',' << s.iteration << ',' << s.priority_class << ',' << s.activity + 1 << ',' << s.slot + 1 << ','
           << (s.assigned ? 1 : 0) << ',';
        if (s.assigned)
            os << s.chosen.volunteer + 1 << ',' << s.chosen.start + 1 << ',' << s.chosen.end + 1;
        else
            os << ",,";
        os << ',' << s.evaluations << '\n';
    }
    csv += os.str();
}

inline std::string violations_text(const std::vector<Violation>& vs) {
    std::string out;
    for (const auto& v : vs) out += (out.empty() ? "" : "; ") + v.describe();
    return out;
}

/// Runs one solver over one instance, optionally recording the trace.
inline SolverOutput run_solver(const std::string& solver, const Instance& inst, std::vector<TraceStep>* trace) {
    if (solver == "oracle") return {solve_exact(inst).assignment, 0};
    SolveOptions opt;
    opt.record_trace = trace != nullptr;
    auto r = solve(inst, opt);
    if (trace) *trace = std::move(r.trace);
    return {std::move(r.assignment), r.evaluations};
}

inline SolveJobResult solve_job(const SolveArgs& a, const SolveJob& job, const std::string& bytes) {
    SolveJobResult res;
    const std::string stem = fs::path(a.inputs[job.input]).stem().string() + "." + job.solver;
    const Json doc = io::detail::parse_json(bytes);
    const std::string kind = doc.is_object() && doc.contains("kind") && doc["kind"].is_string() ? doc["kind"].get<std::string>() : "";
    std::string trace_csv = trace_header();

    if (kind == "scenario") {
        res.is_scenario = true;
        const Scenario sc = io::read_scenario(bytes);
        res.seed = sc.config.seed;
        int step_no = 0;
        const Solver solver = [&](const Instance& inst) {
            ++step_no;
            std::vector<TraceStep> trace;
            auto out = run_solver(job.solver, inst, a.trace ? &trace : nullptr);
            if (a.trace) append_trace(trace_csv, step_no, trace);
            return out;
        };
        const auto rolled = roll_horizon(sc, solver, [&](const Instance& inst, const RollingStep& step) {
            const int n = step.index + 1;
            res.outputs.push_back({stem + ".i" + two_digits(n) + ".assignment.json", io::write_assignment(step.assignment), true});
            if (!step.feasible)
                res.infeasible.push_back(stem + " instance " + std::to_string(n) + ": " +
                                         violations_text(check_feasibility(inst, step.assignment)));
            res.rows.push_back({sc.config.scenario_id, sc.config.seed, n, job.solver, step.objective,
                                a.no_timing ? 0 : step.wall_us, step.evaluations, step.feasible});
        }, false);
        if (!rolled.completed) res.failure = rolled.failure;
    } else {
        const Instance inst = io::read_instance(bytes);
        std::vector<TraceStep> trace;
        const auto t0 = std::chrono::steady_clock::now();
        SolverOutput out;
        try {
            out = run_solver(job.solver, inst, a.trace ? &trace : nullptr);
        } catch (const RefusalError&) {
            res.failure = std::current_exception();
            return res;
        } catch (const ResourceError&) {
            res.failure = std::current_exception();
            return res;
        }
        const auto t1 = std::chrono::steady_clock::now();
        const auto violations = check_feasibility(inst, out.assignment);
        if (!violations.empty()) res.infeasible.push_back(stem + ": " + violations_text(violations));
        const int n = static_cast<int>(job.input) + 1;
        res.rows.push_back({0, 0, n, job.solver, objective_vector(inst, out.assignment),
                            a.no_timing ? 0 : static_cast<long>(std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count()),
                            out.evaluations, violations.empty()});
        res.outputs.push_back({stem + ".assignment.json", io::write_assignment(out.assignment), true});
        if (a.trace) append_trace(trace_csv, n, trace);
    }
    if (a.trace) res.outputs.push_back({stem + ".trace.csv", trace_csv, true});
    return res;
}

struct SolveOutcome {
    Manifest manifest;
    std::vector<std::string> infeasible;
    std::exception_ptr failure;
};

inline SolveOutcome cmd_solve(const SolveArgs& a) {
    std::vector<std::string> bytes;
    for (const auto& p : a.inputs) bytes.push_back(read_file(p));
    std::vector<SolveJob> jobs;
    for (std::size_t i = 0; i < a.inputs.size(); ++i)
        for (const auto& s : a.solvers) jobs.push_back({i, s});
    std::vector<SolveJobResult> results(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) { results[i] = solve_job(a, jobs[i], bytes[jobs[i].input]); });

    SolveOutcome outcome;
    Manifest& m = outcome.manifest;
    m.command = {"solve"};
    for (const auto& s : a.solvers) {
        m.command.push_back("--solver");
        m.command.push_back(s);
    }
    if (a.trace) m.command.push_back("--trace");
    if (a.no_timing) m.command.push_back("--no-timing");
    m.command.push_back("--out");
    m.command.push_back(out_placeholder);
    Json inputs = Json::array();
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
        m.command.push_back(absolute(a.inputs[i]));
        inputs.push_back(Json{{"path", absolute(a.inputs[i])}, {"fnv1a64", io::hex64(io::fnv1a64(bytes[i]))}});
    }
    m.config = Json{{"solvers", a.solvers}, {"trace", a.trace}, {"no_timing", a.no_timing}, {"inputs", inputs}};

    std::vector<io::ResultRow> rows;
    for (auto& r : results) {
        if (r.is_scenario && std::find(m.seeds.begin(), m.seeds.end(), r.seed) == m.seeds.end()) m.seeds.push_back(r.seed);
        rows.insert(rows.end(), r.rows.begin(), r.rows.end());
        for (auto& o : r.outputs) m.outputs.push_back(std::move(o));
        outcome.infeasible.insert(outcome.infeasible.end(), r.infeasible.begin(), r.infeasible.end());
        if (r.failure && !outcome.failure) outcome.failure = r.failure;
    }
    std::stable_sort(rows.begin(), rows.end(), [](const io::ResultRow& l, const io::ResultRow& r) {
        return std::tie(l.scenario, l.seed, l.instance, l.solver) < std::tie(r.scenario, r.seed, r.instance, r.solver);
    });
    m.outputs.push_back({"results.csv", io::write_results(rows), a.no_timing});
    return outcome;
}

// ---------------------------------------------------------------------------
// gap
// ---------------------------------------------------------------------------

struct GapArgs {
    std::string heuristic;
    std::string oracle;
    std::string epsilon = "1/1000000000";
    std::string out;
};

inline std::pair<Manifest, std::vector<std::string>> cmd_gap(const GapArgs& a) {
    const std::string h = read_file(a.heuristic), o = read_file(a.oracle);
    const Rational eps = parse_rational(a.epsilon);
    if (eps <= 0) throw CommandFailure(usage, "--epsilon must be positive");
    const auto table = io::gap_table(io::read_results(h), io::read_results(o), eps);
    Manifest m;
    m.command = {"gap", "--heuristic", absolute(a.heuristic), "--oracle", absolute(a.oracle), "--epsilon", a.epsilon,
                 "--out", out_placeholder};
    m.config = Json{{"epsilon", to_fraction_string(eps)},
                    {"heuristic", io::hex64(io::fnv1a64(h))},
                    {"oracle", io::hex64(io::fnv1a64(o))}};
    m.outputs.push_back({"gaps.csv", table.csv, true});
    return {m, table.unmatched};
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string scale = "sweep";
    int repeat = 5;
    std::uint64_t seed = 1;
    int oracle_instances = 0;
    bool no_timing = false;
    std::string out;
};

struct SweepShape {
    std::vector<int> volunteers;
    int activities;
    int slots;
};

inline SweepShape sweep_shape(const std::string& scale) {
    if (scale == "small") return {{25, 50, 100, 200}, 5, 24};
    return {{250, 500, 1000, 2000}, 20, 48};
}

inline std::string format_double(double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << x;
    return os.str();
}

inline Manifest cmd_bench(const BenchArgs& a) {
    const SweepShape shape = sweep_shape(a.scale);
    const auto samples = run_sweep(shape.volunteers, shape.activities, shape.slots, a.repeat, a.seed);
    std::ostringstream os;
    os << "kind,volunteers,activities,slots,repeat,wall_us,evaluations,bound,ratio\n";
    for (const auto& s : samples)
        os << "sample," << s.volunteers << ',' << s.activities << ',' << s.slots << ',' << s.repeat + 1 << ','
           << (a.no_timing ? 0 : s.wall_us) << ',' << s.evaluations << ',' << s.bound << ",\n";
    for (int V : shape.volunteers) {
        std::vector<long> wall, evals;
        std::int64_t bound = 0;
        for (const auto& s : samples)
            if (s.volunteers == V) {
                wall.push_back(s.wall_us);
                evals.push_back(s.evaluations);
                bound = s.bound;
            }
        os << "median," << V << ',' << shape.activities << ',' << shape.slots << ",," << (a.no_timing ? 0 : median_of(wall))
           << ',' << median_of(evals) << ',' << bound << ",\n";
    }
    const auto ratios = doubling_ratios(samples, shape.volunteers);
    for (std::size_t i = 0; i < ratios.size(); ++i)
        os << "ratio," << shape.volunteers[i + 1] << ',' << shape.activities << ',' << shape.slots << ",,,,,"
           << format_double(ratios[i]) << '\n';

    Manifest m;
    m.command = {"bench", "--scale", a.scale, "--repeat", std::to_string(a.repeat), "--seed", std::to_string(a.seed),
                 "--oracle-instances", std::to_string(a.oracle_instances)};
    if (a.no_timing) m.command.push_back("--no-timing");
    m.command.push_back("--out");
    m.command.push_back(out_placeholder);
    m.config = Json{{"scale", a.scale}, {"repeat", a.repeat}, {"seed", a.seed}, {"oracle_instances", a.oracle_instances},
                    {"no_timing", a.no_timing}};
    m.seeds = {a.seed};
    m.outputs.push_back({"bench.csv", os.str(), a.no_timing});

    if (a.oracle_instances > 0) {
        const auto cmp = run_oracle_comparison(a.oracle_instances, a.seed);
        std::ostringstream oc;
        oc << "kind,seed,heuristic_us,oracle_us,oracle_states,speedup\n";
        std::vector<double> speedups;
        for (const auto& c : cmp) {
            const double sp = static_cast<double>(std::max(1L, c.oracle_us)) / static_cast<double>(std::max(1L, c.heuristic_us));
            speedups.push_back(sp);
            oc << "instance," << c.seed << ',' << (a.no_timing ? 0 : c.heuristic_us) << ',' << (a.no_timing ? 0 : c.oracle_us)
               << ',' << c.oracle_states << ',' << (a.no_timing ? std::string() : format_double(sp)) << '\n';
        }
        oc << "median,,,,," << (a.no_timing ? std::string() : format_double(median_of(speedups))) << '\n';
        m.outputs.push_back({"oracle.csv", oc.str(), a.no_timing});
    }
    return m;
}

// ---------------------------------------------------------------------------
// replay
// ---------------------------------------------------------------------------

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

inline int cmd_replay(const std::string& manifest_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
    const std::string text = read_file(manifest_path);
    const Json j = io::detail::parse_json(text);
    if (!j.is_object() || j.value("kind", "") != "manifest" || !j.contains("command") || !j.contains("outputs"))
        throw io::FormatError(manifest_path, "not a manifest");
    std::vector<std::string> args;
    for (const auto& a : j["command"]) args.push_back(a.get<std::string>() == out_placeholder ? out_dir : a.get<std::string>());
    std::ostringstream sink;
    const int code = run_cli(args, sink, err);
    if (code != ok && code != data_defect) {
        err << "replay: command exited with " << code << '\n';
        return code;
    }
    int mismatches = 0, checked = 0;
    for (const auto& o : j["outputs"]) {
        const std::string name = o["path"].get<std::string>();
        if (!o["deterministic"].get<bool>()) {
            out << "skip " << name << " (timing)\n";
            continue;
        }
        ++checked;
        std::string bytes;
        try {
            bytes = read_file(fs::path(out_dir) / name);
        } catch (const CommandFailure&) {
            out << "MISSING " << name << '\n';
            ++mismatches;
            continue;
        }
        const bool same = io::hex64(io::fnv1a64(bytes)) == o["fnv1a64"].get<std::string>();
        out << (same ? "match " : "MISMATCH ") << name << '\n';
        if (!same) ++mismatches;
    }
    out << checked - mismatches << "/" << checked << " outputs identical\n";
    return mismatches == 0 ? ok : data_defect;
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

inline std::string allowed_text(const std::vector<int>& v) {
    std::string s;
    for (int x : v) s += (s.empty() ? "" : ", ") + std::to_string(x);
    return s;
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spontaneous volunteer coordination: scenario generation, solving and evaluation", "svcp"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write scenario documents for one design row or the full design");
    generate->add_option("--design", gen.design, "single or full (all 16 rows)")->check(CLI::IsMember({"single", "full"}));
    generate->add_option("--volunteers", gen.volunteers, "Pool cap: " + allowed_text(allowed_max_volunteers()))
        ->check(CLI::IsMember(allowed_max_volunteers()));
    generate->add_option("--tasks", gen.tasks, "Tasks added per instance: " + allowed_text(allowed_added_tasks()))
        ->check(CLI::IsMember(allowed_added_tasks()));
    generate->add_option("--capprob", gen.capprob, "Capability probability: 0.3, 0.5")->check(CLI::IsMember({"0.3", "0.5"}));
    generate->add_option("--lambda", gen.lambda, "Arrival rate: " + allowed_text(allowed_lambda()))
        ->check(CLI::IsMember(allowed_lambda()));
    generate->add_option("--seeds", gen.seeds, "Number of seeds per configuration")->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen.first_seed, "First seed");
    generate->add_option("--instances", gen.instances, "Instances per scenario")->check(CLI::PositiveNumber);
    generate->add_option("--volunteer-cap", gen.volunteer_cap, "Reduced-scale cap on the pool size (0 = none)")
        ->check(CLI::NonNegativeNumber);
    generate->add_option("--out", gen.out, "Output directory")->required();

    SolveArgs sol;
    auto* solve_cmd = app.add_subcommand("solve", "Solve instance or scenario documents");
    solve_cmd->add_option("inputs", sol.inputs, "Instance or scenario documents")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--solver", sol.solvers, "heuristic and/or oracle (repeatable)")
        ->check(CLI::IsMember({"heuristic", "oracle"}));
    solve_cmd->add_flag("--trace", sol.trace, "Write per-iteration trace CSV");
    solve_cmd->add_flag("--no-timing", sol.no_timing, "Write 0 for wall-clock columns");
    solve_cmd->add_option("--out", sol.out, "Output directory")->required();

    GapArgs gap;
    auto* gap_cmd = app.add_subcommand("gap", "Relative gaps between heuristic and reference results");
    gap_cmd->add_option("--heuristic", gap.heuristic, "Heuristic results CSV")->required()->check(CLI::ExistingFile);
    gap_cmd->add_option("--oracle", gap.oracle, "Reference results CSV")->required()->check(CLI::ExistingFile);
    gap_cmd->add_option("--epsilon", gap.epsilon, "Near-zero threshold, decimal or p/q");
    gap_cmd->add_option("--out", gap.out, "Output directory")->required();

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Heuristic scaling sweep, optionally timed against the oracle");
    bench_cmd->add_option("--scale", bench.scale, "sweep (V 250..2000, A 20, T 48) or small")
        ->check(CLI::IsMember({"sweep", "small"}));
    bench_cmd->add_option("--repeat", bench.repeat, "Samples per point")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "Base seed");
    bench_cmd->add_option("--oracle-instances", bench.oracle_instances, "Micro instances timed with both solvers")
        ->check(CLI::NonNegativeNumber);
    bench_cmd->add_flag("--no-timing", bench.no_timing, "Write 0 for wall-clock columns");
    bench_cmd->add_option("--out", bench.out, "Output directory")->required();

    std::string manifest_path, replay_out;
    auto* replay = app.add_subcommand("replay", "Re-run a manifest and compare output hashes");
    replay->add_option("manifest", manifest_path, "manifest.json")->required()->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "Directory for the re-run outputs")->required();

    std::string catalog_out, catalog_check;
    auto* catalog = app.add_subcommand("catalog", "Write or check the built-in task catalog");
    auto* cat_out_opt = catalog->add_option("--out", catalog_out, "Write the catalog document here");
    auto* cat_check_opt = catalog->add_option("--check", catalog_check, "Compare a catalog document with the built-in one")
                              ->check(CLI::ExistingFile);
    cat_out_opt->excludes(cat_check_opt);
    catalog->require_option(1);

    std::string validate_instance_path, validate_assignment_path;
    auto* validate = app.add_subcommand("validate", "Check an instance and optionally an assignment");
    validate->add_option("instance", validate_instance_path, "Instance document")->required()->check(CLI::ExistingFile);
    validate->add_option("--assignment", validate_assignment_path, "Assignment document")->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? ok : usage;
    }

    try {
        if (*generate) {
            const auto m = cmd_generate(gen);
            publish(gen.out, m);
            out << "wrote " << m.outputs.size() << " scenario documents to " << gen.out << '\n';
            return ok;
        }
        if (*solve_cmd) {
            auto outcome = cmd_solve(sol);
            publish(sol.out, outcome.manifest);
            for (const auto& msg : outcome.infeasible) err << "infeasible: " << msg << '\n';
            if (outcome.failure) std::rethrow_exception(outcome.failure);
            out << "wrote " << outcome.manifest.outputs.size() << " files to " << sol.out << '\n';
            return outcome.infeasible.empty() ? ok : data_defect;
        }
        if (*gap_cmd) {
            const auto [m, unmatched] = cmd_gap(gap);
            for (const auto& u : unmatched) err << "warning: excluded " << u << '\n';
            publish(gap.out, m);
            out << "wrote gaps.csv to " << gap.out << '\n';
            return ok;
        }
        if (*bench_cmd) {
            const auto m = cmd_bench(bench);
            publish(bench.out, m);
            out << "wrote " << m.outputs.size() << " files to " << bench.out << '\n';
            return ok;
        }
        if (*replay) return cmd_replay(manifest_path, replay_out, out, err);
        if (*catalog) {
            const std::string text = io::write_catalog(halle_catalog());
            if (!catalog_out.empty()) {
                write_file(catalog_out, text);
                out << io::hex64(io::fnv1a64(text)) << "  " << catalog_out << '\n';
                return ok;
            }
            const Catalog other = io::read_catalog(read_file(catalog_check));
            if (other == halle_catalog()) {
                out << "catalog matches\n";
                return ok;
            }
            err << "catalog differs from the built-in table\n";
            return data_defect;
        }
        if (*validate) {
            const Instance inst = io::read_instance(read_file(validate_instance_path));
            out << "instance ok: " << inst.num_volunteers() << " volunteers, " << inst.num_activities() << " activities, "
                << inst.num_slots() << " slots\n";
            if (validate_assignment_path.empty()) return ok;
            const Assignment x = io::read_assignment(read_file(validate_assignment_path), inst);
            const auto violations = check_feasibility(inst, x);
            for (const auto& v : violations) err << "violation: " << v.describe() << '\n';
            const auto of = objective_vector(inst, x);
            int k = 0;
            for (const auto& e : of.entries()) out << "of" << ++k << " = " << to_fraction_string(e) << '\n';
            return violations.empty() ? ok : data_defect;
        }
    } catch (const CommandFailure& e) {
        err << "error: " << e.what() << '\n';
        return e.code;
    } catch (const RefusalError& e) {
        err << "refused: " << e.what() << '\n';
        return refused;
    } catch (const ResourceError& e) {
        err << "resource limit: " << e.what() << '\n';
        return refused;
    } catch (const std::invalid_argument& e) {  // InputError, FormatError, malformed rationals
        err << "error: " << e.what() << '\n';
        return data_defect;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return data_defect;
    }
    return usage;
}

}  // namespace svcp::cli
