#include "tmpidan/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <functional>
#include <thread>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "tmpidan/scenario_io.hpp"

namespace tmpidan {

const char* const kRawHeader =
    "domain,objects,robots,robot,rep,seed,solved,d,tp_s,mp_s,mp_attempts,executions,"
    "objects_rearranged";
const char* const kAggregateHeader =
    "objects,avg_d,tp_s,mp_s,mp_attempts,objects_rearranged,std_d,std_tp_s,std_mp_s,"
    "std_mp_attempts,std_objects_rearranged";

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct DomainSetup {
    DomainTemplate tmpl;
    Scenario scenario;
};

DomainSetup make_setup(const RunSpec& spec, std::uint64_t seed) {
    DomainSetup setup;
    if (spec.domain == "clutter") {
        setup.tmpl = clutter_template();
        setup.scenario = spec.scenario_path ? load_scenario(*spec.scenario_path)
                                            : generate_clutter(spec.objects, spec.robots,
                                                               std::max(spec.targets, spec.robots),
                                                               seed);
    } else if (spec.domain == "hanoi") {
        setup.tmpl = hanoi_template();
        setup.scenario =
            spec.scenario_path ? load_scenario(*spec.scenario_path) : hanoi_scenario(spec.disks);
    } else if (spec.domain == "kitchen") {
        setup.tmpl = kitchen_template();
        setup.scenario = spec.scenario_path ? load_scenario(*spec.scenario_path) : kitchen_scenario();
    } else {
        throw std::runtime_error("unknown domain: " + spec.domain);
    }
    return setup;
}

int object_count(const RunSpec& spec, const DomainSetup& setup) {
    if (spec.domain == "hanoi") return spec.disks;
    int n = 0;
    for (const auto& o : setup.scenario.world.objects)
        if (o.movable()) ++n;
    return n;
}

MetricsRow row_from_metrics(const RunSpec& spec, const DomainSetup& setup, const RunMetrics& m,
                            const std::string& robot, int rep, std::uint64_t seed) {
    MetricsRow row;
    row.domain = spec.domain;
    row.objects = object_count(spec, setup);
    row.robots = static_cast<int>(setup.scenario.world.robots.size());
    row.robot = robot;
    row.rep = rep;
    row.seed = seed;
    row.solved = m.solved;
    row.d = m.depth;
    row.tp_s = m.tp_s;
    row.mp_s = m.mp_s;
    row.mp_attempts = static_cast<double>(m.mp_attempts);
    row.executions = static_cast<double>(m.executions);
    row.objects_rearranged = static_cast<double>(m.objects_rearranged);
    return row;
}

// One repetition; multi-robot scenarios produce one row per robot.
std::vector<MetricsRow> execute_rep(const RunSpec& spec, int rep) {
    const std::uint64_t rep_seed = mix_seed(spec.config.seed, static_cast<std::uint64_t>(rep));
    DomainSetup setup = make_setup(spec, rep_seed);
    PlannerConfig config = spec.config;
    config.seed = rep_seed;

    const WorkspaceSnapshot& world = setup.scenario.world;
    std::vector<MetricsRow> rows;
    if (world.robots.size() > 1) {
        const auto multi = run_multi(setup.tmpl, world, world.targets, config);
        for (const auto& [robot, metrics] : multi.per_robot) {
            rows.push_back(row_from_metrics(spec, setup, metrics, robot, rep, rep_seed));
        }
    } else {
        const std::string robot = world.robots.front().id;
        const std::string task = world.targets.empty() ? "meal" : world.targets.front();
        const auto metrics = run_single(setup.tmpl, world, robot, task, config);
        rows.push_back(row_from_metrics(spec, setup, metrics, robot, rep, rep_seed));
    }
    return rows;
}

void write_output(const std::string& text, const RunSpec& spec, std::ostream& out) {
    if (spec.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(spec.out_path);
    if (!f) throw std::runtime_error("cannot write output file: " + spec.out_path);
    f << text;
}

nlohmann::json row_json(const MetricsRow& r) {
    return nlohmann::json{{"domain", r.domain},
                          {"objects", r.objects},
                          {"robots", r.robots},
                          {"robot", r.robot},
                          {"rep", r.rep},
                          {"seed", r.seed},
                          {"solved", r.solved},
                          {"d", r.d},
                          {"tp_s", r.tp_s},
                          {"mp_s", r.mp_s},
                          {"mp_attempts", r.mp_attempts},
                          {"executions", r.executions},
                          {"objects_rearranged", r.objects_rearranged}};
}

nlohmann::json aggregate_json(const AggregateRow& a) {
    return nlohmann::json{{"objects", a.objects},
                          {"avg_d", a.avg_d},
                          {"tp_s", a.tp_s},
                          {"mp_s", a.mp_s},
                          {"mp_attempts", a.mp_attempts},
                          {"objects_rearranged", a.objects_rearranged},
                          {"std_d", a.std_d},
                          {"std_tp_s", a.std_tp_s},
                          {"std_mp_s", a.std_mp_s},
                          {"std_mp_attempts", a.std_mp_attempts},
                          {"std_objects_rearranged", a.std_objects_rearranged}};
}

}  // namespace

std::string raw_rows_csv(const std::vector<MetricsRow>& rows) {
    std::ostringstream out;
    out << kRawHeader << "\n";
    for (const auto& r : rows) {
        out << r.domain << ',' << r.objects << ',' << r.robots << ',' << r.robot << ',' << r.rep
            << ',' << r.seed << ',' << (r.solved ? 1 : 0) << ',' << r.d << ',' << fmt(r.tp_s) << ','
            << fmt(r.mp_s) << ',' << fmt(r.mp_attempts) << ',' << fmt(r.executions) << ','
            << fmt(r.objects_rearranged) << "\n";
    }
    return out.str();
}

AggregateRow aggregate(int objects, const std::vector<MetricsRow>& rows) {
    AggregateRow a;
    a.objects = objects;
    if (rows.empty()) return a;
    const auto mean_std = [&rows](const std::function<double(const MetricsRow&)>& get, double& mean,
                                  double& stddev) {
        double sum = 0.0;
        for (const auto& r : rows) sum += get(r);
        mean = sum / rows.size();
        double var = 0.0;
        for (const auto& r : rows) var += (get(r) - mean) * (get(r) - mean);
        stddev = std::sqrt(var / rows.size());
    };
    mean_std([](const MetricsRow& r) { return double(r.d); }, a.avg_d, a.std_d);
    mean_std([](const MetricsRow& r) { return r.tp_s; }, a.tp_s, a.std_tp_s);
    mean_std([](const MetricsRow& r) { return r.mp_s; }, a.mp_s, a.std_mp_s);
    mean_std([](const MetricsRow& r) { return r.mp_attempts; }, a.mp_attempts, a.std_mp_attempts);
    mean_std([](const MetricsRow& r) { return r.objects_rearranged; }, a.objects_rearranged,
             a.std_objects_rearranged);
    return a;
}

std::string aggregate_rows_csv(const std::vector<AggregateRow>& rows) {
    std::ostringstream out;
    out << kAggregateHeader << "\n";
    for (const auto& a : rows) {
        out << a.objects << ',' << fmt(a.avg_d) << ',' << fmt(a.tp_s) << ',' << fmt(a.mp_s) << ','
            << fmt(a.mp_attempts) << ',' << fmt(a.objects_rearranged) << ',' << fmt(a.std_d) << ','
            << fmt(a.std_tp_s) << ',' << fmt(a.std_mp_s) << ',' << fmt(a.std_mp_attempts) << ','
            << fmt(a.std_objects_rearranged) << "\n";
    }
    return out.str();
}

std::string canonicalize_timing(const std::string& csv) {
    std::istringstream in(csv);
    std::ostringstream out;
    std::string line;
    std::vector<int> timing_cols;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            out << line << "\n";
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        const bool is_header = !cells.empty() && !cells[0].empty() &&
                               !std::isdigit(static_cast<unsigned char>(cells[0][0])) &&
                               (line.find("tp_s") != std::string::npos ||
                                line.find("mp_s") != std::string::npos);
        if (is_header) {
            timing_cols.clear();
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i] == "tp_s" || cells[i] == "mp_s" || cells[i] == "std_tp_s" ||
                    cells[i] == "std_mp_s")
                    timing_cols.push_back(static_cast<int>(i));
            }
        } else {
            for (int c : timing_cols) {
                if (c < static_cast<int>(cells.size())) cells[c] = "0";
            }
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << "\n";
    }
    return out.str();
}

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& diag) {
    try {
        std::vector<MetricsRow> rows;
        for (int rep = 0; rep < spec.repetitions; ++rep) {
            const auto rep_rows = execute_rep(spec, rep);
            rows.insert(rows.end(), rep_rows.begin(), rep_rows.end());
        }
        if (spec.format == "json") {
            nlohmann::json j;
            j["raw"] = nlohmann::json::array();
            for (const auto& r : rows) j["raw"].push_back(row_json(r));
            write_output(j.dump(2) + "\n", spec, out);
        } else {
            write_output(raw_rows_csv(rows), spec, out);
        }
        const bool all_solved =
            std::all_of(rows.begin(), rows.end(), [](const MetricsRow& r) { return r.solved; });
        return all_solved ? 0 : 2;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_bench(const RunSpec& base, const std::vector<int>& sweep, const std::string& plot_out,
              std::ostream& out, std::ostream& diag) {
    if (sweep.empty()) {
        diag << "error: empty sweep\n";
        return 1;
    }
    struct RowTask {
        int sweep_value;
        int rep;
    };
    std::vector<RowTask> tasks;
    for (int value : sweep) {
        for (int rep = 0; rep < base.repetitions; ++rep) tasks.push_back({value, rep});
    }

    // Each row owns its RNG stream derived from (seed, row-index), so
    // parallel execution cannot change any result.
    std::vector<std::vector<MetricsRow>> results(tasks.size());
    std::vector<std::string> errors(tasks.size());
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                RunSpec spec = base;
                if (spec.domain == "hanoi") spec.disks = tasks[i].sweep_value;
                else spec.objects = tasks[i].sweep_value;
                try {
                    results[i] = execute_rep(spec, tasks[i].rep);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();

    std::vector<MetricsRow> raw;
    bool any_ok = false;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!errors[i].empty()) {
            diag << "row " << i << " (value " << tasks[i].sweep_value << ", rep " << tasks[i].rep
                 << ") failed: " << errors[i] << "\n";
            continue;
        }
        any_ok = true;
        raw.insert(raw.end(), results[i].begin(), results[i].end());
    }

    // Aggregate per robot (multi-robot runs mirror the per-robot tables),
    // then per sweep value.
    std::vector<std::string> robots;
    for (const auto& r : raw) {
        if (std::find(robots.begin(), robots.end(), r.robot) == robots.end())
            robots.push_back(r.robot);
    }
    std::sort(robots.begin(), robots.end());

    std::ostringstream text;
    nlohmann::json jout;
    jout["raw"] = nlohmann::json::array();
    for (const auto& r : raw) jout["raw"].push_back(row_json(r));
    text << raw_rows_csv(raw);
    for (const auto& robot : robots) {
        std::vector<AggregateRow> aggs;
        for (int value : sweep) {
            std::vector<MetricsRow> group;
            for (const auto& r : raw) {
                const bool match_value =
                    (base.domain == "hanoi") ? (r.objects == value) : (r.objects == value);
                if (r.robot == robot && match_value) group.push_back(r);
            }
            if (!group.empty()) aggs.push_back(aggregate(value, group));
        }
        text << "# robot " << robot << "\n" << aggregate_rows_csv(aggs);
        nlohmann::json jblock;
        jblock["robot"] = robot;
        jblock["rows"] = nlohmann::json::array();
        for (const auto& a : aggs) jblock["rows"].push_back(aggregate_json(a));
        jout["aggregate"].push_back(std::move(jblock));
    }

    try {
        if (base.format == "json") {
            write_output(jout.dump(2) + "\n", base, out);
        } else {
            write_output(text.str(), base, out);
        }
        if (!plot_out.empty()) {
            std::ofstream pf(plot_out);
            if (!pf) throw std::runtime_error("cannot write plot file: " + plot_out);
            pf << "d,tp_s\n";
            for (const auto& r : raw) pf << r.d << ',' << fmt(r.tp_s) << "\n";
        }
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 1;
    }
    return any_ok ? 0 : 1;
}

int cmd_validate(const std::string& scenario_path, std::ostream& diag) {
    Scenario sc;
    try {
        sc = load_scenario(scenario_path);
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 1;
    }
    const WorkspaceSnapshot& ws = sc.world;
    int violations = 0;
    const auto violation = [&](const std::string& msg) {
        diag << "violation: " << msg << "\n";
        ++violations;
    };

    if (const auto pair = first_overlap(ws)) {
        violation("objects overlap: " + pair->first + " and " + pair->second);
    }
    for (const auto& o : ws.objects) {
        if (!o.on_table()) continue;
        if (!ws.table.contains(o.pose.xy()) && !ws.storage.contains(o.pose.xy()))
            violation("object outside table and storage: " + o.id);
        if (shape_bounding_radius(o.shape) <= 0.0) violation("non-positive extent: " + o.id);
    }
    double max_gripper = 0.0;
    for (const auto& r : ws.robots) {
        if (r.gripper_radius <= 0.0) violation("non-positive gripper radius: " + r.id);
        max_gripper = std::max(max_gripper, r.gripper_radius);
        if (r.arms.empty() || r.arms.size() > 2) violation("robot needs 1 or 2 arms: " + r.id);
        for (const auto& a : r.arms) {
            if (a.holding && !ws.find_object(*a.holding))
                violation("arm holds unknown object: " + r.id + "/" + a.id);
        }
    }
    if (max_gripper > 0.0) {
        for (const auto& o : ws.objects) {
            if (!o.movable()) continue;
            const bool too_big =
                shape_max_dimension(o.shape) > ws.params.pushable_ratio * max_gripper;
            if (too_big && o.category != ObjectCategory::PushableOnly)
                violation("object exceeds gripper aperture but is not pushable-only: " + o.id);
            if (!too_big && o.category == ObjectCategory::PushableOnly)
                violation("pushable-only object fits the gripper: " + o.id);
        }
    }
    for (const auto& t : ws.targets) {
        if (!ws.find_object(t)) violation("unknown target: " + t);
    }
    if (violations > 0) {
        diag << violations << " violation(s)\n";
        return 2;
    }
    diag << "scenario valid\n";
    return 0;
}

int cmd_gen(const RunSpec& spec, std::ostream& out, std::ostream& diag) {
    try {
        const DomainSetup setup = make_setup(spec, spec.config.seed);
        const std::string text = scenario_to_string(setup.scenario);
        write_output(text, spec, out);
        return 0;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace tmpidan
