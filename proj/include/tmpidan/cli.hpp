#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tmpidan/domains.hpp"

namespace tmpidan {

struct RunSpec {
    std::string domain = "clutter";  // clutter | hanoi | kitchen
    std::optional<std::string> scenario_path;
    int objects = 8;
    int disks = 3;
    int robots = 1;
    int targets = 1;
    int repetitions = 1;
    PlannerConfig config;
    std::string out_path;        // empty = stdout
    std::string format = "csv";  // csv | json
};

// One raw metrics row (one repetition, one robot).
struct MetricsRow {
    std::string domain;
    int objects = 0;
    int robots = 1;
    std::string robot;
    int rep = 0;
    std::uint64_t seed = 0;
    bool solved = false;
    std::size_t d = 0;
    double tp_s = 0.0;
    double mp_s = 0.0;
    double mp_attempts = 0.0;
    double executions = 0.0;
    double objects_rearranged = 0.0;
};

// Aggregate row in the frozen column order
// [objects, avg_d, tp_s, mp_s, mp_attempts, objects_rearranged], with the
// standard deviations appended.
struct AggregateRow {
    int objects = 0;
    double avg_d = 0.0, tp_s = 0.0, mp_s = 0.0, mp_attempts = 0.0, objects_rearranged = 0.0;
    double std_d = 0.0, std_tp_s = 0.0, std_mp_s = 0.0, std_mp_attempts = 0.0,
           std_objects_rearranged = 0.0;
};

extern const char* const kRawHeader;
extern const char* const kAggregateHeader;

std::string raw_rows_csv(const std::vector<MetricsRow>& rows);
AggregateRow aggregate(int objects, const std::vector<MetricsRow>& rows);
std::string aggregate_rows_csv(const std::vector<AggregateRow>& rows);

// Zeroes the measured-time fields (tp_s, mp_s) so seeded outputs compare
// byte-identically; everything else is untouched.
std::string canonicalize_timing(const std::string& csv);

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& diag);
int cmd_bench(const RunSpec& base, const std::vector<int>& sweep, const std::string& plot_out,
              std::ostream& out, std::ostream& diag);
int cmd_validate(const std::string& scenario_path, std::ostream& diag);
int cmd_gen(const RunSpec& spec, std::ostream& out, std::ostream& diag);

}  // namespace tmpidan
