#pragma once

// JSON and CSV emission for run reports. Wall-clock fields live under a
// single "timing" key so the rest of the document is reproducible.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "graver_tv/augment.hpp"
#include "graver_tv/init.hpp"
#include "graver_tv/instances.hpp"

namespace gtv {

struct ReportContext {
    std::string instance_path;
    std::optional<InstanceSpec> instance;
    const InitResult* init = nullptr;
};

/// Full report document; with include_timing=false the "timing" key is
/// omitted, giving the canonical payload.
std::string run_report_json(const SeparableProblem& problem, const RunReport& report, const ReportContext& context,
                            bool include_timing = true);

/// Drops the "timing" key from a report document and re-serializes it.
std::string canonical_report(const std::string& report_json);

/// trial,pivot,objective,budget
void write_trajectory_csv(std::ostream& out, const RunReport& report, bool header = true);

struct SweepRow {
    double p;
    double mean_objective;
    double mean_pivots;
    double mean_time_seconds;
    double best_objective;
    int completed_trials;
};

SweepRow summarize_sweep(double p, const RunReport& report);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// "start:step:end" inclusive; values rounded to 12 decimals.
std::vector<double> parse_p_grid(const std::string& spec);

}  // namespace gtv
