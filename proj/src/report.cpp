#include "graver_tv/report.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace gtv {

using json = nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string format_double(double v) {
    std::ostringstream ss;
    ss << std::setprecision(17) << v;
    return ss.str();
}

}  // namespace

std::string run_report_json(const SeparableProblem& problem, const RunReport& report, const ReportContext& context,
                            bool include_timing) {
    const RunConfig& c = report.config;
    json j;
    j["format"] = "graver-tv-report";
    j["version"] = "v1";
    j["config"] = {{"trials", c.trials},
                   {"base_seed", c.base_seed},
                   {"p", c.p},
                   {"init", c.init_label},
                   {"trial_timeout_seconds", optional_number(c.trial_timeout_seconds)},
                   {"total_timeout_seconds", optional_number(c.total_timeout_seconds)},
                   {"parallel", c.parallel},
                   {"max_pivots_per_call", c.max_pivots_per_call}};
    json inst{{"path", context.instance_path},
              {"vertices", problem.vertex_count()},
              {"edges", problem.edge_count()},
              {"q", problem.q()},
              {"budget_cap", std::isfinite(problem.budget_cap()) ? json(problem.budget_cap()) : json(nullptr)}};
    if (context.instance) {
        inst["kind"] = to_string(context.instance->kind);
        inst["rows"] = context.instance->rows;
        inst["cols"] = context.instance->cols;
        inst["alpha"] = context.instance->alpha;
        if (context.instance->budget_star) inst["budget_star"] = *context.instance->budget_star;
    }
    j["instance"] = inst;

    json init{{"objective", report.init.objective()}, {"budget", report.init.budget()}, {"x", report.init.x()}};
    if (context.init) {
        init["kind"] = to_string(context.init->kind);
        init["mu"] = optional_number(context.init->mu);
        init["fell_back"] = context.init->fell_back;
    }
    j["init"] = init;

    json best{{"trial_index", report.best_index},
              {"objective", report.best.objective()},
              {"budget", report.best.budget()},
              {"feasible", is_feasible(problem, report.best.x())},
              {"x", report.best.x()}};
    if (report.best_index >= 0) best["seed"] = report.trials[static_cast<std::size_t>(report.best_index)].seed;
    j["best"] = best;

    json trials = json::array();
    json trial_times = json::array();
    for (const TrialReport& t : report.trials) {
        json tj{{"seed", t.seed},
                {"objective", t.objective},
                {"budget_used", t.budget_used},
                {"pivots_total", t.pivots_total},
                {"moves_applied", t.moves_applied},
                {"polish_moves", t.polish_moves},
                {"timed_out", t.timed_out}};
        if (!t.trajectory.empty()) {
            json tr = json::array();
            for (const auto& pt : t.trajectory) tr.push_back(json::array({pt.pivot, pt.objective, pt.budget}));
            tj["trajectory"] = tr;
        }
        trials.push_back(tj);
        trial_times.push_back(t.wall_time_seconds);
    }
    j["trials"] = trials;
    j["completed_trials"] = report.trials.size();
    if (include_timing)
        j["timing"] = {{"total_wall_seconds", report.wall_time_seconds}, {"trial_wall_seconds", trial_times}};
    return j.dump(2) + "\n";
}

std::string canonical_report(const std::string& report_json) {
    json j = json::parse(report_json);
    j.erase("timing");
    return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& out, const RunReport& report, bool header) {
    if (header) out << "trial,pivot,objective,budget\n";
    for (std::size_t i = 0; i < report.trials.size(); ++i) {
        const TrialReport& t = report.trials[i];
        std::uint64_t index = t.seed - report.config.base_seed;
        for (const auto& pt : t.trajectory)
            out << index << ',' << pt.pivot << ',' << format_double(pt.objective) << ',' << format_double(pt.budget)
                << '\n';
    }
}

SweepRow summarize_sweep(double p, const RunReport& report) {
    SweepRow row{p, 0.0, 0.0, 0.0, report.best_objective(), static_cast<int>(report.trials.size())};
    if (report.trials.empty()) {
        row.mean_objective = report.init.objective();
        return row;
    }
    for (const TrialReport& t : report.trials) {
        row.mean_objective += t.objective;
        row.mean_pivots += static_cast<double>(t.pivots_total);
        row.mean_time_seconds += t.wall_time_seconds;
    }
    const double k = static_cast<double>(report.trials.size());
    row.mean_objective /= k;
    row.mean_pivots /= k;
    row.mean_time_seconds /= k;
    return row;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "p,mean_objective,mean_pivots,mean_time,best_objective,completed_trials\n";
    for (const SweepRow& r : rows)
        out << format_double(r.p) << ',' << format_double(r.mean_objective) << ',' << format_double(r.mean_pivots)
            << ',' << format_double(r.mean_time_seconds) << ',' << format_double(r.best_objective) << ','
            << r.completed_trials << '\n';
}

std::vector<double> parse_p_grid(const std::string& spec) {
    std::vector<double> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw std::invalid_argument("p grid '" + spec + "': '" + item + "' is not a number");
        }
    }
    if (parts.size() != 3) throw std::invalid_argument("p grid '" + spec + "' must look like start:step:end");
    const double start = parts[0], step = parts[1], end = parts[2];
    if (!(step > 0) || end < start || start < 0)
        throw std::invalid_argument("p grid '" + spec + "' needs 0 <= start <= end and step > 0");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        double v = start + k * step;
        if (v > end + 1e-9 * std::max(1.0, std::fabs(end))) break;
        out.push_back(std::round(v * 1e12) / 1e12);
        if (out.size() > 100000) throw std::invalid_argument("p grid '" + spec + "' has too many points");
    }
    return out;
}

}  // namespace gtv
