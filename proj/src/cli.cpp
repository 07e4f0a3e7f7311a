#include "graver_tv/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "graver_tv/augment.hpp"
#include "graver_tv/dense_lp.hpp"
#include "graver_tv/graph.hpp"
#include "graver_tv/init.hpp"
#include "graver_tv/instances.hpp"
#include "graver_tv/oracle_batch.hpp"
#include "graver_tv/report.hpp"

namespace gtv {

namespace {

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InitFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::string instance;
    std::string init = "zero";
    double p = 0.0;
    int trials = 100;
    double trial_timeout = 60.0;
    double total_timeout = 600.0;
    std::uint64_t seed = 0;
    int parallel = 1;
    std::int64_t max_pivots = 0;
    bool trace = false;
    std::string trajectory_path;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
    cmd->add_option("-i,--instance", o.instance, "instance JSON")->required();
    cmd->add_option("--init", o.init, "initial point")
        ->check(CLI::IsMember({"zero", "penalized", "rounded"}))
        ->capture_default_str();
    cmd->add_option("--trials", o.trials, "trials per run")->check(CLI::Range(1, 1000000))->capture_default_str();
    cmd->add_option("--trial-timeout", o.trial_timeout, "seconds per trial")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--total-timeout", o.total_timeout, "seconds for all trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "base seed; trial i uses seed + i")->capture_default_str();
    cmd->add_option("--parallel", o.parallel, "worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    cmd->add_option("--max-pivots", o.max_pivots, "pivot cap per sampled move, 0 for the default")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--trace", o.trace, "record per-pivot trajectories");
    cmd->add_option("--trajectory", o.trajectory_path, "trajectory CSV output (implies --trace)");
}

void apply_seed_override(std::uint64_t& seed) {
    if (const char* env = std::getenv("GRAVER_TV_SEED")) {
        try {
            std::size_t used = 0;
            unsigned long long v = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
            seed = v;
        } catch (const std::exception&) {
            throw CLI::ValidationError("GRAVER_TV_SEED", std::string("not an unsigned integer: '") + env + "'");
        }
    }
}

struct LoadedInstance {
    InstanceSpec spec;
    SeparableProblem problem;
};

LoadedInstance load(const std::string& path) {
    try {
        InstanceSpec spec = load_instance(path);
        SeparableProblem problem = build_problem(spec);
        return {std::move(spec), std::move(problem)};
    } catch (const std::exception& e) {
        throw IoFailure(e.what());
    }
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoFailure("cannot open '" + path + "' for writing");
    fn(f);
    f.flush();
    if (!f) throw IoFailure("failed writing '" + path + "'");
}

InitResult make_init(const SeparableProblem& problem, const std::string& kind) {
    try {
        return initial_point(problem, {parse_init_kind(kind)});
    } catch (const NotLinearizable& e) {
        throw InitFailure(std::string("NotLinearizable: ") + e.what());
    } catch (const LpIterationCap& e) {
        throw InitFailure(std::string("relaxation iteration cap: ") + e.what());
    } catch (const std::runtime_error& e) {
        throw InitFailure(std::string("infeasible initialization: ") + e.what());
    }
}

RunConfig run_config(const RunOptions& o, double p, const std::string& init_label) {
    RunConfig rc;
    rc.trials = o.trials;
    rc.base_seed = o.seed;
    rc.p = p;
    rc.trial_timeout_seconds = o.trial_timeout;
    rc.total_timeout_seconds = o.total_timeout;
    rc.parallel = o.parallel;
    rc.max_pivots_per_call = o.max_pivots;
    rc.record_trajectory = o.trace || !o.trajectory_path.empty();
    rc.init_label = init_label;
    return rc;
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v;
    return ss.str();
}

struct SolveOptions {
    RunOptions run;
    std::string output;
    std::string solution_pgm;
    bool canonical = false;
};

int cmd_solve(const SolveOptions& o, std::ostream& out) {
    LoadedInstance inst = load(o.run.instance);
    InitResult init = make_init(inst.problem, o.run.init);
    RunReport report = run_trials(inst.problem, init.x, run_config(o.run, o.run.p, o.run.init));
    ReportContext ctx{o.run.instance, inst.spec, &init};
    const std::string doc = run_report_json(inst.problem, report, ctx, !o.canonical);
    if (o.output.empty()) out << doc;
    else write_file(o.output, [&](std::ostream& f) { f << doc; });
    if (!o.run.trajectory_path.empty())
        write_file(o.run.trajectory_path, [&](std::ostream& f) { write_trajectory_csv(f, report); });
    if (!o.solution_pgm.empty()) {
        if (inst.spec.rows * inst.spec.cols != inst.problem.vertex_count())
            throw IoFailure("solution PGM needs a rows x cols instance");
        try {
            save_solution_pgm(report.best.x(), inst.spec.rows, inst.spec.cols, inst.problem.q(), o.solution_pgm);
        } catch (const std::exception& e) {
            throw IoFailure(e.what());
        }
    }
    if (!o.output.empty()) {
        out << "init " << to_string(init.kind) << ": objective " << fmt(report.init.objective()) << ", budget "
            << fmt(report.init.budget()) << "\n";
        out << "best of " << report.trials.size() << " trials (p=" << fmt(o.run.p)
            << "): objective " << fmt(report.best_objective()) << ", budget " << fmt(report.best.budget()) << " / "
            << fmt(inst.problem.budget_cap()) << "\n";
        out << "report written to " << o.output << "\n";
    }
    return exit_code::ok;
}

struct SweepOptions {
    RunOptions run;
    std::string grid = "0:0.1:1";
    std::string output;
    std::string report_dir;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out) {
    const std::vector<double> grid = parse_p_grid(o.grid);
    LoadedInstance inst = load(o.run.instance);
    InitResult init = make_init(inst.problem, o.run.init);
    if (!o.report_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(o.report_dir, ec);
        if (ec) throw IoFailure("cannot create '" + o.report_dir + "': " + ec.message());
    }
    std::vector<SweepRow> rows;
    std::ostringstream traj;
    if (!o.run.trajectory_path.empty()) traj << "p,trial,pivot,objective,budget\n";
    for (double p : grid) {
        RunReport report = run_trials(inst.problem, init.x, run_config(o.run, p, o.run.init));
        rows.push_back(summarize_sweep(p, report));
        if (!o.run.trajectory_path.empty()) {
            std::ostringstream one;
            write_trajectory_csv(one, report, false);
            std::istringstream lines(one.str());
            for (std::string line; std::getline(lines, line);) traj << fmt(p) << ',' << line << '\n';
        }
        if (!o.report_dir.empty()) {
            ReportContext ctx{o.run.instance, inst.spec, &init};
            std::ostringstream name;
            name << "report_p" << std::fixed << std::setprecision(3) << p << ".json";
            const std::string doc = run_report_json(inst.problem, report, ctx);
            write_file((std::filesystem::path(o.report_dir) / name.str()).string(), [&](std::ostream& f) { f << doc; });
        }
    }
    if (o.output.empty()) write_sweep_csv(out, rows);
    else write_file(o.output, [&](std::ostream& f) { write_sweep_csv(f, rows); });
    if (!o.run.trajectory_path.empty()) write_file(o.run.trajectory_path, [&](std::ostream& f) { f << traj.str(); });
    return exit_code::ok;
}

struct EnumerateOptions {
    int n = 0;
    bool full = false;
    bool force = false;
};

int cmd_enumerate(const EnumerateOptions& o, std::ostream& out, std::ostream& err) {
    if (o.n > 4 && !o.force) {
        err << "error: n = " << o.n << " exceeds the guard n <= 4 (pass --force to run anyway)\n";
        return exit_code::usage;
    }
    Graph g = grid_graph(o.n, o.n);
    std::int64_t count = 0;
    std::int64_t prime = 0;
    auto start = std::chrono::steady_clock::now();
    enumerate_connected_subsets(g, [&](const VertexSet& s) {
        ++count;
        if (o.full) {
            Boundary b = boundary(g, s);
            prime += std::int64_t{2} << (b.out_edges.size() + b.in_edges.size());
        }
    });
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << "grid " << o.n << "x" << o.n << ": " << count << " connected induced subgraphs\n";
    if (o.full) {
        out << "Graver basis of the difference matrix: " << 2 * count << " elements\n";
        out << "Graver basis of the split difference matrix: " << prime + 2 * g.edge_count() << " elements\n";
    }
    out << "enumeration time: " << fmt(secs) << " s\n";
    return exit_code::ok;
}

struct OracleOptions {
    std::string batch = "all";
    BatchOptions batch_options;
};

int cmd_oracle(const OracleOptions& o, std::ostream& out) {
    std::vector<BatchKind> kinds;
    if (o.batch == "all" || o.batch == "unconstrained") kinds.push_back(BatchKind::unconstrained);
    if (o.batch == "all" || o.batch == "constrained") kinds.push_back(BatchKind::constrained);
    if (o.batch == "all" || o.batch == "penalty") kinds.push_back(BatchKind::penalty);
    bool all_ok = true;
    for (BatchKind k : kinds) {
        BatchResult r = run_batch(k, o.batch_options);
        out << "== " << to_string(k) << " ==\n";
        out << std::left << std::setw(6) << "case" << std::setw(4) << "q" << std::setw(8) << "result" << std::setw(18)
            << "reference" << std::setw(18) << "achieved" << "note\n";
        for (const BatchCase& c : r.cases) {
            const char* status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
            out << std::left << std::setw(6) << c.index << std::setw(4) << c.q << std::setw(8) << status;
            if (c.skipped) out << std::setw(36) << "-";
            else out << std::setw(18) << fmt(c.reference) << std::setw(18) << fmt(c.achieved);
            out << c.note << "\n";
            if (c.skipped) out << "notice: case " << c.index << " skipped (" << c.note << ")\n";
        }
        out << to_string(k) << ": " << r.passed() << " passed, " << r.failed() << " failed, " << r.skipped()
            << " skipped\n";
        all_ok = all_ok && r.failed() == 0;
    }
    return all_ok ? exit_code::ok : exit_code::check_failed;
}

struct BuildOptions {
    std::string pgm;
    int rows = 32;
    int cols = 32;
    int q = 3;
    double alpha = 0.5;
    double delta = 0.75;
    double radius = 1.0;
    std::uint64_t seed = 0;
    std::string output;
    std::string pgm_out;
};

void write_instance(InstanceSpec& spec, const std::string& path, std::ostream& out) {
    SeparableProblem p = build_problem(spec);
    try {
        save_instance(spec, path);
    } catch (const std::exception& e) {
        throw IoFailure(e.what());
    }
    out << to_string(spec.kind) << " instance " << spec.rows << "x" << spec.cols << ", q=" << spec.q
        << ", budget cap " << fmt(p.budget_cap()) << " written to " << path << "\n";
}

InstanceSpec image_spec(const PgmImage& img, const BuildOptions& o) {
    InstanceSpec spec;
    spec.kind = InstanceKind::image;
    spec.rows = img.height;
    spec.cols = img.width;
    spec.q = o.q;
    spec.alpha = o.alpha;
    spec.delta_fraction = o.delta;
    spec.levels = quantize(img.pixels, img.maxval, o.q);
    return spec;
}

int cmd_make_image(const BuildOptions& o, std::ostream& out) {
    PgmImage img;
    try {
        img = load_pgm(o.pgm);
    } catch (const std::exception& e) {
        throw IoFailure(e.what());
    }
    InstanceSpec spec = image_spec(img, o);
    write_instance(spec, o.output, out);
    return exit_code::ok;
}

int cmd_make_synthetic(const BuildOptions& o, std::ostream& out) {
    PgmImage img = synthetic_image(o.rows, o.cols, o.seed);
    if (!o.pgm_out.empty()) {
        try {
            save_pgm(img, o.pgm_out);
        } catch (const std::exception& e) {
            throw IoFailure(e.what());
        }
        out << "synthetic image written to " << o.pgm_out << "\n";
    }
    if (!o.output.empty()) {
        InstanceSpec spec = image_spec(img, o);
        write_instance(spec, o.output, out);
    }
    return exit_code::ok;
}

int cmd_make_trust_region(const BuildOptions& o, std::ostream& out) {
    InstanceSpec spec = random_trust_region_spec(o.rows, o.cols, o.q, o.alpha, o.radius, o.seed);
    write_instance(spec, o.output, out);
    return exit_code::ok;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Graver-basis augmentation for budgeted total-variation integer programs", "graver_tv"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::function<int()> action;

    SolveOptions solve;
    auto* c_solve = app.add_subcommand("solve", "run the randomized heuristic and write a report");
    add_run_options(c_solve, solve.run);
    c_solve->add_option("--p", solve.run.p, "pricing weight exponent in [0, 1]")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    c_solve->add_option("-o,--output", solve.output, "report JSON path (stdout when omitted)");
    c_solve->add_flag("--canonical", solve.canonical, "omit the timing block from the report");
    c_solve->add_option("--solution-pgm", solve.solution_pgm, "write the best solution as a PGM image");
    c_solve->callback([&] {
        apply_seed_override(solve.run.seed);
        action = [&] { return cmd_solve(solve, out); };
    });

    SweepOptions sweep;
    auto* c_sweep = app.add_subcommand("sweep-p", "run trials over a grid of p values and write a CSV summary");
    add_run_options(c_sweep, sweep.run);
    c_sweep->add_option("--grid", sweep.grid, "start:step:end")->capture_default_str();
    c_sweep->add_option("-o,--output", sweep.output, "summary CSV path (stdout when omitted)");
    c_sweep->add_option("--report-dir", sweep.report_dir, "also write one report JSON per grid point");
    c_sweep->callback([&] {
        apply_seed_override(sweep.run.seed);
        action = [&] { return cmd_sweep(sweep, out); };
    });

    EnumerateOptions en;
    auto* c_enum = app.add_subcommand("enumerate", "count connected induced subgraphs of the n x n grid");
    c_enum->add_option("-n,--n", en.n, "grid side")->required()->check(CLI::PositiveNumber);
    c_enum->add_flag("--full", en.full, "also print Graver basis sizes");
    c_enum->add_flag("--force", en.force, "allow n > 4");
    c_enum->callback([&] { action = [&] { return cmd_enumerate(en, out, err); }; });

    OracleOptions oracle;
    auto* c_oracle = app.add_subcommand("oracle", "cross-check solvers against brute force on seeded batches");
    c_oracle->add_option("--batch", oracle.batch, "which batch")
        ->check(CLI::IsMember({"all", "unconstrained", "constrained", "penalty"}))
        ->capture_default_str();
    c_oracle->add_option("--count", oracle.batch_options.count, "instances per batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_oracle->add_option("--rows", oracle.batch_options.rows)->check(CLI::Range(1, 4))->capture_default_str();
    c_oracle->add_option("--cols", oracle.batch_options.cols)->check(CLI::Range(1, 4))->capture_default_str();
    c_oracle->add_option("--trials", oracle.batch_options.trials, "heuristic trials in the constrained batch")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c_oracle->add_option("--seed", oracle.batch_options.seed)->capture_default_str();
    c_oracle->callback([&] {
        apply_seed_override(oracle.batch_options.seed);
        action = [&] { return cmd_oracle(oracle, out); };
    });

    BuildOptions build;
    auto* c_image = app.add_subcommand("make-image", "build an image instance from a PGM file");
    c_image->add_option("--pgm", build.pgm, "input image (P2 or P5)")->required();
    auto* c_synth = app.add_subcommand("make-synthetic", "generate the seeded synthetic test image");
    c_synth->add_option("--rows", build.rows)->check(CLI::PositiveNumber)->capture_default_str();
    c_synth->add_option("--cols", build.cols)->check(CLI::PositiveNumber)->capture_default_str();
    c_synth->add_option("--pgm-out", build.pgm_out, "write the image as P2");
    auto* c_trust = app.add_subcommand("make-trust-region", "build a seeded random trust-region instance");
    c_trust->add_option("--rows", build.rows)->check(CLI::PositiveNumber)->capture_default_str();
    c_trust->add_option("--cols", build.cols)->check(CLI::PositiveNumber)->capture_default_str();
    c_trust->add_option("--radius", build.radius, "budget cap on sum |x - center|")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    for (CLI::App* c : {c_image, c_synth, c_trust}) {
        c->add_option("--q", build.q, "levels 0..q")->check(CLI::PositiveNumber)->capture_default_str();
        c->add_option("--alpha", build.alpha, "edge weight")->check(CLI::NonNegativeNumber)->capture_default_str();
        c->add_option("-o,--output", build.output, "instance JSON path");
    }
    c_image->get_option("--output")->required();
    c_trust->get_option("--output")->required();
    for (CLI::App* c : {c_image, c_synth})
        c->add_option("--delta", build.delta, "budget as a fraction of H at the unconstrained optimum")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    for (CLI::App* c : {c_synth, c_trust}) c->add_option("--seed", build.seed)->capture_default_str();
    c_image->callback([&] { action = [&] { return cmd_make_image(build, out); }; });
    c_synth->callback([&] {
        apply_seed_override(build.seed);
        action = [&] { return cmd_make_synthetic(build, out); };
    });
    c_trust->callback([&] {
        apply_seed_override(build.seed);
        action = [&] { return cmd_make_trust_region(build, out); };
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        for (const CLI::App* sub : app.get_subcommands())
            if (sub->parsed()) {
                err << "run '" << sub->get_name() << " --help' for usage\n";
                return exit_code::usage;
            }
        err << "run with --help for usage\n";
        return exit_code::usage;
    }

    try {
        return action();
    } catch (const IoFailure& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::io_error;
    } catch (const InitFailure& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::init_failed;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::io_error;
    }
}

}  // namespace gtv
