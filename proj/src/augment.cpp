#include "graver_tv/augment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace gtv {

namespace {

constexpr double kImprovement = 1e-9;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool past(const std::optional<Clock::time_point>& deadline) { return deadline && Clock::now() >= *deadline; }

VertexSet support_of(const std::vector<int>& delta_x) {
    VertexSet s(static_cast<int>(delta_x.size()));
    for (std::size_t v = 0; v < delta_x.size(); ++v)
        if (delta_x[v] != 0) s.insert(static_cast<VertexId>(v));
    return s;
}

}  // namespace

Assignment solve_unconstrained(const SeparableProblem& problem, const Assignment& x0, UnconstrainedStats* stats) {
    UnconstrainedStats local;
    Assignment x = x0;
    const int max_rounds = 2 * problem.q() + 2;
    for (;;) {
        if (local.rounds == max_rounds)
            throw std::logic_error("solve_unconstrained: exceeded " + std::to_string(max_rounds) + " rounds");
        ++local.rounds;
        bool changed = false;
        for (Direction d : {Direction::up, Direction::down}) {
            ExactSubproblemResult r = solve_subproblem_exact(problem, x.x(), d);
            ++local.subproblem_solves;
            local.pivots += r.pivots;
            VertexSet s = support_of(r.delta_x);
            if (s.empty()) continue;
            x.shift(problem, s, sign_of(d));
            changed = true;
        }
        if (!changed) break;
    }
    if (stats) *stats = local;
    return x;
}

Assignment polish_2opt(const SeparableProblem& problem, const Assignment& start, int* moves) {
    const Graph& g = problem.graph();
    const int n = g.vertex_count();
    const int q = problem.q();
    Assignment x = start;
    int applied = 0;

    std::vector<std::vector<VertexId>> neighbours(static_cast<std::size_t>(n));
    for (const Edge& e : g.edges()) {
        neighbours[static_cast<std::size_t>(e.tail)].push_back(e.head);
        neighbours[static_cast<std::size_t>(e.head)].push_back(e.tail);
    }
    auto adjacent = [&](VertexId u, VertexId v) {
        const auto& nb = neighbours[static_cast<std::size_t>(u)];
        return std::find(nb.begin(), nb.end(), v) != nb.end();
    };
    auto try_apply = [&](std::span<const std::pair<VertexId, int>> change) {
        Evaluation d = delta_evaluate(problem, x, change);
        if (!(d.objective < -kImprovement) || !problem.within_budget(x.budget() + d.budget)) return false;
        x.apply(problem, change);
        ++applied;
        return true;
    };

    // Single-vertex deltas for +-1; non-adjacent pairs add up exactly, so
    // they are screened from these and only confirmed with delta_evaluate.
    std::vector<Evaluation> step(2 * static_cast<std::size_t>(n));
    bool improved = true;
    while (improved) {
        improved = false;
        for (VertexId v = 0; v < n && !improved; ++v) {
            for (int a : {-1, 1, -2, 2}) {
                int nv = x[v] + a;
                if (nv < 0 || nv > q) continue;
                std::pair<VertexId, int> ch[]{{v, nv}};
                if (try_apply(ch)) {
                    improved = true;
                    break;
                }
            }
        }
        if (improved) continue;

        for (VertexId v = 0; v < n; ++v)
            for (int k = 0; k < 2; ++k) {
                int nv = x[v] + (k == 0 ? -1 : 1);
                auto& ev = step[2 * static_cast<std::size_t>(v) + static_cast<std::size_t>(k)];
                if (nv < 0 || nv > q) {
                    ev = {std::numeric_limits<double>::infinity(), 0.0};
                    continue;
                }
                std::pair<VertexId, int> ch[]{{v, nv}};
                ev = delta_evaluate(problem, x, ch);
            }
        const double slack = 1e-9 * std::max(1.0, std::fabs(x.objective()));
        for (VertexId i = 0; i < n && !improved; ++i) {
            for (VertexId j = i + 1; j < n && !improved; ++j) {
                const bool adj = adjacent(i, j);
                for (int ki = 0; ki < 2 && !improved; ++ki)
                    for (int kj = 0; kj < 2 && !improved; ++kj) {
                        const auto& ei = step[2 * static_cast<std::size_t>(i) + static_cast<std::size_t>(ki)];
                        const auto& ej = step[2 * static_cast<std::size_t>(j) + static_cast<std::size_t>(kj)];
                        if (!std::isfinite(ei.objective) || !std::isfinite(ej.objective)) continue;
                        if (!adj) {
                            if (ei.objective + ej.objective >= -kImprovement + slack) continue;
                            if (!problem.within_budget(x.budget() + ei.budget + ej.budget - slack)) continue;
                        }
                        std::pair<VertexId, int> ch[]{{i, x[i] + (ki == 0 ? -1 : 1)}, {j, x[j] + (kj == 0 ? -1 : 1)}};
                        if (try_apply(ch)) improved = true;
                    }
            }
        }
    }
    if (moves) *moves = applied;
    return x;
}

TrialReport randomized_augmentation(const SeparableProblem& problem, const Assignment& x0,
                                    const AugmentConfig& config) {
    const auto start = Clock::now();
    if (!is_feasible(problem, x0.x()))
        throw std::invalid_argument("randomized_augmentation: initial point is infeasible");
    TrialReport rep;
    rep.seed = config.seed;
    Rng rng(config.seed);
    Assignment x = x0;

    SamplerConfig sc;
    sc.p = config.p;
    sc.rng_seed = config.seed;
    sc.max_pivots_per_call = config.max_pivots_per_call;
    sc.improvement_tolerance = config.improvement_tolerance;
    sc.deadline = config.deadline;

    auto record = [&] {
        if (config.record_trajectory) rep.trajectory.push_back({rep.pivots_total, x.objective(), x.budget()});
    };
    record();
    for (;;) {
        bool changed = false;
        for (Direction d : {Direction::up, Direction::down}) {
            if (past(config.deadline)) {
                rep.timed_out = true;
                break;
            }
            SampleResult s = sample_graver_move(problem, x, d, sc, rng);
            rep.pivots_total += s.pivots;
            if (s.timed_out) {
                rep.timed_out = true;
                break;
            }
            if (!s.move) continue;
            double before = x.objective();
            x.shift(problem, s.move->support, s.move->sign);
            if (!(x.objective() < before) || !problem.within_budget(x.budget()))
                throw std::logic_error("randomized_augmentation: sampled move did not improve feasibly");
            ++rep.moves_applied;
            changed = true;
            record();
        }
        if (rep.timed_out || !changed) break;
    }
    if (!rep.timed_out && config.polish) {
        x = polish_2opt(problem, x, &rep.polish_moves);
        if (rep.polish_moves > 0) record();
    }
    rep.objective = x.objective();
    rep.budget_used = x.budget();
    rep.final_x = std::move(x);
    rep.wall_time_seconds = seconds_since(start);
    return rep;
}

RunReport run_trials(const SeparableProblem& problem, const Assignment& init, const RunConfig& config) {
    if (config.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    if (config.parallel < 1) throw std::invalid_argument("run_trials: parallel must be >= 1");
    const auto start = Clock::now();
    std::optional<Clock::time_point> total_deadline;
    if (config.total_timeout_seconds)
        total_deadline = start + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(*config.total_timeout_seconds));

    std::vector<std::optional<TrialReport>> slots(static_cast<std::size_t>(config.trials));
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= config.trials || past(total_deadline)) return;
            AugmentConfig ac;
            ac.p = config.p;
            ac.seed = config.base_seed + static_cast<std::uint64_t>(i);
            ac.max_pivots_per_call = config.max_pivots_per_call;
            ac.record_trajectory = config.record_trajectory;
            ac.deadline = total_deadline;
            if (config.trial_timeout_seconds) {
                auto own = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                              std::chrono::duration<double>(*config.trial_timeout_seconds));
                if (!ac.deadline || own < *ac.deadline) ac.deadline = own;
            }
            try {
                slots[static_cast<std::size_t>(i)] = randomized_augmentation(problem, init, ac);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = config.trials;
                return;
            }
        }
    };
    if (config.parallel == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < config.parallel; ++k) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    RunReport rep;
    rep.config = config;
    rep.init = init;
    rep.best = init;
    for (auto& slot : slots) {
        if (!slot) continue;
        rep.trials.push_back(std::move(*slot));
        const TrialReport& t = rep.trials.back();
        if (rep.best_index < 0 || t.objective < rep.trials[static_cast<std::size_t>(rep.best_index)].objective)
            rep.best_index = static_cast<int>(rep.trials.size()) - 1;
    }
    if (rep.best_index >= 0) rep.best = rep.trials[static_cast<std::size_t>(rep.best_index)].final_x;
    rep.wall_time_seconds = seconds_since(start);
    return rep;
}

}  // namespace gtv
