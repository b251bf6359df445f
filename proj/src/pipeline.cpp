#include "mapmatch/pipeline.hpp"

#include "mapmatch/error.hpp"
#include "mapmatch/io.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace mapmatch {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

ProductMode mode_for(const ProductMode& mode, bool auto_chunks, int share) {
    if (mode.is_chunked() && auto_chunks) return ProductMode::chunked(static_cast<std::size_t>(share));
    return mode;
}

LevelReport describe(int level, const std::vector<Graph>& graphs, double wall_ms) {
    LevelReport r;
    r.level = level;
    r.nodes = graphs.size();
    for (const auto& g : graphs) {
        r.mappings += g.mappings.size();
        r.matches += g.matches.size();
    }
    r.wall_ms = wall_ms;
    return r;
}

CombineResult combine_levels(std::vector<Graph> graphs, const ProductMode& mode, bool auto_chunks,
                             int workers, std::vector<LevelReport> levels) {
    if (graphs.empty()) throw Error(Errc::InvalidArgument, "tree_combine needs at least one graph");
    workers = std::max(1, workers);

    CombineResult result;
    result.levels = std::move(levels);
    int level = static_cast<int>(result.levels.size());
    while (graphs.size() > 1) {
        const auto start = Clock::now();
        const std::size_t pairs = graphs.size() / 2;
        std::vector<Graph> next(pairs + graphs.size() % 2);
        const int outer = std::max(1, std::min<int>(workers, static_cast<int>(pairs)));
        const int share = std::max(1, workers / outer);
        const ProductMode node_mode = mode_for(mode, auto_chunks, share);

#pragma omp parallel for num_threads(outer) schedule(dynamic, 1) if (outer > 1)
        for (std::size_t p = 0; p < pairs; ++p) {
            next[p] = product(graphs[2 * p], graphs[2 * p + 1], node_mode, share);
        }
        if (graphs.size() % 2 == 1) next.back() = std::move(graphs.back());

        result.products += pairs;
        graphs = std::move(next);
        result.levels.push_back(describe(level++, graphs, elapsed_ms(start)));
    }
    result.graph = normalize(std::move(graphs.front()));
    return result;
}

struct NestedParallelism {
    NestedParallelism() : saved(omp_get_max_active_levels()) { omp_set_max_active_levels(2); }
    ~NestedParallelism() { omp_set_max_active_levels(saved); }
    int saved;
};

} // namespace

WindowPlan plan_windows(Day first_day, Day last_day, int window_days) {
    if (first_day > last_day) {
        throw Error(Errc::BadInterval, "first day " + std::to_string(first_day) + " after last day " +
                                           std::to_string(last_day));
    }
    if (window_days < 1) throw Error(Errc::BadInterval, "window must span at least one day");
    WindowPlan plan;
    plan.window_days = window_days;
    for (Day s = first_day; s <= last_day; s += window_days) {
        plan.intervals.push_back({s, std::min(last_day, s + window_days - 1)});
    }
    return plan;
}

Graph fold_window(DayInterval interval, const BatchCollection& obs, DayWindow window,
                  ProductMode mode, int workers) {
    if (interval.start > interval.end) throw Error(Errc::BadInterval, "interval start after end");
    Graph acc;
    bool started = false;
    for (Day t = interval.start; t <= interval.end; ++t) {
        if (!obs.has_day(t)) {
            std::clog << "warning: day " << t << " has no observations, skipped\n";
            continue;
        }
        Graph today = build_day_graph(t, obs, window);
        if (!started) {
            acc = std::move(today);
            started = true;
        } else {
            acc = product(acc, today, mode, workers);
        }
    }
    return acc;
}

CombineResult tree_combine(std::vector<Graph> graphs, ProductMode mode, int workers) {
    NestedParallelism nested;
    const auto start = Clock::now();
    std::vector<LevelReport> levels{describe(0, graphs, 0.0)};
    levels.front().wall_ms = elapsed_ms(start);
    return combine_levels(std::move(graphs), mode, false, workers, std::move(levels));
}

RunResult run(const BatchCollection& obs, const RunOptions& options) {
    if (obs.empty()) throw Error(Errc::EmptyInput, "no observations");
    NestedParallelism nested;
    const int workers = std::max(1, options.workers);

    RunResult result;
    result.plan = plan_windows(obs.first_day(), obs.last_day(), options.window_days);
    const auto& intervals = result.plan.intervals;

    const auto start = Clock::now();
    result.window_graphs.resize(intervals.size());
    const int outer = std::max(1, std::min<int>(workers, static_cast<int>(intervals.size())));
    const int share = std::max(1, workers / outer);
    const ProductMode fold_mode = mode_for(options.mode, options.auto_chunks, share);

    // Exceptions must not cross the OpenMP region boundary.
    std::vector<std::exception_ptr> errors(intervals.size());
#pragma omp parallel for num_threads(outer) schedule(dynamic, 1) if (outer > 1)
    for (std::size_t w = 0; w < intervals.size(); ++w) {
        try {
            result.window_graphs[w] = fold_window(intervals[w], obs, options.day_window, fold_mode, share);
        } catch (...) {
            errors[w] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<LevelReport> levels{describe(0, result.window_graphs, elapsed_ms(start))};
    CombineResult combined = combine_levels(result.window_graphs, options.mode, options.auto_chunks,
                                            workers, std::move(levels));
    result.graph = std::move(combined.graph);
    result.levels = std::move(combined.levels);
    result.products = combined.products;
    return result;
}

RunResult run(const std::filesystem::path& events, const RunOptions& options) {
    return run(parse_events(events), options);
}

std::string format_run_report(const std::vector<LevelReport>& levels, bool with_timings) {
    std::ostringstream os;
    os << (with_timings ? "level nodes mappings matches wall_ms\n" : "level nodes mappings matches\n");
    for (const auto& l : levels) {
        os << l.level << ' ' << l.nodes << ' ' << l.mappings << ' ' << l.matches;
        if (with_timings) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", l.wall_ms);
            os << ' ' << buf;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace mapmatch
