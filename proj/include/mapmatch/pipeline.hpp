#pragma once

// Window decomposition and tree-structured combination.
//
// The observed day range is cut into contiguous windows. Each window is
// folded day by day (older result in the chunked role, newer day graph in the
// shared role); windows fold concurrently. The window graphs are then
// combined as a binary tree of products, pairing neighbours level by level
// and promoting an odd trailing graph unchanged. One worker budget is shared
// across both phases: when a level has fewer nodes than workers, the spare
// workers go to the chunked products of that level.

#include "mapmatch/algebra.hpp"
#include "mapmatch/daygraph.hpp"
#include "mapmatch/model.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace mapmatch {

struct DayInterval {
    Day start = 0;
    Day end = 0; // inclusive

    friend bool operator==(const DayInterval&, const DayInterval&) = default;
};

struct WindowPlan {
    int window_days = 14;
    std::vector<DayInterval> intervals;
};

/// Throws Error(BadInterval) when first > last or window_days < 1.
WindowPlan plan_windows(Day first_day, Day last_day, int window_days);

/// Folds the day graphs of `interval`. Days without batches are skipped with
/// a warning on stderr. Returns an empty graph when no day has batches.
Graph fold_window(DayInterval interval, const BatchCollection& obs, DayWindow window,
                  ProductMode mode, int workers = 1);

struct LevelReport {
    int level = 0;
    std::size_t nodes = 0;
    std::size_t mappings = 0;
    std::size_t matches = 0;
    double wall_ms = 0.0;
};

struct CombineResult {
    Graph graph;
    std::vector<LevelReport> levels; // level 0 describes the inputs
    std::size_t products = 0;
};

/// Throws Error(InvalidArgument) on an empty input sequence.
CombineResult tree_combine(std::vector<Graph> graphs, ProductMode mode, int workers = 1);

struct RunOptions {
    int window_days = 14;
    DayWindow day_window{};
    ProductMode mode = ProductMode::chunked(1);
    bool auto_chunks = true; // chunk count follows the worker share of each product
    int workers = 1;
};

struct RunResult {
    WindowPlan plan;
    std::vector<Graph> window_graphs;
    Graph graph;
    std::vector<LevelReport> levels; // level 0: window folds
    std::size_t products = 0;
};

/// Plan, fold every window, combine. Throws Error(EmptyInput) for an empty
/// collection.
RunResult run(const BatchCollection& obs, const RunOptions& options);

/// Same, reading the events file first.
RunResult run(const std::filesystem::path& events, const RunOptions& options);

/// One line per level: level, nodes, mappings, matches and, when requested,
/// wall time in milliseconds. Without timings the text is deterministic.
std::string format_run_report(const std::vector<LevelReport>& levels, bool with_timings);

} // namespace mapmatch
