#pragma once

// Coverage counts and the user/mac ratio distribution of a graph.

#include "mapmatch/model.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mapmatch {

/// Six-number summary of |S|/|M| over the mappings of a graph. Quartiles
/// use linear interpolation between order statistics.
struct RatioStats {
    double min = 0, q1 = 0, median = 0, mean = 0, q3 = 0, max = 0;
};

struct GraphStats {
    std::size_t matches = 0;
    std::size_t mappings = 0;
    std::size_t users_covered = 0; // sum of |S| over mappings, plus matches
    std::size_t macs_covered = 0;  // sum of |M| over mappings, plus matches
    std::optional<RatioStats> ratio; // absent when the graph has no mappings
};

GraphStats stats(const Graph& g);

/// Quantile of sorted data, interpolating linearly at position q * (n - 1).
double quantile_linear(const std::vector<double>& sorted, double q);

struct StatsRow {
    std::string label;
    GraphStats stats;
};

/// Coverage table followed by the ratio table, one row per entry. Rows
/// without mappings are left out of the ratio table.
std::string format_stats_tables(std::span<const StatsRow> rows);

} // namespace mapmatch
