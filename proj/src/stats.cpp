#include "mapmatch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace mapmatch {

double quantile_linear(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

GraphStats stats(const Graph& g) {
    GraphStats s;
    s.matches = g.matches.size();
    s.mappings = g.mappings.size();
    s.users_covered = s.matches;
    s.macs_covered = s.matches;
    std::vector<double> ratios;
    ratios.reserve(g.mappings.size());
    for (const auto& m : g.mappings) {
        s.users_covered += m.users.size();
        s.macs_covered += m.macs.size();
        ratios.push_back(static_cast<double>(m.users.size()) / static_cast<double>(m.macs.size()));
    }
    if (!ratios.empty()) {
        std::sort(ratios.begin(), ratios.end());
        RatioStats r;
        r.min = ratios.front();
        r.q1 = quantile_linear(ratios, 0.25);
        r.median = quantile_linear(ratios, 0.5);
        r.mean = std::accumulate(ratios.begin(), ratios.end(), 0.0) / static_cast<double>(ratios.size());
        r.q3 = quantile_linear(ratios, 0.75);
        r.max = ratios.back();
        s.ratio = r;
    }
    return s;
}

namespace {

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

std::string format_stats_tables(std::span<const StatsRow> rows) {
    std::string out;
    out += "# users covered and macs coverage include matched users and macs\n";
    out += "weeks | matches | mappings | users covered | macs coverage\n";
    for (const auto& row : rows) {
        const auto& s = row.stats;
        out += row.label + " | " + std::to_string(s.matches) + " | " + std::to_string(s.mappings) + " | " +
               std::to_string(s.users_covered) + " | " + std::to_string(s.macs_covered) + "\n";
    }
    if (std::none_of(rows.begin(), rows.end(), [](const StatsRow& r) { return r.stats.ratio.has_value(); })) {
        return out;
    }
    out += "\n";
    out += "weeks | Min. | 1st Qu. | Median | Mean | 3rd Qu. | Max.\n";
    for (const auto& row : rows) {
        if (!row.stats.ratio) continue;
        const auto& r = *row.stats.ratio;
        out += row.label + " | " + fixed3(r.min) + " | " + fixed3(r.q1) + " | " + fixed3(r.median) + " | " +
               fixed3(r.mean) + " | " + fixed3(r.q3) + " | " + fixed3(r.max) + "\n";
    }
    return out;
}

} // namespace mapmatch
