#include "mapmatch/daygraph.hpp"

#include "mapmatch/algebra.hpp"
#include "mapmatch/error.hpp"
#include "mapmatch/set_ops.hpp"

#include <string>

namespace mapmatch {

namespace {

void check_window(DayWindow window) {
    if (window.lookahead < 0) throw Error(Errc::InvalidArgument, "lookahead must be >= 0");
}

const ObservationBatch& require_batch(const BatchCollection& obs, Day day, Location loc) {
    const ObservationBatch* b = obs.find(day, loc);
    if (b == nullptr) {
        throw Error(Errc::NoSuchBatch,
                    "no batch for day " + std::to_string(day) + " location " + std::to_string(loc));
    }
    return *b;
}

// Union of the batches at `loc` over days [day, day + lookahead].
void window_union(const BatchCollection& obs, Location loc, Day day, DayWindow window,
                  UserSet& users, MacSet& macs) {
    for (int n = 0; n <= window.lookahead; ++n) {
        if (const ObservationBatch* b = obs.find(day + n, loc)) {
            users.insert(users.end(), b->users.begin(), b->users.end());
            macs.insert(macs.end(), b->macs.begin(), b->macs.end());
        }
    }
}

std::optional<Mapping> non_empty(UserSet users, MacSet macs) {
    if (users.empty() || macs.empty()) return std::nullopt;
    return Mapping{std::move(users), std::move(macs)};
}

} // namespace

std::optional<Mapping> stayer_mapping(Location origin, Day day, const BatchCollection& obs,
                                      DayWindow window) {
    check_window(window);
    const ObservationBatch& here = require_batch(obs, day, origin);
    UserSet seen_users;
    MacSet seen_macs;
    for (Location j : obs.locations()) {
        if (j != origin) window_union(obs, j, day, window, seen_users, seen_macs);
    }
    sets::sort_unique(seen_users);
    sets::sort_unique(seen_macs);
    return non_empty(sets::difference(here.users, seen_users), sets::difference(here.macs, seen_macs));
}

std::optional<Mapping> travel_mapping(const TravelKey& key, const BatchCollection& obs,
                                      DayWindow window) {
    check_window(window);
    if (key.origin == key.destination) {
        throw Error(Errc::InvalidArgument, "travel origin equals destination");
    }
    const ObservationBatch& here = require_batch(obs, key.day, key.origin);
    UserSet there_users;
    MacSet there_macs;
    window_union(obs, key.destination, key.day, window, there_users, there_macs);
    sets::sort_unique(there_users);
    sets::sort_unique(there_macs);
    return non_empty(sets::intersection(here.users, there_users),
                     sets::intersection(here.macs, there_macs));
}

std::vector<Mapping> leaf_mappings(Day day, const BatchCollection& obs, DayWindow window) {
    std::vector<Mapping> leaves;
    const auto origins = obs.locations_on(day);
    const auto all = obs.locations();
    for (Location i : origins) {
        if (auto m = stayer_mapping(i, day, obs, window)) leaves.push_back(std::move(*m));
    }
    for (Location j : all) {
        for (Location i : origins) {
            if (i == j) continue;
            if (auto m = travel_mapping({i, j, day}, obs, window)) leaves.push_back(std::move(*m));
        }
    }
    return leaves;
}

Graph build_day_graph(Day day, const BatchCollection& obs, DayWindow window) {
    check_window(window);
    const auto origins = obs.locations_on(day);
    if (origins.empty()) throw Error(Errc::EmptyDay, "no batches on day " + std::to_string(day));

    Graph d;
    for (Location i : origins) {
        if (auto m = stayer_mapping(i, day, obs, window)) d.mappings.push_back(std::move(*m));
    }
    for (Location j : obs.locations()) {
        Graph into_j;
        for (Location i : origins) {
            if (i == j) continue;
            if (auto m = travel_mapping({i, j, day}, obs, window)) {
                into_j = product_exact(into_j, Graph{{std::move(*m)}, {}});
            }
        }
        d = sum(d, into_j);
    }
    return normalize(std::move(d));
}

} // namespace mapmatch
