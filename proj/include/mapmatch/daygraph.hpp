#pragma once

// Day graph construction from per-location observation batches.
//
// For a location i on day t, the batch mapping splits into a stayer part
// (everything not seen at any other location within the lookahead window)
// and one travel part per destination j (what is also seen at j within the
// window). The day graph is the sum of all stayer parts plus, for each
// destination, the product over origins of the travel parts into it.

#include "mapmatch/model.hpp"

#include <optional>
#include <vector>

namespace mapmatch {

struct DayWindow {
    int lookahead = 1; // days after t that still count as a landing; >= 0
};

struct TravelKey {
    Location origin = 0;
    Location destination = 0;
    Day day = 0;
};

/// Throws Error(NoSuchBatch) when (t, i) has no batch.
std::optional<Mapping> stayer_mapping(Location origin, Day day, const BatchCollection& obs,
                                      DayWindow window = {});

/// Throws Error(NoSuchBatch) when the origin batch is missing and
/// Error(InvalidArgument) when origin == destination. Missing destination
/// batches count as empty.
std::optional<Mapping> travel_mapping(const TravelKey& key, const BatchCollection& obs,
                                      DayWindow window = {});

/// Every stayer and travel mapping of `day`, before any product: stayers in
/// ascending origin order, then travels by ascending (destination, origin).
std::vector<Mapping> leaf_mappings(Day day, const BatchCollection& obs, DayWindow window = {});

/// Normalized day graph. Throws Error(EmptyDay) when `day` has no batch.
Graph build_day_graph(Day day, const BatchCollection& obs, DayWindow window = {});

} // namespace mapmatch
