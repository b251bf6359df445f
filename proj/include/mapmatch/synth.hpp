#pragma once

// Synthetic worlds with known ground truth, and the brute-force oracles used
// to check the algebra and the pipeline against them.

#include "mapmatch/daygraph.hpp"
#include "mapmatch/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mapmatch {

struct WorldParams {
    int n_locations = 3;
    int n_devices = 50;
    int n_days = 20;
    double move_prob = 0.3;     // chance a device flies on a given day
    double obs_prob_user = 1.0; // chance a present device's user id is sampled
    double obs_prob_mac = 1.0;  // chance a present device's mac is sampled
    std::uint64_t seed = 1;
    double churn_prob = 0.0;    // chance a device switches to a fresh user id on a given day
};

/// Throws Error(InvalidArgument) for counts < 1 or probabilities outside [0, 1].
void validate(const WorldParams& p);

struct DeviceIds {
    UserId user;                 // first user id of the device
    MacId mac;
    std::vector<UserId> aliases; // further user ids, only with churn
};

struct Presence {
    std::vector<Location> locations; // empty when absent; two on a same-day flight
    std::uint32_t user_version = 0;  // 0: DeviceIds::user, k: aliases[k - 1]
};

struct WorldTruth {
    std::vector<DeviceIds> pairs;
    std::vector<std::vector<Presence>> schedule; // [day][device]

    const UserId& user_on(Day day, std::size_t device) const;
};

/// Each device starts at a uniformly chosen location. On each day it either
/// stays or, with move_prob, flies to a uniformly chosen other location,
/// landing the same day (seen at both ends) or the next day.
WorldTruth generate_world(const WorldParams& p);

/// Per (day, device, location): the user id is recorded with obs_prob_user
/// and the mac with obs_prob_mac, independently.
BatchCollection sample_observations(const WorldTruth& truth, const WorldParams& p);

/// Leaf mappings of every day in [first, last] that has batches.
std::vector<Mapping> leaf_mappings_between(Day first, Day last, const BatchCollection& obs,
                                           DayWindow window = {});

/// Groups tokens by the set of leaves containing them; one mapping per
/// signature that has both users and macs. The finest refinement any
/// sequence of pairwise products can reach under complete observation.
Graph trace_oracle(const std::vector<Mapping>& leaves);

/// Repeatedly replaces any two overlapping mappings by their pairwise
/// product, extracting matches and scrubbing matched tokens, until no two
/// mappings overlap.
Graph naive_fixpoint(const Graph& g);

struct EvalReport {
    double precision = 1.0;
    bool precision_defined = true; // false when no matches were emitted
    double recall = 0.0;
    std::size_t correct = 0;
    std::size_t n_matches = 0;
    std::size_t n_mappings = 0;
    std::size_t users_covered = 0;
    std::size_t macs_covered = 0;
    std::size_t truth_pairs = 0;
};

/// A match is correct when its user is any user id of the device owning its
/// mac. Recall is over devices.
EvalReport evaluate(const Graph& g, const WorldTruth& truth);

std::string format_eval_report(const EvalReport& r);

/// A normalized graph of `n_mappings` blocks over `n_mappings * side` devices:
/// the devices are shuffled and cut into consecutive blocks of `side`, each
/// block carrying its devices' user and mac ids. Two calls with different
/// seeds give two overlapping partitions of the same devices.
Graph random_block_graph(std::size_t n_mappings, std::size_t side, std::uint64_t seed);

/// One JSON line per device: {"device":i,"user":...,"mac":...[,"aliases":[...]]}.
std::string serialize_truth(const WorldTruth& truth);
void write_truth(const WorldTruth& truth, const std::filesystem::path& path);
/// Reads pairs only; the schedule is left empty.
WorldTruth read_truth(const std::filesystem::path& path);

/// One JSON line per (day, device): {"day":t,"device":i,"locs":[...]}.
std::string serialize_schedule(const WorldTruth& truth);

} // namespace mapmatch
