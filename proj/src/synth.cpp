#include "mapmatch/synth.hpp"

#include "mapmatch/error.hpp"
#include "mapmatch/io.hpp"
#include "mapmatch/stats.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_map>

namespace mapmatch {

using json = nlohmann::json;

namespace {

// mt19937_64 is fully specified by the standard; the distributions are not,
// so draws are mapped to [0, 1) and to ranges by hand.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return uniform() < p; }
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

private:
    std::mt19937_64 engine_;
};

std::string user_token(std::size_t device) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "uid-%06zu", device);
    return buf;
}

std::string alias_token(std::size_t device, std::size_t k) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "uid-%06zu-%zu", device, k);
    return buf;
}

std::string mac_token(std::size_t device) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "02:00:%02x:%02x:%02x:%02x", static_cast<unsigned>((device >> 24) & 0xff),
                  static_cast<unsigned>((device >> 16) & 0xff), static_cast<unsigned>((device >> 8) & 0xff),
                  static_cast<unsigned>(device & 0xff));
    return buf;
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

} // namespace

void validate(const WorldParams& p) {
    if (p.n_locations < 1 || p.n_devices < 1 || p.n_days < 1) {
        throw Error(Errc::InvalidArgument, "locations, devices and days must be >= 1");
    }
    if (!is_probability(p.move_prob) || !is_probability(p.obs_prob_user) ||
        !is_probability(p.obs_prob_mac) || !is_probability(p.churn_prob)) {
        throw Error(Errc::InvalidArgument, "probabilities must lie in [0, 1]");
    }
}

const UserId& WorldTruth::user_on(Day day, std::size_t device) const {
    const auto version = schedule.at(static_cast<std::size_t>(day)).at(device).user_version;
    const DeviceIds& ids = pairs.at(device);
    return version == 0 ? ids.user : ids.aliases.at(version - 1);
}

WorldTruth generate_world(const WorldParams& p) {
    validate(p);
    Rng rng(p.seed);
    const auto n_dev = static_cast<std::size_t>(p.n_devices);
    const auto n_loc = static_cast<std::uint64_t>(p.n_locations);

    WorldTruth truth;
    truth.pairs.reserve(n_dev);
    for (std::size_t x = 0; x < n_dev; ++x) {
        truth.pairs.push_back({UserId(user_token(x)), MacId(mac_token(x)), {}});
    }

    std::vector<Location> current(n_dev);
    for (auto& loc : current) loc = static_cast<Location>(rng.below(n_loc));
    std::vector<std::uint32_t> version(n_dev, 0);

    truth.schedule.assign(static_cast<std::size_t>(p.n_days), std::vector<Presence>(n_dev));
    for (int t = 0; t < p.n_days; ++t) {
        for (std::size_t x = 0; x < n_dev; ++x) {
            if (p.churn_prob > 0.0 && t > 0 && rng.chance(p.churn_prob)) {
                auto& aliases = truth.pairs[x].aliases;
                aliases.emplace_back(alias_token(x, aliases.size() + 1));
                version[x] = static_cast<std::uint32_t>(aliases.size());
            }
            Presence& pr = truth.schedule[t][x];
            pr.user_version = version[x];
            const Location here = current[x];
            pr.locations.push_back(here);
            if (n_loc > 1 && rng.chance(p.move_prob)) {
                const auto there = static_cast<Location>((static_cast<std::uint64_t>(here) + 1 +
                                                          rng.below(n_loc - 1)) % n_loc);
                if (rng.chance(0.5)) pr.locations.push_back(there); // lands the same day
                current[x] = there;
            }
        }
    }
    return truth;
}

BatchCollection sample_observations(const WorldTruth& truth, const WorldParams& p) {
    validate(p);
    Rng rng(p.seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL);
    BatchCollection obs;
    for (std::size_t t = 0; t < truth.schedule.size(); ++t) {
        const Day day = static_cast<Day>(t);
        for (std::size_t x = 0; x < truth.schedule[t].size(); ++x) {
            for (Location loc : truth.schedule[t][x].locations) {
                const bool see_user = rng.chance(p.obs_prob_user);
                const bool see_mac = rng.chance(p.obs_prob_mac);
                if (see_user) obs.add_user(day, loc, truth.user_on(day, x));
                if (see_mac) obs.add_mac(day, loc, truth.pairs[x].mac);
            }
        }
    }
    obs.seal();
    return obs;
}

std::vector<Mapping> leaf_mappings_between(Day first, Day last, const BatchCollection& obs,
                                           DayWindow window) {
    std::vector<Mapping> leaves;
    for (Day t = first; t <= last; ++t) {
        if (!obs.has_day(t)) continue;
        auto day_leaves = leaf_mappings(t, obs, window);
        std::move(day_leaves.begin(), day_leaves.end(), std::back_inserter(leaves));
    }
    return leaves;
}

EvalReport evaluate(const Graph& g, const WorldTruth& truth) {
    std::unordered_map<std::string_view, std::size_t> device_of_user;
    std::unordered_map<std::string_view, std::size_t> device_of_mac;
    for (std::size_t x = 0; x < truth.pairs.size(); ++x) {
        device_of_user[truth.pairs[x].user.str()] = x;
        for (const auto& a : truth.pairs[x].aliases) device_of_user[a.str()] = x;
        device_of_mac[truth.pairs[x].mac.str()] = x;
    }

    EvalReport r;
    const GraphStats s = stats(g);
    r.n_matches = s.matches;
    r.n_mappings = s.mappings;
    r.users_covered = s.users_covered;
    r.macs_covered = s.macs_covered;
    r.truth_pairs = truth.pairs.size();

    std::vector<bool> found(truth.pairs.size(), false);
    for (const auto& m : g.matches) {
        auto u = device_of_user.find(m.user.str());
        auto x = device_of_mac.find(m.mac.str());
        if (u != device_of_user.end() && x != device_of_mac.end() && u->second == x->second) {
            ++r.correct;
            found[u->second] = true;
        }
    }
    if (r.n_matches == 0) {
        r.precision = 1.0;
        r.precision_defined = false;
    } else {
        r.precision = static_cast<double>(r.correct) / static_cast<double>(r.n_matches);
    }
    const auto devices_found = static_cast<std::size_t>(std::count(found.begin(), found.end(), true));
    r.recall = truth.pairs.empty() ? 0.0
                                   : static_cast<double>(devices_found) / static_cast<double>(truth.pairs.size());
    return r;
}

std::string format_eval_report(const EvalReport& r) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "precision %.3f%s\nrecall %.3f\ncorrect %zu\nmatches %zu\nmappings %zu\n"
                  "users covered %zu\nmacs coverage %zu\ntruth pairs %zu\n",
                  r.precision, r.precision_defined ? "" : " (no matches)", r.recall, r.correct, r.n_matches,
                  r.n_mappings, r.users_covered, r.macs_covered, r.truth_pairs);
    return buf;
}

Graph random_block_graph(std::size_t n_mappings, std::size_t side, std::uint64_t seed) {
    if (side < 2) throw Error(Errc::InvalidArgument, "block side must be >= 2");
    Rng rng(seed);
    std::vector<std::size_t> devices(n_mappings * side);
    for (std::size_t i = 0; i < devices.size(); ++i) devices[i] = i;
    for (std::size_t i = devices.size(); i > 1; --i) std::swap(devices[i - 1], devices[rng.below(i)]);
    Graph g;
    g.mappings.reserve(n_mappings);
    for (std::size_t b = 0; b < n_mappings; ++b) {
        Mapping m;
        for (std::size_t k = 0; k < side; ++k) {
            const std::size_t x = devices[b * side + k];
            m.users.emplace_back(user_token(x));
            m.macs.emplace_back(mac_token(x));
        }
        std::sort(m.users.begin(), m.users.end());
        std::sort(m.macs.begin(), m.macs.end());
        g.mappings.push_back(std::move(m));
    }
    std::sort(g.mappings.begin(), g.mappings.end(),
              [](const Mapping& a, const Mapping& b) { return a.users.front() < b.users.front(); });
    return g;
}

std::string serialize_truth(const WorldTruth& truth) {
    std::string out;
    for (std::size_t x = 0; x < truth.pairs.size(); ++x) {
        const auto& d = truth.pairs[x];
        json rec = {{"device", x}, {"user", d.user.str()}, {"mac", d.mac.str()}};
        if (!d.aliases.empty()) {
            json a = json::array();
            for (const auto& u : d.aliases) a.push_back(u.str());
            rec["aliases"] = std::move(a);
        }
        out += rec.dump();
        out += '\n';
    }
    return out;
}

void write_truth(const WorldTruth& truth, const std::filesystem::path& path) {
    write_file_atomically(path, serialize_truth(truth));
}

WorldTruth read_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    WorldTruth truth;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json rec = json::parse(line);
            DeviceIds d{UserId(rec.at("user").get<std::string>()), MacId(rec.at("mac").get<std::string>()), {}};
            if (rec.contains("aliases")) {
                for (const auto& a : rec["aliases"]) d.aliases.emplace_back(a.get<std::string>());
            }
            truth.pairs.push_back(std::move(d));
        } catch (const json::exception& e) {
            throw Error(Errc::MalformedLine, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return truth;
}

std::string serialize_schedule(const WorldTruth& truth) {
    std::string out;
    for (std::size_t t = 0; t < truth.schedule.size(); ++t) {
        for (std::size_t x = 0; x < truth.schedule[t].size(); ++x) {
            json rec = {{"day", t}, {"device", x}, {"locs", truth.schedule[t][x].locations}};
            out += rec.dump();
            out += '\n';
        }
    }
    return out;
}

} // namespace mapmatch
