#pragma once

// Generators and independent reference computations shared by the test
// suites. Nothing here calls into the algebra.

#include "mapmatch/error.hpp"
#include "mapmatch/model.hpp"

#include <optional>

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace mapmatch::testing {

/// The error code `f` throws, or nullopt when it returns normally.
template <class F>
std::optional<Errc> error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline Graph graph_of(std::vector<Mapping> mappings, std::vector<Match> matches = {}) {
    return Graph{std::move(mappings), std::move(matches)};
}

inline Match match(const std::string& u, const std::string& m) {
    return Match{UserId(u), MacId(m)};
}

inline std::set<Match> match_set(const Graph& g) {
    return {g.matches.begin(), g.matches.end()};
}

inline ObservationBatch batch(Day day, Location loc, std::initializer_list<std::string> users,
                              std::initializer_list<std::string> macs) {
    ObservationBatch b{day, loc, {}, {}};
    for (const auto& u : users) b.users.emplace_back(u);
    for (const auto& m : macs) b.macs.emplace_back(m);
    std::sort(b.users.begin(), b.users.end());
    std::sort(b.macs.begin(), b.macs.end());
    return b;
}

inline BatchCollection collection(std::initializer_list<ObservationBatch> batches) {
    BatchCollection c;
    for (const auto& b : batches) c.add(b);
    return c;
}

/// Random canonical mapping over `alphabet` users u0.. and macs m0..
inline Mapping random_mapping(std::mt19937_64& rng, int alphabet, int max_side) {
    std::uniform_int_distribution<int> side(1, max_side);
    std::uniform_int_distribution<int> pick(0, alphabet - 1);
    std::set<std::string> users, macs;
    const int nu = side(rng), nm = side(rng);
    while (static_cast<int>(users.size()) < std::min(nu, alphabet)) users.insert("u" + std::to_string(pick(rng)));
    while (static_cast<int>(macs.size()) < std::min(nm, alphabet)) macs.insert("m" + std::to_string(pick(rng)));
    Mapping m;
    for (const auto& u : users) m.users.emplace_back(u);
    for (const auto& x : macs) m.macs.emplace_back(x);
    return m;
}

/// Up to `max_mappings` random canonical mappings; may overlap.
inline Graph random_graph(std::mt19937_64& rng, int max_mappings, int alphabet, int max_side) {
    std::uniform_int_distribution<int> count(0, max_mappings);
    Graph g;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) g.mappings.push_back(random_mapping(rng, alphabet, max_side));
    return g;
}

/// Mappings over `n_devices` hidden devices: device d carries user "u<d>"
/// and mac "m<d>", and every mapping holds both ids of each of its devices.
inline std::vector<Mapping> random_device_leaves(std::mt19937_64& rng, int n_leaves, int n_devices) {
    std::vector<Mapping> leaves;
    std::bernoulli_distribution in(0.4);
    for (int i = 0; i < n_leaves; ++i) {
        std::set<std::string> users, macs;
        for (int d = 0; d < n_devices; ++d) {
            if (in(rng)) {
                users.insert("u" + std::to_string(d));
                macs.insert("m" + std::to_string(d));
            }
        }
        if (users.empty()) continue;
        Mapping m;
        for (const auto& u : users) m.users.emplace_back(u);
        for (const auto& x : macs) m.macs.emplace_back(x);
        leaves.push_back(std::move(m));
    }
    return leaves;
}

/// The three-term pairwise product evaluated with std::set.
inline std::vector<Mapping> reference_product_pair(const Mapping& w, const Mapping& v) {
    const std::set<UserId> a(w.users.begin(), w.users.end()), b(v.users.begin(), v.users.end());
    const std::set<MacId> m(w.macs.begin(), w.macs.end()), n(v.macs.begin(), v.macs.end());
    auto minus = [](const auto& x, const auto& y) {
        std::decay_t<decltype(x)> r;
        for (const auto& e : x) {
            if (!y.count(e)) r.insert(e);
        }
        return r;
    };
    auto meet = [](const auto& x, const auto& y) {
        std::decay_t<decltype(x)> r;
        for (const auto& e : x) {
            if (y.count(e)) r.insert(e);
        }
        return r;
    };
    std::vector<Mapping> out;
    auto keep = [&](const std::set<UserId>& s, const std::set<MacId>& t) {
        if (s.empty() || t.empty()) return;
        out.push_back(Mapping{{s.begin(), s.end()}, {t.begin(), t.end()}});
    };
    keep(minus(a, b), minus(m, n));
    keep(meet(a, b), meet(m, n));
    keep(minus(b, a), minus(n, m));
    return out;
}

/// True when some w of g0 and v of g1 share a user but no mac, or a mac
/// but no user.
inline bool has_one_sided_overlap(const Graph& g0, const Graph& g1) {
    auto meets = [](const auto& x, const auto& y) {
        for (const auto& e : x) {
            if (std::find(y.begin(), y.end(), e) != y.end()) return true;
        }
        return false;
    };
    for (const auto& w : g0.mappings) {
        for (const auto& v : g1.mappings) {
            if (meets(w.users, v.users) != meets(w.macs, v.macs)) return true;
        }
    }
    return false;
}

/// True when every output mapping sits inside some input mapping and every
/// output match either was an input match or sits inside an input mapping.
inline bool refines(const Graph& out, const std::vector<const Graph*>& inputs) {
    auto inside = [&](const std::vector<UserId>& s, const std::vector<MacId>& m) {
        const std::set<UserId> ss(s.begin(), s.end());
        const std::set<MacId> ms(m.begin(), m.end());
        for (const Graph* g : inputs) {
            for (const auto& in : g->mappings) {
                const std::set<UserId> a(in.users.begin(), in.users.end());
                const std::set<MacId> n(in.macs.begin(), in.macs.end());
                bool ok = true;
                for (const auto& u : ss) ok = ok && a.count(u);
                for (const auto& x : ms) ok = ok && n.count(x);
                if (ok) return true;
            }
        }
        return false;
    };
    for (const auto& m : out.mappings) {
        if (!inside(m.users, m.macs)) return false;
    }
    for (const auto& m : out.matches) {
        bool was_match = false;
        for (const Graph* g : inputs) {
            for (const auto& x : g->matches) was_match = was_match || x == m;
        }
        if (!was_match && !inside({m.user}, {m.mac})) return false;
    }
    return true;
}

} // namespace mapmatch::testing
