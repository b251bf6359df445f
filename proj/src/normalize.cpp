#include "mapmatch/algebra.hpp"

#include "mapmatch/error.hpp"
#include "mapmatch/set_ops.hpp"

#include <algorithm>
#include <deque>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

namespace mapmatch {

namespace {

std::atomic<ScopedNormalizeAudit*> g_active_audit{nullptr};

template <class T>
void ensure_sorted_unique(std::vector<T>& v) {
    if (std::adjacent_find(v.begin(), v.end(), [](const T& a, const T& b) { return !(a < b); }) != v.end()) {
        sets::sort_unique(v);
    }
}

std::vector<Match> drop_conflicting(std::vector<Match> matches) {
    ensure_sorted_unique(matches);
    std::unordered_map<std::string_view, int> user_count;
    std::unordered_map<std::string_view, int> mac_count;
    for (const auto& m : matches) {
        ++user_count[m.user.str()];
        ++mac_count[m.mac.str()];
    }
    std::vector<Match> out;
    out.reserve(matches.size());
    for (auto& m : matches) {
        if (user_count[m.user.str()] == 1 && mac_count[m.mac.str()] == 1) out.push_back(std::move(m));
    }
    return out;
}

void scrub(std::vector<Mapping>& maps, const std::vector<Match>& matches) {
    if (matches.empty()) return;
    std::unordered_set<std::string_view> users;
    std::unordered_set<std::string_view> macs;
    for (const auto& m : matches) {
        users.insert(m.user.str());
        macs.insert(m.mac.str());
    }
    for (auto& m : maps) {
        std::erase_if(m.users, [&](const UserId& u) { return users.contains(u.str()); });
        std::erase_if(m.macs, [&](const MacId& x) { return macs.contains(x.str()); });
    }
    std::erase_if(maps, [](const Mapping& m) { return has_empty_side(m); });
}

// Splits overlapping mappings with product_pair until no token is shared.
// Mappings are inserted in order into a settled, pairwise disjoint set; an
// incoming mapping that overlaps a settled one replaces it by the two pieces
// contained in the settled mapping, and its own remainder is retried.
std::vector<Mapping> make_disjoint(std::vector<Mapping> maps) {
    constexpr std::size_t none = static_cast<std::size_t>(-1);

    std::deque<Mapping> settled;
    std::vector<bool> alive;
    std::unordered_map<std::string_view, std::size_t> user_owner;
    std::unordered_map<std::string_view, std::size_t> mac_owner;
    user_owner.reserve(maps.size() * 4);
    mac_owner.reserve(maps.size() * 4);

    auto settle = [&](Mapping m) {
        const std::size_t idx = settled.size();
        settled.push_back(std::move(m));
        alive.push_back(true);
        for (const auto& u : settled.back().users) user_owner[u.str()] = idx;
        for (const auto& x : settled.back().macs) mac_owner[x.str()] = idx;
    };
    auto retire = [&](std::size_t idx) {
        alive[idx] = false;
        for (const auto& u : settled[idx].users) user_owner.erase(u.str());
        for (const auto& x : settled[idx].macs) mac_owner.erase(x.str());
    };
    auto first_overlap = [&](const Mapping& m) {
        std::size_t best = none;
        for (const auto& u : m.users) {
            if (auto it = user_owner.find(u.str()); it != user_owner.end()) best = std::min(best, it->second);
        }
        for (const auto& x : m.macs) {
            if (auto it = mac_owner.find(x.str()); it != mac_owner.end()) best = std::min(best, it->second);
        }
        return best;
    };

    std::deque<Mapping> pending;
    for (auto& m : maps) {
        pending.push_back(std::move(m));
        while (!pending.empty()) {
            Mapping cur = std::move(pending.front());
            pending.pop_front();
            const std::size_t r = first_overlap(cur);
            if (r == none) {
                settle(std::move(cur));
                continue;
            }
            retire(r);
            Mapping old = std::move(settled[r]);
            auto rest_users = sets::difference(cur.users, old.users);
            auto rest_macs = sets::difference(cur.macs, old.macs);
            auto old_users = sets::difference(old.users, cur.users);
            auto old_macs = sets::difference(old.macs, cur.macs);
            auto both_users = sets::intersection(old.users, cur.users);
            auto both_macs = sets::intersection(old.macs, cur.macs);
            if (!old_users.empty() && !old_macs.empty()) settle({std::move(old_users), std::move(old_macs)});
            if (!both_users.empty() && !both_macs.empty()) settle({std::move(both_users), std::move(both_macs)});
            if (!rest_users.empty() && !rest_macs.empty()) {
                pending.push_front({std::move(rest_users), std::move(rest_macs)});
            }
        }
    }

    std::vector<Mapping> out;
    out.reserve(settled.size());
    for (std::size_t i = 0; i < settled.size(); ++i) {
        if (alive[i]) out.push_back(std::move(settled[i]));
    }
    return out;
}

} // namespace

void audit_normalized(const Graph& g) {
    ScopedNormalizeAudit* audit = g_active_audit.load(std::memory_order_acquire);
    if (audit == nullptr) return;
    audit->normalizations_.fetch_add(1, std::memory_order_relaxed);
    if (count_duplicate_tokens(g) != 0) audit->violations_.fetch_add(1, std::memory_order_relaxed);
}

ScopedNormalizeAudit::ScopedNormalizeAudit() {
    ScopedNormalizeAudit* expected = nullptr;
    if (!g_active_audit.compare_exchange_strong(expected, this)) {
        throw Error(Errc::InvalidArgument, "a normalize audit is already active");
    }
}

ScopedNormalizeAudit::~ScopedNormalizeAudit() {
    g_active_audit.store(nullptr);
}

Graph normalize(Graph g) {
    std::vector<Mapping> maps;
    maps.reserve(g.mappings.size());
    for (auto& m : g.mappings) {
        ensure_sorted_unique(m.users);
        ensure_sorted_unique(m.macs);
        if (!has_empty_side(m)) maps.push_back(std::move(m));
    }

    std::vector<Match> matches = drop_conflicting(std::move(g.matches));
    scrub(maps, matches);
    maps = make_disjoint(std::move(maps));

    Graph out;
    out.mappings.reserve(maps.size());
    std::vector<Match> extracted;
    for (auto& m : maps) {
        if (is_match(m)) {
            extracted.push_back(Match{std::move(m.users.front()), std::move(m.macs.front())});
        } else {
            out.mappings.push_back(std::move(m));
        }
    }
    std::sort(extracted.begin(), extracted.end());
    out.matches.reserve(matches.size() + extracted.size());
    std::merge(matches.begin(), matches.end(), extracted.begin(), extracted.end(),
               std::back_inserter(out.matches));
    std::sort(out.mappings.begin(), out.mappings.end(), [](const Mapping& a, const Mapping& b) {
        return a.users.front() < b.users.front();
    });

    audit_normalized(out);
    return out;
}

} // namespace mapmatch
