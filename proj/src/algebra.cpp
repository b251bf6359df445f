#include "mapmatch/algebra.hpp"

#include "mapmatch/error.hpp"
#include "mapmatch/set_ops.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdint>
#include <string_view>

namespace mapmatch {

ProductMode ProductMode::chunked(std::size_t chunks) {
    if (chunks < 1) throw Error(Errc::InvalidArgument, "chunk count must be >= 1");
    return {Kind::Chunked, chunks};
}

namespace {

void merge_matches(std::vector<Match>& into, const std::vector<Match>& from) {
    if (from.empty()) return;
    if (std::is_sorted(into.begin(), into.end()) && std::is_sorted(from.begin(), from.end())) {
        std::vector<Match> merged;
        merged.reserve(into.size() + from.size());
        std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(merged));
        into = std::move(merged);
        return;
    }
    into.insert(into.end(), from.begin(), from.end());
    sets::sort_unique(into);
}

void emit_if_both_sides(std::vector<Mapping>& out, UserSet users, MacSet macs) {
    if (!users.empty() && !macs.empty()) out.push_back(Mapping{std::move(users), std::move(macs)});
}

// Read-only lookup from a user token to the indices of the mappings of a
// graph that contain it. Built once per product and shared by all workers.
class UserIndex {
public:
    explicit UserIndex(const std::vector<Mapping>& mappings) {
        std::size_t total = 0;
        for (const auto& m : mappings) total += m.users.size();
        entries_.reserve(total);
        for (std::uint32_t i = 0; i < mappings.size(); ++i) {
            for (const auto& u : mappings[i].users) entries_.emplace_back(u.str(), i);
        }
        std::sort(entries_.begin(), entries_.end());
    }

    template <class F>
    void for_each_owner(const UserId& u, F&& f) const {
        auto lo = std::lower_bound(entries_.begin(), entries_.end(), Entry{u.str(), 0});
        for (; lo != entries_.end() && lo->first == u.str(); ++lo) f(lo->second);
    }

private:
    using Entry = std::pair<std::string_view, std::uint32_t>;
    std::vector<Entry> entries_;
};

struct ChunkResult {
    std::vector<Mapping> out;
    UserSet touched_users;
    MacSet touched_macs;
    bool intersected = false;
};

void process_chunk(const std::vector<Mapping>& older, std::size_t begin, std::size_t end,
                   const std::vector<Mapping>& newer, const UserIndex& index, ChunkResult& res) {
    std::vector<std::uint32_t> candidates;
    for (std::size_t k = begin; k < end; ++k) {
        const Mapping& w = older[k];

        // Only mappings sharing a user can have an intersection that is
        // non-empty on both sides.
        candidates.clear();
        for (const auto& u : w.users) {
            index.for_each_owner(u, [&](std::uint32_t i) { candidates.push_back(i); });
        }
        sets::sort_unique(candidates);

        UserSet hit_users;
        MacSet hit_macs;
        bool hit = false;
        for (std::uint32_t i : candidates) {
            const Mapping& v = newer[i];
            UserSet s = sets::intersection(w.users, v.users);
            if (s.empty()) continue;
            MacSet m = sets::intersection(w.macs, v.macs);
            if (m.empty()) continue;
            hit_users.insert(hit_users.end(), s.begin(), s.end());
            hit_macs.insert(hit_macs.end(), m.begin(), m.end());
            res.out.push_back(Mapping{std::move(s), std::move(m)});
            hit = true;
        }

        if (hit) {
            sets::sort_unique(hit_users);
            sets::sort_unique(hit_macs);
            emit_if_both_sides(res.out, sets::difference(w.users, hit_users),
                               sets::difference(w.macs, hit_macs));
            res.touched_users.insert(res.touched_users.end(), hit_users.begin(), hit_users.end());
            res.touched_macs.insert(res.touched_macs.end(), hit_macs.begin(), hit_macs.end());
            res.intersected = true;
        } else {
            res.out.push_back(w);
        }
    }
    sets::sort_unique(res.touched_users);
    sets::sort_unique(res.touched_macs);
}

} // namespace

Graph sum(const Graph& g0, const Graph& g1) {
    Graph out;
    out.mappings.reserve(g0.mappings.size() + g1.mappings.size());
    out.mappings = g0.mappings;
    out.mappings.insert(out.mappings.end(), g1.mappings.begin(), g1.mappings.end());
    out.matches = g0.matches;
    merge_matches(out.matches, g1.matches);
    return out;
}

std::vector<Mapping> product_pair(const Mapping& w, const Mapping& v) {
    std::vector<Mapping> out;
    emit_if_both_sides(out, sets::difference(w.users, v.users), sets::difference(w.macs, v.macs));
    emit_if_both_sides(out, sets::intersection(w.users, v.users),
                       sets::intersection(w.macs, v.macs));
    emit_if_both_sides(out, sets::difference(v.users, w.users), sets::difference(v.macs, w.macs));
    return out;
}

Graph product_exact(const Graph& g0, const Graph& g1) {
    UserSet users0, users1;
    MacSet macs0, macs1;
    for (const auto& w : g0.mappings) {
        users0.insert(users0.end(), w.users.begin(), w.users.end());
        macs0.insert(macs0.end(), w.macs.begin(), w.macs.end());
    }
    for (const auto& v : g1.mappings) {
        users1.insert(users1.end(), v.users.begin(), v.users.end());
        macs1.insert(macs1.end(), v.macs.begin(), v.macs.end());
    }
    sets::sort_unique(users0);
    sets::sort_unique(macs0);
    sets::sort_unique(users1);
    sets::sort_unique(macs1);

    Graph out;
    for (const auto& w : g0.mappings) {
        emit_if_both_sides(out.mappings, sets::difference(w.users, users1),
                           sets::difference(w.macs, macs1));
    }
    for (const auto& w : g0.mappings) {
        for (const auto& v : g1.mappings) {
            if (!sets::intersects(w.users, v.users) || !sets::intersects(w.macs, v.macs)) continue;
            emit_if_both_sides(out.mappings, sets::intersection(w.users, v.users),
                               sets::intersection(w.macs, v.macs));
        }
    }
    for (const auto& v : g1.mappings) {
        emit_if_both_sides(out.mappings, sets::difference(v.users, users0),
                           sets::difference(v.macs, macs0));
    }
    out.matches = g0.matches;
    merge_matches(out.matches, g1.matches);
    return normalize(std::move(out));
}

Graph product_chunked(const Graph& g0, const Graph& g1, std::size_t chunks, int workers) {
    if (chunks < 1) throw Error(Errc::InvalidArgument, "chunk count must be >= 1");
    if (g0.mappings.empty() || g1.mappings.empty()) return normalize(sum(g0, g1));

    const auto& older = g0.mappings;
    const auto& newer = g1.mappings;
    const std::size_t n_chunks = std::min(chunks, older.size());
    const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n_chunks)));

    const UserIndex index(newer);
    std::vector<ChunkResult> partial(n_chunks);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 1) if (threads > 1)
    for (std::size_t c = 0; c < n_chunks; ++c) {
        const std::size_t begin = c * older.size() / n_chunks;
        const std::size_t end = (c + 1) * older.size() / n_chunks;
        process_chunk(older, begin, end, newer, index, partial[c]);
    }

    bool intersected = false;
    for (const auto& p : partial) intersected = intersected || p.intersected;

    // Residual pass over g1: each v loses every token some chunk intersected.
    std::vector<std::vector<Mapping>> residual(intersected ? newer.size() : 0);
    if (intersected) {
        auto touched = [&](const auto& token, auto member) {
            for (const auto& p : partial) {
                const auto& t = p.*member;
                if (std::binary_search(t.begin(), t.end(), token)) return true;
            }
            return false;
        };
#pragma omp parallel for num_threads(threads) schedule(static) if (threads > 1)
        for (std::size_t i = 0; i < newer.size(); ++i) {
            UserSet users;
            MacSet macs;
            for (const auto& u : newer[i].users) {
                if (!touched(u, &ChunkResult::touched_users)) users.push_back(u);
            }
            for (const auto& m : newer[i].macs) {
                if (!touched(m, &ChunkResult::touched_macs)) macs.push_back(m);
            }
            emit_if_both_sides(residual[i], std::move(users), std::move(macs));
        }
    }

    Graph out;
    std::size_t total = newer.size();
    for (const auto& p : partial) total += p.out.size();
    out.mappings.reserve(total);
    for (auto& p : partial) std::move(p.out.begin(), p.out.end(), std::back_inserter(out.mappings));
    if (!intersected) {
        out.mappings.insert(out.mappings.end(), newer.begin(), newer.end());
    } else {
        for (auto& r : residual) std::move(r.begin(), r.end(), std::back_inserter(out.mappings));
    }

    out.matches = g0.matches;
    merge_matches(out.matches, g1.matches);
    return normalize(std::move(out));
}

Graph product(const Graph& older, const Graph& newer, ProductMode mode, int workers) {
    if (mode.is_chunked()) return product_chunked(older, newer, mode.chunks, workers);
    return product_exact(older, newer);
}

} // namespace mapmatch
