// Reference oracles. They deliberately share no code with the algebra:
// tokens are interned into dense indices and sets become bitsets.

#include "mapmatch/synth.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <unordered_map>

namespace mapmatch {

namespace {

class Bits {
public:
    explicit Bits(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1; }

    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w != 0; });
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    std::size_t first() const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            if (words_[k] != 0) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
        }
        return static_cast<std::size_t>(-1);
    }
    bool overlaps(const Bits& o) const {
        for (std::size_t k = 0; k < words_.size(); ++k) {
            if (words_[k] & o.words_[k]) return true;
        }
        return false;
    }
    Bits operator&(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
        return r;
    }
    Bits minus(const Bits& o) const {
        Bits r = *this;
        for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= ~o.words_[k];
        return r;
    }
    void remove(const Bits& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] &= ~o.words_[k];
    }
    void add(const Bits& o) {
        for (std::size_t k = 0; k < words_.size(); ++k) words_[k] |= o.words_[k];
    }

private:
    std::vector<std::uint64_t> words_;
};

template <class T>
class Interner {
public:
    void see(const T& t) { tokens_.push_back(t); }
    void freeze() {
        std::sort(tokens_.begin(), tokens_.end());
        tokens_.erase(std::unique(tokens_.begin(), tokens_.end()), tokens_.end());
        for (std::size_t i = 0; i < tokens_.size(); ++i) index_[tokens_[i].str()] = i;
    }
    std::size_t size() const { return tokens_.size(); }
    std::size_t id(const T& t) const { return index_.at(t.str()); }
    const T& token(std::size_t i) const { return tokens_[i]; }

private:
    std::vector<T> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct BitMapping {
    Bits users;
    Bits macs;
    bool alive = true;
};

} // namespace

Graph trace_oracle(const std::vector<Mapping>& leaves) {
    std::map<std::string, std::vector<std::size_t>> user_sig;
    std::map<std::string, std::vector<std::size_t>> mac_sig;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (const auto& u : leaves[i].users) user_sig[u.str()].push_back(i);
        for (const auto& m : leaves[i].macs) mac_sig[m.str()].push_back(i);
    }

    std::map<std::vector<std::size_t>, Mapping> groups;
    for (auto& [token, sig] : user_sig) {
        sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
        groups[sig].users.emplace_back(token);
    }
    for (auto& [token, sig] : mac_sig) {
        sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
        groups[sig].macs.emplace_back(token);
    }

    Graph g;
    for (auto& [sig, m] : groups) {
        if (m.users.empty() || m.macs.empty()) continue;
        if (m.users.size() == 1 && m.macs.size() == 1) {
            g.matches.push_back({m.users.front(), m.macs.front()});
        } else {
            g.mappings.push_back(std::move(m));
        }
    }
    std::sort(g.matches.begin(), g.matches.end());
    std::sort(g.mappings.begin(), g.mappings.end(),
              [](const Mapping& a, const Mapping& b) { return a.users.front() < b.users.front(); });
    return g;
}

Graph naive_fixpoint(const Graph& input) {
    Interner<UserId> users;
    Interner<MacId> macs;
    for (const auto& m : input.mappings) {
        for (const auto& u : m.users) users.see(u);
        for (const auto& x : m.macs) macs.see(x);
    }
    for (const auto& m : input.matches) {
        users.see(m.user);
        macs.see(m.mac);
    }
    users.freeze();
    macs.freeze();
    const std::size_t nu = users.size();
    const std::size_t nm = macs.size();

    // Matches that disagree with one another are discarded.
    std::vector<std::pair<std::size_t, std::size_t>> matches;
    {
        std::vector<int> ucount(nu, 0), mcount(nm, 0);
        std::vector<std::pair<std::size_t, std::size_t>> raw;
        for (const auto& m : input.matches) raw.emplace_back(users.id(m.user), macs.id(m.mac));
        std::sort(raw.begin(), raw.end());
        raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
        for (auto [u, x] : raw) {
            ++ucount[u];
            ++mcount[x];
        }
        for (auto [u, x] : raw) {
            if (ucount[u] == 1 && mcount[x] == 1) matches.emplace_back(u, x);
        }
    }
    Bits matched_users(nu), matched_macs(nm);
    for (auto [u, x] : matches) {
        matched_users.set(u);
        matched_macs.set(x);
    }

    std::vector<BitMapping> maps;
    for (const auto& m : input.mappings) {
        BitMapping b{Bits(nu), Bits(nm), true};
        for (const auto& u : m.users) b.users.set(users.id(u));
        for (const auto& x : m.macs) b.macs.set(macs.id(x));
        maps.push_back(std::move(b));
    }

    // Drops empty-sided mappings; extracts singletons and scrubs their tokens
    // until nothing changes.
    auto tidy = [&] {
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& b : maps) {
                if (!b.alive) continue;
                b.users.remove(matched_users);
                b.macs.remove(matched_macs);
                if (!b.users.any() || !b.macs.any()) {
                    b.alive = false;
                    continue;
                }
                if (b.users.count() == 1 && b.macs.count() == 1) {
                    matches.emplace_back(b.users.first(), b.macs.first());
                    matched_users.add(b.users);
                    matched_macs.add(b.macs);
                    b.alive = false;
                    changed = true;
                }
            }
        }
    };

    tidy();
    // Invariant: live mappings before position i are disjoint from every
    // other live mapping. Pieces of a product are subsets of its operands, so
    // replacing a pair never breaks it.
    for (std::size_t i = 0; i < maps.size(); ++i) {
        std::size_t j = i + 1;
        while (maps[i].alive && j < maps.size()) {
            const BitMapping& a = maps[i];
            const BitMapping& b = maps[j];
            if (!b.alive || (!a.users.overlaps(b.users) && !a.macs.overlaps(b.macs))) {
                ++j;
                continue;
            }
            BitMapping a_only{a.users.minus(b.users), a.macs.minus(b.macs), true};
            BitMapping both{a.users & b.users, a.macs & b.macs, true};
            BitMapping b_only{b.users.minus(a.users), b.macs.minus(a.macs), true};
            maps[i] = std::move(a_only);
            maps[j] = std::move(both);
            maps.push_back(std::move(b_only));
            tidy();
            j = i + 1;
        }
    }

    Graph g;
    for (auto [u, x] : matches) g.matches.push_back({users.token(u), macs.token(x)});
    std::sort(g.matches.begin(), g.matches.end());
    for (const auto& b : maps) {
        if (!b.alive) continue;
        Mapping m;
        for (std::size_t u = 0; u < nu; ++u) {
            if (b.users.test(u)) m.users.push_back(users.token(u));
        }
        for (std::size_t x = 0; x < nm; ++x) {
            if (b.macs.test(x)) m.macs.push_back(macs.token(x));
        }
        g.mappings.push_back(std::move(m));
    }
    std::sort(g.mappings.begin(), g.mappings.end(),
              [](const Mapping& a, const Mapping& b) { return a.users.front() < b.users.front(); });
    return g;
}

} // namespace mapmatch
