#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace mapmatch {

/// Opaque identifier token. The tag keeps user and mac namespaces apart at
/// compile time; ordering is lexicographic on the token bytes.
template <class Tag>
class Token {
public:
    Token() = default;
    explicit Token(std::string value) : value_(std::move(value)) {}

    const std::string& str() const noexcept { return value_; }
    bool empty() const noexcept { return value_.empty(); }

    friend bool operator==(const Token&, const Token&) = default;
    friend std::strong_ordering operator<=>(const Token& a, const Token& b) {
        return a.value_.compare(b.value_) <=> 0;
    }

private:
    std::string value_;
};

struct UserTag {};
struct MacTag {};
using UserId = Token<UserTag>;
using MacId = Token<MacTag>;

// Sorted, duplicate-free.
using UserSet = std::vector<UserId>;
using MacSet = std::vector<MacId>;

using Day = int;
using Location = int;

/// A fully connected bipartite block: every user in `users` may pair with
/// every mac in `macs`.
struct Mapping {
    UserSet users;
    MacSet macs;

    friend bool operator==(const Mapping&, const Mapping&) = default;
    friend auto operator<=>(const Mapping&, const Mapping&) = default;
};

struct Match {
    UserId user;
    MacId mac;

    friend bool operator==(const Match&, const Match&) = default;
    friend auto operator<=>(const Match&, const Match&) = default;
};

/// Mappings plus the matches already resolved. `matches` is kept sorted.
struct Graph {
    std::vector<Mapping> mappings;
    std::vector<Match> matches;

    bool empty() const noexcept { return mappings.empty() && matches.empty(); }

    friend bool operator==(const Graph&, const Graph&) = default;
};

/// Sorts and deduplicates both sides. Throws Error(EmptySide) when either
/// side is empty.
Mapping canonicalize(Mapping m);

bool is_match(const Mapping& m) noexcept;

bool has_empty_side(const Mapping& m) noexcept;

Mapping make_mapping(std::initializer_list<std::string> users,
                     std::initializer_list<std::string> macs);

/// Counts tokens that occur more than once across matches and mappings.
/// Zero for every normalized graph.
std::size_t count_duplicate_tokens(const Graph& g);

struct ObservationBatch {
    Day day = 0;
    Location location = 0;
    UserSet users;
    MacSet macs;

    friend bool operator==(const ObservationBatch&, const ObservationBatch&) = default;
};

/// Observation batches keyed by (day, location). Adding a batch for an
/// existing key merges by set union.
class BatchCollection {
public:
    using Key = std::pair<Day, Location>;

    void add(ObservationBatch batch);
    void add_user(Day day, Location loc, UserId id);
    void add_mac(Day day, Location loc, MacId id);

    /// Sorts and deduplicates every batch; call after add_user/add_mac.
    void seal();

    const ObservationBatch* find(Day day, Location loc) const;

    bool empty() const noexcept { return batches_.empty(); }
    std::size_t size() const noexcept { return batches_.size(); }

    Day first_day() const;
    Day last_day() const;
    bool has_day(Day day) const;

    /// Every location index that occurs in any batch, ascending.
    std::vector<Location> locations() const;
    /// Locations with a batch on `day`, ascending.
    std::vector<Location> locations_on(Day day) const;

    const std::map<Key, ObservationBatch>& batches() const noexcept { return batches_; }

    friend bool operator==(const BatchCollection&, const BatchCollection&) = default;

private:
    ObservationBatch& slot(Day day, Location loc);

    std::map<Key, ObservationBatch> batches_;
};

} // namespace mapmatch
