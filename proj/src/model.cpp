#include "mapmatch/model.hpp"

#include "mapmatch/error.hpp"
#include "mapmatch/set_ops.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

namespace mapmatch {

std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::EmptySide: return "EmptySide";
    case Errc::NoSuchBatch: return "NoSuchBatch";
    case Errc::EmptyDay: return "EmptyDay";
    case Errc::BadInterval: return "BadInterval";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MalformedLine: return "MalformedLine";
    case Errc::NamespaceCollision: return "NamespaceCollision";
    case Errc::CorruptGraph: return "CorruptGraph";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::Io: return "Io";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

Mapping canonicalize(Mapping m) {
    if (m.users.empty() || m.macs.empty()) {
        throw Error(Errc::EmptySide, "mapping with " + std::to_string(m.users.size()) +
                                         " users and " + std::to_string(m.macs.size()) + " macs");
    }
    sets::sort_unique(m.users);
    sets::sort_unique(m.macs);
    return m;
}

bool is_match(const Mapping& m) noexcept {
    return m.users.size() == 1 && m.macs.size() == 1;
}

bool has_empty_side(const Mapping& m) noexcept {
    return m.users.empty() || m.macs.empty();
}

Mapping make_mapping(std::initializer_list<std::string> users,
                     std::initializer_list<std::string> macs) {
    Mapping m;
    for (const auto& u : users) m.users.emplace_back(u);
    for (const auto& x : macs) m.macs.emplace_back(x);
    return canonicalize(std::move(m));
}

std::size_t count_duplicate_tokens(const Graph& g) {
    std::unordered_set<std::string_view> users;
    std::unordered_set<std::string_view> macs;
    std::size_t dups = 0;
    auto see_user = [&](const UserId& u) { dups += users.insert(u.str()).second ? 0 : 1; };
    auto see_mac = [&](const MacId& m) { dups += macs.insert(m.str()).second ? 0 : 1; };
    for (const auto& match : g.matches) {
        see_user(match.user);
        see_mac(match.mac);
    }
    for (const auto& m : g.mappings) {
        for (const auto& u : m.users) see_user(u);
        for (const auto& x : m.macs) see_mac(x);
    }
    return dups;
}

ObservationBatch& BatchCollection::slot(Day day, Location loc) {
    auto [it, inserted] = batches_.try_emplace(Key{day, loc});
    if (inserted) {
        it->second.day = day;
        it->second.location = loc;
    }
    return it->second;
}

void BatchCollection::add(ObservationBatch batch) {
    auto& b = slot(batch.day, batch.location);
    sets::sort_unique(batch.users);
    sets::sort_unique(batch.macs);
    b.users = sets::set_union(b.users, batch.users);
    b.macs = sets::set_union(b.macs, batch.macs);
}

void BatchCollection::add_user(Day day, Location loc, UserId id) {
    slot(day, loc).users.push_back(std::move(id));
}

void BatchCollection::add_mac(Day day, Location loc, MacId id) {
    slot(day, loc).macs.push_back(std::move(id));
}

void BatchCollection::seal() {
    for (auto& [key, b] : batches_) {
        sets::sort_unique(b.users);
        sets::sort_unique(b.macs);
    }
}

const ObservationBatch* BatchCollection::find(Day day, Location loc) const {
    auto it = batches_.find(Key{day, loc});
    return it == batches_.end() ? nullptr : &it->second;
}

Day BatchCollection::first_day() const {
    if (batches_.empty()) throw Error(Errc::EmptyInput, "no batches");
    return batches_.begin()->first.first;
}

Day BatchCollection::last_day() const {
    if (batches_.empty()) throw Error(Errc::EmptyInput, "no batches");
    return batches_.rbegin()->first.first;
}

bool BatchCollection::has_day(Day day) const {
    auto it = batches_.lower_bound(Key{day, std::numeric_limits<Location>::min()});
    return it != batches_.end() && it->first.first == day;
}

std::vector<Location> BatchCollection::locations() const {
    std::vector<Location> out;
    for (const auto& [key, b] : batches_) out.push_back(key.second);
    sets::sort_unique(out);
    return out;
}

std::vector<Location> BatchCollection::locations_on(Day day) const {
    std::vector<Location> out;
    for (auto it = batches_.lower_bound(Key{day, std::numeric_limits<Location>::min()});
         it != batches_.end() && it->first.first == day; ++it) {
        out.push_back(it->first.second);
    }
    return out;
}

} // namespace mapmatch
