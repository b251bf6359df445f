#include "mapmatch/io.hpp"

#include "mapmatch/error.hpp"

#include <json.hpp>

#include <cstdio>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_set>

namespace mapmatch {

using json = nlohmann::json;

namespace {

[[noreturn]] void malformed(std::string_view source, std::size_t lineno, const std::string& why) {
    throw Error(Errc::MalformedLine, std::string(source) + ":" + std::to_string(lineno) + ": " + why);
}

bool blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

[[noreturn]] void corrupt(const std::string& why) {
    throw Error(Errc::CorruptGraph, why);
}

template <class T>
std::vector<T> token_list(const json& arr, const char* what) {
    if (!arr.is_array()) corrupt(std::string(what) + " is not an array");
    std::vector<T> out;
    out.reserve(arr.size());
    for (const auto& t : arr) {
        if (!t.is_string() || t.get_ref<const std::string&>().empty()) {
            corrupt(std::string(what) + " holds a non-token");
        }
        out.emplace_back(t.get<std::string>());
    }
    return out;
}

} // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

BatchCollection parse_events(std::istream& in, std::string_view source) {
    BatchCollection obs;
    std::unordered_set<std::string> user_ids;
    std::unordered_set<std::string> mac_ids;
    std::string line;
    std::size_t lineno = 0;
    std::size_t records = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            malformed(source, lineno, "not JSON");
        }
        if (!rec.is_object()) malformed(source, lineno, "expected an object");
        for (const char* field : {"day", "loc", "kind", "id"}) {
            if (!rec.contains(field)) malformed(source, lineno, std::string("missing field '") + field + "'");
        }
        const auto& day = rec["day"];
        const auto& loc = rec["loc"];
        const auto& kind = rec["kind"];
        const auto& id = rec["id"];
        if (!day.is_number_integer() || day.get<long long>() < 0 ||
            day.get<long long>() > std::numeric_limits<Day>::max()) {
            malformed(source, lineno, "day must be a non-negative integer");
        }
        if (!loc.is_number_integer() || loc.get<long long>() < 0 ||
            loc.get<long long>() > std::numeric_limits<Location>::max()) {
            malformed(source, lineno, "loc must be a non-negative integer");
        }
        if (!id.is_string() || id.get_ref<const std::string&>().empty()) {
            malformed(source, lineno, "id must be a non-empty string");
        }
        if (!kind.is_string()) malformed(source, lineno, "kind must be \"user\" or \"mac\"");
        const auto& k = kind.get_ref<const std::string&>();
        const auto& token = id.get_ref<const std::string&>();
        const Day d = day.get<Day>();
        const Location l = loc.get<Location>();
        if (k == "user") {
            if (mac_ids.contains(token)) {
                throw Error(Errc::NamespaceCollision, std::string(source) + ":" + std::to_string(lineno) +
                                                          ": '" + token + "' already seen as a mac");
            }
            user_ids.insert(token);
            obs.add_user(d, l, UserId(token));
        } else if (k == "mac") {
            if (user_ids.contains(token)) {
                throw Error(Errc::NamespaceCollision, std::string(source) + ":" + std::to_string(lineno) +
                                                          ": '" + token + "' already seen as a user");
            }
            mac_ids.insert(token);
            obs.add_mac(d, l, MacId(token));
        } else {
            malformed(source, lineno, "kind must be \"user\" or \"mac\"");
        }
        ++records;
    }
    if (in.bad()) throw Error(Errc::Io, std::string(source) + ": read failed");
    if (records == 0) throw Error(Errc::EmptyInput, std::string(source) + ": no events");
    obs.seal();
    return obs;
}

BatchCollection parse_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    return parse_events(in, path.string());
}

std::string serialize_events(const BatchCollection& obs) {
    std::string out;
    auto emit = [&](const ObservationBatch& b, const char* kind, const std::string& id) {
        json rec = {{"day", b.day}, {"loc", b.location}, {"kind", kind}, {"id", id}};
        out += rec.dump();
        out += '\n';
    };
    for (const auto& [key, b] : obs.batches()) {
        for (const auto& u : b.users) emit(b, "user", u.str());
        for (const auto& m : b.macs) emit(b, "mac", m.str());
    }
    return out;
}

void write_events(const BatchCollection& obs, const std::filesystem::path& path) {
    write_file_atomically(path, serialize_events(obs));
}

std::string serialize_graph(const Graph& g) {
    std::string body;
    for (const auto& m : g.matches) {
        body += json{{"u", m.user.str()}, {"m", m.mac.str()}}.dump();
        body += '\n';
    }
    for (const auto& m : g.mappings) {
        json s = json::array();
        json x = json::array();
        for (const auto& u : m.users) s.push_back(u.str());
        for (const auto& mac : m.macs) x.push_back(mac.str());
        body += json{{"S", std::move(s)}, {"M", std::move(x)}}.dump();
        body += '\n';
    }
    // nlohmann::json objects sort their keys, so the header is canonical too.
    json header = {{"format", "mapmatch-graph"},
                   {"format_version", graph_format_version},
                   {"matches", g.matches.size()},
                   {"mappings", g.mappings.size()},
                   {"checksum", hex64(fnv1a64(body))}};
    return header.dump() + "\n" + body;
}

Graph deserialize_graph(std::string_view text) {
    const auto nl = text.find('\n');
    if (nl == std::string_view::npos) corrupt("missing header line");
    json header;
    try {
        header = json::parse(text.substr(0, nl));
    } catch (const json::parse_error&) {
        corrupt("header is not JSON");
    }
    if (!header.is_object() || header.value("format", "") != "mapmatch-graph") corrupt("not a graph file");
    if (!header.contains("format_version") || !header["format_version"].is_number_integer()) {
        corrupt("header has no format_version");
    }
    if (header["format_version"].get<int>() != graph_format_version) {
        throw Error(Errc::VersionMismatch, "graph format version " + header["format_version"].dump() +
                                               ", expected " + std::to_string(graph_format_version));
    }
    const std::string_view body = text.substr(nl + 1);
    if (header.value("checksum", "") != hex64(fnv1a64(body))) corrupt("checksum mismatch");
    const auto n_matches = header.value("matches", std::size_t{0});
    const auto n_mappings = header.value("mappings", std::size_t{0});

    Graph g;
    std::size_t pos = 0;
    std::size_t lineno = 1;
    while (pos < body.size()) {
        const auto end = body.find('\n', pos);
        if (end == std::string_view::npos) corrupt("unterminated line");
        ++lineno;
        json rec;
        try {
            rec = json::parse(body.substr(pos, end - pos));
        } catch (const json::parse_error&) {
            corrupt("line " + std::to_string(lineno) + " is not JSON");
        }
        pos = end + 1;
        if (rec.contains("u")) {
            if (!g.mappings.empty()) corrupt("match after mappings");
            if (!rec["u"].is_string() || !rec.contains("m") || !rec["m"].is_string()) corrupt("bad match record");
            g.matches.push_back({UserId(rec["u"].get<std::string>()), MacId(rec["m"].get<std::string>())});
        } else if (rec.contains("S") && rec.contains("M")) {
            Mapping m{token_list<UserId>(rec["S"], "S"), token_list<MacId>(rec["M"], "M")};
            if (m.users.empty() || m.macs.empty()) corrupt("mapping with an empty side");
            g.mappings.push_back(std::move(m));
        } else {
            corrupt("unknown record on line " + std::to_string(lineno));
        }
    }
    if (g.matches.size() != n_matches || g.mappings.size() != n_mappings) {
        corrupt("record counts disagree with header");
    }
    return g;
}

void write_graph(const Graph& g, const std::filesystem::path& path) {
    write_file_atomically(path, serialize_graph(g));
}

Graph read_graph(const std::filesystem::path& path) {
    return deserialize_graph(read_file(path));
}

void write_file_atomically(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::Io, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw Error(Errc::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(Errc::Io, "cannot rename " + tmp.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::Io, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace mapmatch
