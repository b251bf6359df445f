#pragma once

// Event ingestion and graph persistence.
//
// Events file: one JSON object per line,
//     {"day": 3, "loc": 1, "kind": "user", "id": "uid-000042"}
// Graph file: a header line followed by one line per match and one line per
// mapping, all JSON:
//     {"format":"mapmatch-graph","format_version":1,"matches":2,"mappings":1,"checksum":"..."}
//     {"u":"uid-000001","m":"02:00:00:00:00:01"}
//     {"S":["uid-000003","uid-000007"],"M":["02:00:00:00:00:03","02:00:00:00:00:07"]}
// The checksum is FNV-1a 64 over every byte after the header line.

#include "mapmatch/model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace mapmatch {

inline constexpr int graph_format_version = 1;

/// Throws Error(MalformedLine), Error(NamespaceCollision), Error(EmptyInput)
/// or Error(Io). Messages carry "<source>:<line>".
BatchCollection parse_events(std::istream& in, std::string_view source = "<stream>");
BatchCollection parse_events(const std::filesystem::path& path);

/// Canonical event text: by day, location, users before macs, token order.
std::string serialize_events(const BatchCollection& obs);
void write_events(const BatchCollection& obs, const std::filesystem::path& path);

std::string serialize_graph(const Graph& g);
/// Throws Error(CorruptGraph) or Error(VersionMismatch).
Graph deserialize_graph(std::string_view text);

void write_graph(const Graph& g, const std::filesystem::path& path);
Graph read_graph(const std::filesystem::path& path);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

} // namespace mapmatch
