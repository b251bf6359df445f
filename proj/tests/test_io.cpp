#include "mapmatch/algebra.hpp"
#include "mapmatch/io.hpp"
#include "mapmatch/stats.hpp"
#include "mapmatch/synth.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <sstream>

using namespace mapmatch;
using namespace mapmatch::testing;

namespace {

BatchCollection parse(const std::string& text) {
    std::istringstream in(text);
    return parse_events(in, "events.jsonl");
}

std::string error_message(const std::string& text) {
    try {
        parse(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const char* ev_a = R"({"day":0,"loc":1,"kind":"user","id":"a"})";
const char* ev_m = R"({"day":0,"loc":1,"kind":"mac","id":"m"})";

} // namespace

TEST_CASE("events: duplicates collapse into one set element") {
    const auto c = parse(std::string(ev_a) + "\n" + ev_a + "\n" + ev_m + "\n\n");
    REQUIRE(c.size() == 1);
    CHECK(c.find(0, 1)->users == UserSet{UserId("a")});
    CHECK(c.find(0, 1)->macs == MacSet{MacId("m")});
}

TEST_CASE("events: errors") {
    CHECK(error_of([] { parse(std::string(ev_a) + "\n" + R"({"day":1,"loc":0,"kind":"mac","id":"a"})"); }) ==
          Errc::NamespaceCollision);
    CHECK(error_of([] { parse(""); }) == Errc::EmptyInput);
    CHECK(error_of([] { parse("\n  \n"); }) == Errc::EmptyInput);
    CHECK(error_of([] { parse(std::string(ev_a) + "\n{oops\n"); }) == Errc::MalformedLine);
    CHECK(error_message(std::string(ev_a) + "\n" + ev_m + "\n{oops\n").find("events.jsonl:3") != std::string::npos);
    CHECK(error_message(R"({"day":-1,"loc":0,"kind":"user","id":"a"})").find("events.jsonl:1") !=
          std::string::npos);
    CHECK(error_of([] { parse(R"({"day":0,"loc":0,"kind":"device","id":"a"})"); }) == Errc::MalformedLine);
    CHECK(error_of([] { parse(R"({"day":0,"loc":0,"kind":"user","id":""})"); }) == Errc::MalformedLine);
    CHECK(error_of([] { parse(R"({"day":0,"kind":"user","id":"a"})"); }) == Errc::MalformedLine);
    CHECK(error_of([] { parse("[1,2]"); }) == Errc::MalformedLine);
    CHECK(error_of([] { parse_events(std::filesystem::path("/nonexistent/events.jsonl")); }) == Errc::Io);
}

TEST_CASE("events: ingestion round trip of sampled worlds") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        WorldParams p;
        p.seed = seed;
        p.obs_prob_user = 0.5 + 0.05 * static_cast<double>(seed);
        p.obs_prob_mac = 0.6;
        const auto obs = sample_observations(generate_world(p), p);
        const auto text = serialize_events(obs);
        CHECK(parse(text) == obs);
        CHECK(serialize_events(parse(text)) == text);
    }
}

TEST_CASE("graph files") {
    const Graph g = graph_of({make_mapping({"a", "b"}, {"m", "n"}), make_mapping({"c", "d", "e"}, {"o", "p"})},
                             {match("f", "q"), match("g", "r")});
    const auto text = serialize_graph(g);
    CHECK(deserialize_graph(text) == g);
    CHECK(serialize_graph(deserialize_graph(text)) == text);
    CHECK(text.substr(0, text.find('\n')).find("\"format_version\":1") != std::string::npos);

    const auto empty = serialize_graph(Graph{});
    CHECK(std::count(empty.begin(), empty.end(), '\n') == 1);
    CHECK(empty.find("\"mappings\":0") != std::string::npos);
    CHECK(empty.find("\"matches\":0") != std::string::npos);
    CHECK(deserialize_graph(empty) == Graph{});

    CHECK(error_of([&] { deserialize_graph(text.substr(0, text.size() - 5)); }) == Errc::CorruptGraph);
    CHECK(error_of([&] { deserialize_graph(text.substr(0, 20)); }) == Errc::CorruptGraph);
    CHECK(error_of([&] { deserialize_graph(""); }) == Errc::CorruptGraph);
    std::string flipped = text;
    flipped[flipped.size() - 4] = 'x';
    CHECK(error_of([&] { deserialize_graph(flipped); }) == Errc::CorruptGraph);
    std::string future = text;
    future.replace(future.find("\"format_version\":1"), 18, "\"format_version\":2");
    CHECK(error_of([&] { deserialize_graph(future); }) == Errc::VersionMismatch);
}

TEST_CASE("graph files on disk round trip random normalized graphs") {
    const auto path = std::filesystem::temp_directory_path() / "mapmatch_io_test.graph";
    std::mt19937_64 rng(8);
    for (int i = 0; i < 50; ++i) {
        const Graph g = normalize(random_graph(rng, 8, 20, 6));
        write_graph(g, path);
        CHECK(read_graph(path) == g);
        CHECK(read_file(path) == serialize_graph(g));
    }
    CHECK_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    std::filesystem::remove(path);
    CHECK(error_of([&] { read_graph(path); }) == Errc::Io);
}

TEST_CASE("fnv1a64 reference values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("stats: ratios and coverage") {
    const Graph g = graph_of({make_mapping({"a"}, {"m"}), make_mapping({"b", "c"}, {"n"}),
                              make_mapping({"d", "e", "f"}, {"o"})},
                             {match("g", "p")});
    const auto s = stats(g);
    CHECK(s.matches == 1);
    CHECK(s.mappings == 3);
    CHECK(s.users_covered == 7);
    CHECK(s.macs_covered == 4);
    REQUIRE(s.ratio.has_value());
    CHECK(s.ratio->min == 1.0);
    CHECK(s.ratio->median == 2.0);
    CHECK(s.ratio->mean == 2.0);
    CHECK(s.ratio->max == 3.0);
    CHECK(s.ratio->q1 == 1.5);
    CHECK(s.ratio->q3 == 2.5);

    const auto only = stats(graph_of({}, {match("a", "m")}));
    CHECK(only.mappings == 0);
    CHECK_FALSE(only.ratio.has_value());

    CHECK(quantile_linear({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
    CHECK(quantile_linear({5}, 0.75) == 5.0);
}

TEST_CASE("stats tables") {
    const Graph g = graph_of({make_mapping({"a", "b"}, {"m"})}, {match("c", "n")});
    const std::vector<StatsRow> rows{{"2", stats(g)}, {"4", stats(graph_of({}, {match("a", "m")}))}};
    const auto text = format_stats_tables(rows);
    CHECK(text.find("weeks | matches | mappings | users covered | macs coverage\n") != std::string::npos);
    CHECK(text.find("2 | 1 | 1 | 3 | 2\n") != std::string::npos);
    CHECK(text.find("weeks | Min. | 1st Qu. | Median | Mean | 3rd Qu. | Max.\n") != std::string::npos);
    CHECK(text.find("2 | 2.000 | 2.000 | 2.000 | 2.000 | 2.000 | 2.000\n") != std::string::npos);
    CHECK(text.find("4 | 2.000") == std::string::npos);

    const std::vector<StatsRow> matches_only{{"2", stats(graph_of({}, {match("a", "m")}))}};
    CHECK(format_stats_tables(matches_only).find("Median") == std::string::npos);
}
