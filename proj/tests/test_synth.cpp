#include "mapmatch/algebra.hpp"
#include "mapmatch/io.hpp"
#include "mapmatch/stats.hpp"
#include "mapmatch/synth.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <cmath>

using namespace mapmatch;
using namespace mapmatch::testing;

TEST_CASE("parameter validation") {
    WorldParams p;
    p.n_devices = 0;
    CHECK(error_of([&] { validate(p); }) == Errc::InvalidArgument);
    p = {};
    p.obs_prob_mac = 1.5;
    CHECK(error_of([&] { generate_world(p); }) == Errc::InvalidArgument);
    p = {};
    p.move_prob = -0.1;
    CHECK(error_of([&] { validate(p); }) == Errc::InvalidArgument);
}

TEST_CASE("degenerate worlds") {
    WorldParams p;
    p.n_devices = 1;
    p.move_prob = 0.0;
    p.n_days = 30;
    auto w = generate_world(p);
    for (const auto& day : w.schedule) CHECK(day[0].locations == w.schedule[0][0].locations);

    p = {};
    p.n_locations = 1;
    p.move_prob = 1.0;
    w = generate_world(p);
    for (const auto& day : w.schedule) {
        for (const auto& pr : day) CHECK(pr.locations == std::vector<Location>{0});
    }
}

TEST_CASE("movement follows the schedule rules") {
    WorldParams p;
    p.n_locations = 5;
    p.n_devices = 100;
    p.n_days = 30;
    p.move_prob = 0.5;
    const auto w = generate_world(p);
    std::size_t same_day = 0;
    for (std::size_t t = 0; t < w.schedule.size(); ++t) {
        for (std::size_t x = 0; x < w.pairs.size(); ++x) {
            const auto& locs = w.schedule[t][x].locations;
            REQUIRE((locs.size() == 1 || locs.size() == 2));
            if (locs.size() == 2) {
                CHECK(locs[0] != locs[1]);
                ++same_day;
            }
            for (Location l : locs) CHECK((l >= 0 && l < p.n_locations));
        }
    }
    CHECK(same_day > 0);
}

TEST_CASE("generation and sampling are deterministic") {
    WorldParams p;
    p.seed = 42;
    p.obs_prob_user = 0.6;
    p.obs_prob_mac = 0.7;
    p.churn_prob = 0.05;
    const auto a = generate_world(p);
    const auto b = generate_world(p);
    CHECK(serialize_truth(a) == serialize_truth(b));
    CHECK(serialize_schedule(a) == serialize_schedule(b));
    CHECK(serialize_events(sample_observations(a, p)) == serialize_events(sample_observations(b, p)));

    WorldParams q = p;
    q.seed = 43;
    CHECK(serialize_events(sample_observations(generate_world(q), q)) !=
          serialize_events(sample_observations(a, p)));
}

TEST_CASE("truth pairs are injective") {
    WorldParams p;
    p.n_devices = 200;
    p.churn_prob = 0.1;
    const auto w = generate_world(p);
    std::set<std::string> users, macs;
    for (const auto& d : w.pairs) {
        CHECK(users.insert(d.user.str()).second);
        CHECK(macs.insert(d.mac.str()).second);
        for (const auto& a : d.aliases) CHECK(users.insert(a.str()).second);
    }
}

TEST_CASE("sampling extremes") {
    WorldParams p;
    p.n_locations = 3;
    p.n_devices = 30;
    p.n_days = 5;
    const auto w = generate_world(p);
    const auto full = sample_observations(w, p);
    for (std::size_t t = 0; t < w.schedule.size(); ++t) {
        for (std::size_t x = 0; x < w.pairs.size(); ++x) {
            for (Location l : w.schedule[t][x].locations) {
                const auto* b = full.find(static_cast<Day>(t), l);
                REQUIRE(b != nullptr);
                CHECK(std::binary_search(b->users.begin(), b->users.end(), w.pairs[x].user));
                CHECK(std::binary_search(b->macs.begin(), b->macs.end(), w.pairs[x].mac));
            }
        }
    }
    p.obs_prob_user = p.obs_prob_mac = 0.0;
    CHECK(sample_observations(w, p).empty());
}

TEST_CASE("sampled batch sizes are binomial around p times presence") {
    // Per seed the user and mac counts over all batches are Binomial(n, p).
    // Of 240 z-scores about 0.65 are expected beyond 3 sigma; more than 4
    // has probability ~5e-4. The pooled mean and the z variance get 3 sigma
    // bands of their own.
    const double p_user = 0.4, p_mac = 0.7;
    int outside = 0;
    double z_sum = 0, z_sq = 0;
    const int seeds = 120;
    for (int s = 1; s <= seeds; ++s) {
        WorldParams p;
        p.n_locations = 4;
        p.n_devices = 60;
        p.n_days = 10;
        p.seed = static_cast<std::uint64_t>(s);
        p.obs_prob_user = p_user;
        p.obs_prob_mac = p_mac;
        const auto w = generate_world(p);
        double present = 0;
        for (const auto& day : w.schedule) {
            for (const auto& pr : day) present += static_cast<double>(pr.locations.size());
        }
        double users = 0, macs = 0;
        const auto obs = sample_observations(w, p);
        for (const auto& [key, b] : obs.batches()) {
            users += static_cast<double>(b.users.size());
            macs += static_cast<double>(b.macs.size());
        }
        const double zu = (users - p_user * present) / std::sqrt(present * p_user * (1 - p_user));
        const double zm = (macs - p_mac * present) / std::sqrt(present * p_mac * (1 - p_mac));
        if (std::abs(zu) > 3 || std::abs(zm) > 3) ++outside;
        z_sum += zu + zm;
        z_sq += zu * zu + zm * zm;
    }
    const double n = 2.0 * seeds;
    CHECK(outside <= 4);
    CHECK(std::abs(z_sum / std::sqrt(n)) < 3.0);
    CHECK(std::abs(z_sq / n - 1.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("trace oracle examples") {
    const auto two = trace_oracle({make_mapping({"a", "b"}, {"m", "n"}), make_mapping({"a"}, {"m"})});
    CHECK(two == graph_of({}, {match("a", "m"), match("b", "n")}));

    const Mapping leaf = make_mapping({"a", "b"}, {"m", "n"});
    CHECK(trace_oracle({leaf}) == graph_of({leaf}));

    const std::vector<Mapping> apart{make_mapping({"c", "d"}, {"o", "p"}), make_mapping({"a", "b"}, {"m", "n"})};
    CHECK(trace_oracle(apart) == graph_of({apart[1], apart[0]}));

    // Tokens whose signature has no counterpart on the other side vanish.
    CHECK(trace_oracle({make_mapping({"a"}, {"m", "n"}), make_mapping({"a", "b"}, {"n"})}) ==
          graph_of({}, {match("a", "n")}));
}

TEST_CASE("naive fixpoint examples") {
    const Graph disjoint = graph_of({make_mapping({"a", "b"}, {"m", "n"}), make_mapping({"c", "d"}, {"o", "p"})});
    CHECK(naive_fixpoint(disjoint) == disjoint);

    const Graph worked = graph_of({make_mapping({"a", "b"}, {"m", "n"}), make_mapping({"b", "c"}, {"n", "o"})});
    CHECK(naive_fixpoint(worked) == graph_of({}, {match("a", "m"), match("b", "n"), match("c", "o")}));
}

TEST_CASE("oracles agree under complete observation") {
    std::mt19937_64 rng(23);
    int mapping_level_equal = 0;
    for (int i = 0; i < 600; ++i) {
        const auto leaves = random_device_leaves(rng, 6, 12);
        const Graph trace = trace_oracle(leaves);
        const Graph naive = naive_fixpoint(graph_of(leaves));
        REQUIRE(naive.matches == trace.matches);
        REQUIRE(normalize(graph_of(leaves)).matches == trace.matches);
        if (naive == trace) ++mapping_level_equal;
        // Every true pair that is resolved is resolved correctly.
        for (const auto& m : trace.matches) CHECK(m.user.str().substr(1) == m.mac.str().substr(1));
    }
    CHECK(mapping_level_equal == 600);
}

TEST_CASE("evaluate") {
    WorldParams p;
    p.n_devices = 2;
    const auto w = generate_world(p);
    const Match t0{w.pairs[0].user, w.pairs[0].mac}, t1{w.pairs[1].user, w.pairs[1].mac};
    const Match wrong{w.pairs[0].user, w.pairs[1].mac};

    auto all = evaluate(graph_of({}, {t0, t1}), w);
    CHECK(all.precision == 1.0);
    CHECK(all.recall == 1.0);
    CHECK(all.precision_defined);

    auto none = evaluate(Graph{}, w);
    CHECK(none.precision == 1.0);
    CHECK_FALSE(none.precision_defined);
    CHECK(none.recall == 0.0);
    CHECK(format_eval_report(none).find("(no matches)") != std::string::npos);

    auto half = evaluate(graph_of({}, {t1, wrong}), w);
    CHECK(half.precision == 0.5);
    CHECK(half.recall == 0.5);
    CHECK(half.n_matches == 2);
}

TEST_CASE("churned ids count as correct matches of their device") {
    WorldParams p;
    p.n_devices = 3;
    p.churn_prob = 1.0;
    p.n_days = 3;
    const auto w = generate_world(p);
    REQUIRE(w.pairs[0].aliases.size() == 2);
    CHECK(w.user_on(2, 0) == w.pairs[0].aliases[1]);
    const auto r = evaluate(graph_of({}, {Match{w.pairs[0].aliases[0], w.pairs[0].mac}}), w);
    CHECK(r.precision == 1.0);
}

TEST_CASE("random block graphs are normalized partitions") {
    const Graph g = random_block_graph(50, 4, 9);
    CHECK(g.mappings.size() == 50);
    CHECK(normalize(g) == g);
    CHECK(stats(g).users_covered == 200);
    CHECK(error_of([] { random_block_graph(3, 1, 1); }) == Errc::InvalidArgument);
}

TEST_CASE("truth file round trip") {
    WorldParams p;
    p.churn_prob = 0.2;
    const auto w = generate_world(p);
    const auto path = std::filesystem::temp_directory_path() / "mapmatch_truth_test.jsonl";
    write_truth(w, path);
    const auto back = read_truth(path);
    REQUIRE(back.pairs.size() == w.pairs.size());
    for (std::size_t i = 0; i < w.pairs.size(); ++i) {
        CHECK(back.pairs[i].user == w.pairs[i].user);
        CHECK(back.pairs[i].mac == w.pairs[i].mac);
        CHECK(back.pairs[i].aliases == w.pairs[i].aliases);
    }
    std::filesystem::remove(path);
}
