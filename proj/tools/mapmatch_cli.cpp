// mapmatch: command-line front end.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 internal invariant violation.

#include "mapmatch/algebra.hpp"
#include "mapmatch/error.hpp"
#include "mapmatch/io.hpp"
#include "mapmatch/pipeline.hpp"
#include "mapmatch/stats.hpp"
#include "mapmatch/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <set>

namespace fs = std::filesystem;
using namespace mapmatch;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;
constexpr int exit_invariant = 3;

struct PipelineFlags {
    int window_days = 14;
    int lookahead = 1;
    std::string mode = "chunked";
    std::size_t chunks = 0; // 0: follow the worker share
    int workers = 1;
    bool audit = false;

    void attach(CLI::App* cmd, bool windows) {
        if (windows) {
            cmd->add_option("--window-days", window_days, "Days per window")->check(CLI::PositiveNumber);
            cmd->add_option("--lookahead", lookahead, "Landing lookahead in days")->check(CLI::NonNegativeNumber);
        }
        cmd->add_option("--mode", mode, "Product variant")->check(CLI::IsMember({"exact", "chunked"}));
        cmd->add_option("--chunks", chunks, "Chunk count for the chunked product (default: worker share)");
        cmd->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
        cmd->add_flag("--audit", audit, "Check graph disjointness after every normalization");
    }

    RunOptions options() const {
        RunOptions o;
        o.window_days = window_days;
        o.day_window.lookahead = lookahead;
        o.workers = workers;
        if (mode == "exact") {
            o.mode = ProductMode::exact();
        } else {
            o.mode = ProductMode::chunked(chunks == 0 ? 1 : chunks);
            o.auto_chunks = chunks == 0;
        }
        return o;
    }
};

// Runs `body` under a disjointness audit when requested.
template <class F>
int audited(bool enabled, F&& body) {
    if (!enabled) return body();
    ScopedNormalizeAudit audit;
    const int rc = body();
    std::cerr << "audit: " << audit.normalizations() << " normalizations, " << audit.violations()
              << " violations\n";
    if (audit.violations() != 0) {
        std::cerr << "error: graph disjointness violated\n";
        return exit_invariant;
    }
    return rc;
}

std::set<Match> as_set(const std::vector<Match>& v) { return {v.begin(), v.end()}; }

std::size_t count_missing(const std::set<Match>& a, const std::set<Match>& b) {
    std::size_t n = 0;
    for (const auto& m : a) n += b.contains(m) ? 0 : 1;
    return n;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recover user/mac matchings from per-location daily observations"};
    app.require_subcommand(1);

    // generate
    WorldParams world;
    std::optional<double> obs_prob;
    fs::path events_out = "events.jsonl", truth_out = "truth.jsonl", schedule_out;
    auto* gen = app.add_subcommand("generate", "Generate a synthetic world and its observations");
    gen->add_option("--seed", world.seed, "Random seed");
    gen->add_option("--locations", world.n_locations, "Number of locations")->check(CLI::PositiveNumber);
    gen->add_option("--devices", world.n_devices, "Number of devices")->check(CLI::PositiveNumber);
    gen->add_option("--days", world.n_days, "Number of days")->check(CLI::PositiveNumber);
    gen->add_option("--move-prob", world.move_prob, "Daily flight probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--p", obs_prob, "Observation probability for both ids")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--p-user", world.obs_prob_user, "User id observation probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--p-mac", world.obs_prob_mac, "Mac observation probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--churn", world.churn_prob, "Daily user id churn probability")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--events", events_out, "Events output file");
    gen->add_option("--truth", truth_out, "Truth output file");
    gen->add_option("--schedule", schedule_out, "Optional schedule dump");

    // build
    PipelineFlags build_flags;
    fs::path events_in, out_dir = ".";
    auto* build = app.add_subcommand("build", "Fold each window of an events file into a graph file");
    build->add_option("--events", events_in, "Events file")->required();
    build->add_option("--out-dir", out_dir, "Directory for window_NNN.graph files");
    build_flags.attach(build, true);

    // combine
    PipelineFlags combine_flags;
    std::vector<fs::path> graph_inputs;
    fs::path graph_out = "final.graph", report_out;
    auto* combine = app.add_subcommand("combine", "Combine graph files (in time order) as a binary tree");
    combine->add_option("graphs", graph_inputs, "Graph files, oldest first")->required();
    combine->add_option("--out", graph_out, "Output graph file");
    combine->add_option("--report", report_out, "Run report file (no timings)");
    combine_flags.attach(combine, false);

    // run
    PipelineFlags run_flags;
    fs::path run_events, run_out = "final.graph", run_report;
    auto* run_cmd = app.add_subcommand("run", "build and combine in one step");
    run_cmd->add_option("--events", run_events, "Events file")->required();
    run_cmd->add_option("--out", run_out, "Output graph file");
    run_cmd->add_option("--report", run_report, "Run report file (no timings)");
    run_flags.attach(run_cmd, true);

    // stats
    std::vector<fs::path> stats_inputs;
    std::vector<std::string> labels;
    auto* stats_cmd = app.add_subcommand("stats", "Coverage and user/mac ratio tables");
    stats_cmd->add_option("graphs", stats_inputs, "Graph files")->required();
    stats_cmd->add_option("--label", labels, "Row label per graph (default: file stem)");

    // verify
    fs::path verify_graph, verify_truth;
    auto* verify = app.add_subcommand("verify", "Score a graph against a truth file");
    verify->add_option("--graph", verify_graph, "Graph file")->required();
    verify->add_option("--truth", verify_truth, "Truth file")->required();

    // oracle-diff
    PipelineFlags diff_flags;
    fs::path diff_events;
    bool strict = false;
    auto* diff = app.add_subcommand("oracle-diff", "Compare pipeline matches with both oracles");
    diff->add_option("--events", diff_events, "Events file")->required();
    diff->add_flag("--strict", strict, "Exit 3 when the match sets differ");
    diff_flags.attach(diff, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (*gen) {
            if (obs_prob) world.obs_prob_user = world.obs_prob_mac = *obs_prob;
            const WorldTruth truth = generate_world(world);
            write_events(sample_observations(truth, world), events_out);
            write_truth(truth, truth_out);
            if (!schedule_out.empty()) write_file_atomically(schedule_out, serialize_schedule(truth));
            std::cout << "wrote " << events_out.string() << " and " << truth_out.string() << "\n";
            return 0;
        }

        if (*build) {
            return audited(build_flags.audit, [&] {
                const BatchCollection obs = parse_events(events_in);
                const RunOptions o = build_flags.options();
                const WindowPlan plan = plan_windows(obs.first_day(), obs.last_day(), o.window_days);
                fs::create_directories(out_dir);
                const ProductMode mode = o.auto_chunks && o.mode.is_chunked()
                                             ? ProductMode::chunked(static_cast<std::size_t>(o.workers))
                                             : o.mode;
                for (std::size_t w = 0; w < plan.intervals.size(); ++w) {
                    char name[32];
                    std::snprintf(name, sizeof name, "window_%03zu.graph", w);
                    const auto& iv = plan.intervals[w];
                    write_graph(fold_window(iv, obs, o.day_window, mode, o.workers), out_dir / name);
                    std::cout << (out_dir / name).string() << " days " << iv.start << ".." << iv.end << "\n";
                }
                return 0;
            });
        }

        if (*combine) {
            return audited(combine_flags.audit, [&] {
                std::vector<Graph> graphs;
                for (const auto& p : graph_inputs) graphs.push_back(read_graph(p));
                const RunOptions o = combine_flags.options();
                const ProductMode mode = o.auto_chunks && o.mode.is_chunked()
                                             ? ProductMode::chunked(static_cast<std::size_t>(o.workers))
                                             : o.mode;
                const CombineResult r = tree_combine(std::move(graphs), mode, o.workers);
                write_graph(r.graph, graph_out);
                if (!report_out.empty()) write_file_atomically(report_out, format_run_report(r.levels, false));
                std::cout << format_run_report(r.levels, true);
                return 0;
            });
        }

        if (*run_cmd) {
            return audited(run_flags.audit, [&] {
                const RunResult r = run(run_events, run_flags.options());
                write_graph(r.graph, run_out);
                if (!run_report.empty()) write_file_atomically(run_report, format_run_report(r.levels, false));
                std::cout << format_run_report(r.levels, true);
                return 0;
            });
        }

        if (*stats_cmd) {
            if (!labels.empty() && labels.size() != stats_inputs.size()) {
                std::cerr << "error: give one --label per graph file\n";
                return exit_usage;
            }
            std::vector<StatsRow> rows;
            for (std::size_t i = 0; i < stats_inputs.size(); ++i) {
                rows.push_back({labels.empty() ? stats_inputs[i].stem().string() : labels[i],
                                stats(read_graph(stats_inputs[i]))});
            }
            std::cout << format_stats_tables(rows);
            return 0;
        }

        if (*verify) {
            std::cout << format_eval_report(evaluate(read_graph(verify_graph), read_truth(verify_truth)));
            return 0;
        }

        if (*diff) {
            return audited(diff_flags.audit, [&] {
                const BatchCollection obs = parse_events(diff_events);
                const RunOptions o = diff_flags.options();
                const RunResult r = run(obs, o);
                const auto leaves = leaf_mappings_between(obs.first_day(), obs.last_day(), obs, o.day_window);
                const auto pipeline = as_set(r.graph.matches);
                const auto trace = as_set(trace_oracle(leaves).matches);
                const auto naive = as_set(naive_fixpoint(Graph{leaves, {}}).matches);
                const std::size_t d_trace = count_missing(pipeline, trace) + count_missing(trace, pipeline);
                const std::size_t d_naive = count_missing(pipeline, naive) + count_missing(naive, pipeline);
                std::cout << "leaves " << leaves.size() << "\n"
                          << "pipeline matches " << pipeline.size() << "\n"
                          << "trace_oracle matches " << trace.size() << "\n"
                          << "naive_fixpoint matches " << naive.size() << "\n"
                          << "pipeline vs trace_oracle difference " << d_trace << "\n"
                          << "pipeline vs naive_fixpoint difference " << d_naive << "\n";
                return strict && (d_trace != 0 || d_naive != 0) ? exit_invariant : 0;
            });
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == Errc::InvariantViolation) return exit_invariant;
        if (e.code() == Errc::InvalidArgument || e.code() == Errc::BadInterval) return exit_usage;
        return exit_data;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_invariant;
    }
    return 0;
}
