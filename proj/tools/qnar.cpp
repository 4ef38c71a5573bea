#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>

#include "qnar/config.hpp"
#include "qnar/credrank.hpp"
#include "qnar/errors.hpp"
#include "qnar/io.hpp"
#include "qnar/pagerank.hpp"
#include "qnar/simulation.hpp"
#include "qnar/snapshot.hpp"

extern char** environ;

namespace {

using namespace qnar;

constexpr int kExitInputError = 2;
constexpr int kExitNumericalFailure = 3;
constexpr int kExitProtocolViolation = 4;
constexpr int kExitInterrupted = 130;

std::atomic<bool> g_cancel{false};

void handle_interrupt(int) { g_cancel.store(true, std::memory_order_relaxed); }

int exit_code_for(errc code) {
    switch (code) {
        case errc::no_convergence:
        case errc::too_large:
        case errc::empty_anchor_set:
        case errc::zero_anchor_mass:
        case errc::no_contributors:
        case errc::zero_total_score:
        case errc::overflow_guard:
        case errc::degenerate_returns:
        case errc::division_by_zero:
            return kExitNumericalFailure;
        case errc::deposit_too_small:
        case errc::insufficient_balance:
        case errc::wrong_phase:
        case errc::duplicate_commit:
        case errc::no_such_commitment:
        case errc::digest_mismatch:
        case errc::no_valid_reveals:
        case errc::not_a_winner:
            return kExitProtocolViolation;
        default:
            return kExitInputError;
    }
}

void log_config(const Config& cfg) {
    for (const auto& [key, value] : cfg.entries())
        std::fprintf(stderr, "config: %s = %s\n", key.c_str(), value.c_str());
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
        return;
    }
    atomic_write(out_path, content);
}

std::string signed_tokens(std::int64_t subunits) {
    std::string out = subunits < 0 ? "-" : "+";
    out += TokenAmount::from_subunits(subunits < 0 ? -subunits : subunits).to_string();
    return out;
}

// Average probability that a random walk leaving a courselet steps straight
// to a user. Courselets link to users only through their creator, so this
// reads out how much credit flows back to authors.
void print_author_transition(const ContributionGraph& g) {
    std::vector<double> out_sums = g.out_weight_sums();
    std::vector<double> to_user(g.node_count(), 0.0);
    for (const Edge& e : g.edges())
        if (g.node(e.src).kind == NodeKind::Courselet && g.node(e.dst).kind == NodeKind::User)
            to_user[e.src] += e.weight;

    double total = 0.0;
    std::size_t courselets = 0;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (g.node(static_cast<std::uint32_t>(i)).kind != NodeKind::Courselet) continue;
        if (out_sums[i] <= 0.0) continue;
        total += to_user[i] / out_sums[i];
        ++courselets;
    }
    if (courselets == 0) return;
    double avg = total / static_cast<double>(courselets);
    std::fprintf(stderr, "courselet->author transition: %.2f (%.12g, avg over %zu courselets)\n",
                 avg, avg, courselets);
}

int cmd_score(const Config& cfg, const std::string& events_path, const std::string& out_path,
              std::string snapshot_path) {
    std::vector<ContributionEvent> events = read_events_jsonl(events_path);
    if (events.empty()) fail(errc::parse_error, "no events in " + events_path);
    WeightConfig weights = weights_from(cfg);
    print_author_transition(ingest_events(events, weights));

    EpochConfig epochs = epoch_config_from(cfg, events);
    EpochGraphSequence seq =
        build_epoch_sequence(std::move(events), epochs, weights, epoch_build_options_from(cfg));
    CredRankResult scores = credrank(seq, weights, credrank_options_from(cfg));

    emit(out_path, scores_csv(scores));

    if (snapshot_path.empty() && !out_path.empty()) snapshot_path = out_path + ".qsnp";
    if (!snapshot_path.empty()) {
        Snapshot snap;
        snap.graph = seq.graphs.empty() ? ContributionGraph{} : seq.graphs.back();
        snap.epochs = std::move(seq);
        snap.scores = scores;
        for (const EpochScores& es : snap.scores.epochs)
            for (std::size_t i = 0; i < es.users.size(); ++i)
                snap.ledger.record_reputation(es.users[i], es.period,
                                              TokenAmount::from_tokens(es.scores[i]));
        write_snapshot(snapshot_path, snap);
        std::fprintf(stderr, "snapshot written: %s\n", snapshot_path.c_str());
    }
    return 0;
}

int cmd_simulate(const Config& cfg, const std::string& out_path,
                 const std::string& wealth_out_path) {
    std::vector<SimulationConfig> grid = simulation_grid_from(cfg);
    std::signal(SIGINT, handle_interrupt);

    std::vector<SimulationResult> results;
    results.reserve(grid.size());
    bool interrupted = false;
    for (SimulationConfig& cell : grid) {
        cell.cancel = &g_cancel;
        if (!wealth_out_path.empty()) cell.record_wealth = true;
        SimulationResult result = run_simulation(cell);
        interrupted = interrupted || result.interrupted;

        Welford pooled = result.pooled_returns();
        std::size_t truncated = 0;
        for (const ReplicationResult& rep : result.replications)
            if (rep.truncated) ++truncated;
        std::fprintf(stderr,
                     "simulate: n=%d rounds=%lld dist=%s reps=%zu/%d mean=%.12g sharpe=%.12g "
                     "truncated=%zu%s\n",
                     cell.stakers, static_cast<long long>(cell.rounds),
                     to_string(cell.wealth.kind), result.replications.size(), cell.replications,
                     pooled.count() >= 1 ? pooled.mean() : 0.0,
                     pooled.count() >= 2 && pooled.variance() > 0.0 ? sharpe_ratio(pooled) : 0.0,
                     truncated, result.interrupted ? " (interrupted)" : "");

        results.push_back(std::move(result));
        if (interrupted) break;
    }

    std::string csv = simulation_csv(results);
    if (interrupted) csv += "# interrupted: partial results\n";
    emit(out_path, csv);
    if (!wealth_out_path.empty()) atomic_write(wealth_out_path, wealth_paths_csv(results));
    return interrupted ? kExitInterrupted : 0;
}

int cmd_auction_replay(const Config& cfg, const std::string& journal_path,
                       const std::string& out_path) {
    std::vector<AuctionAction> actions = read_auction_journal(journal_path);
    Settlement settlement = replay_auction(actions, auction_config_from(cfg));

    std::fprintf(stderr, "auction: %s%s, pot %s, burned %s, minted %s, ratio %.12g\n",
                 to_string(settlement.outcome), settlement.tie ? " (tie)" : "",
                 settlement.pot.to_string().c_str(), settlement.burned.to_string().c_str(),
                 settlement.minted.to_string().c_str(), settlement.ratio);
    std::fprintf(stderr, "decision sum: %s%s\n", settlement.decision_sign < 0 ? "-" : "",
                 settlement.decision_magnitude.to_string().c_str());
    for (const Receipt& r : settlement.receipts) {
        std::int64_t profit =
            r.returned.subunits() + r.inflation.subunits() - r.stake.subunits();
        std::fprintf(stderr, "%s: %s%s\n", r.staker.c_str(), signed_tokens(profit).c_str(),
                     r.forfeited ? " (forfeited)" : "");
    }

    emit(out_path, settlement_csv(settlement));
    return 0;
}

bool looks_like_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open " + path);
    char magic[4] = {};
    in.read(magic, 4);
    return in.gcount() == 4 && magic[0] == 'Q' && magic[1] == 'S' && magic[2] == 'N' &&
           magic[3] == 'P';
}

bool looks_like_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path);
    char first = 0;
    while (in.get(first))
        if (first != ' ' && first != '\t' && first != '\n' && first != '\r') break;
    return first == '{';
}

int cmd_validate(const Config& cfg, const std::string& path) {
    if (looks_like_snapshot(path)) {
        Snapshot snap = read_snapshot(path);
        std::vector<std::uint8_t> reencoded = encode_snapshot(snap);
        std::ifstream in(path, std::ios::binary);
        std::vector<std::uint8_t> original((std::istreambuf_iterator<char>(in)),
                                           std::istreambuf_iterator<char>());
        if (reencoded != original)
            fail(errc::checksum_mismatch, "snapshot does not round-trip byte-identically");
        std::printf("snapshot ok: %zu nodes, %zu edges, %zu periods, %zu accounts\n",
                    snap.graph.node_count(), snap.graph.edge_count(), snap.epochs.graphs.size(),
                    snap.ledger.users().size());
        return 0;
    }
    if (looks_like_jsonl(path)) {
        std::vector<ContributionEvent> events = read_events_jsonl(path);
        ContributionGraph g = ingest_events(events, weights_from(cfg));
        std::printf("events ok: %zu events, %zu nodes, %zu edges, horizon %lld\n", events.size(),
                    g.node_count(), g.edge_count(), static_cast<long long>(g.horizon()));
        return 0;
    }
    Config probe = Config::defaults();
    probe.apply_file(path);
    weights_from(probe);
    pagerank_options_from(probe);
    credrank_options_from(probe);
    simulation_grid_from(probe);
    auction_config_from(probe);
    std::printf("config ok: %zu settings\n", probe.entries().size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reputation scoring, token payouts, and staking games"};
    app.require_subcommand(1);

    std::string config_path, weights_path, out_path;
    std::uint64_t seed = 0;
    int threads = 0, epochs = 0;
    bool seed_set = false, threads_set = false, epochs_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value settings file");
        sub->add_option("--weights", weights_path, "edge/mint weight overrides file");
        sub->add_option("--out", out_path, "output file (atomic); stdout when omitted");
        sub->add_option("--seed", seed, "simulation seed")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_option("--threads", threads, "worker threads")->each([&](const std::string&) {
            threads_set = true;
        });
        sub->add_option("--epochs", epochs, "number of scoring periods")
            ->each([&](const std::string&) { epochs_set = true; });
    };

    std::string events_path, journal_path, validate_path, snapshot_path, wealth_out_path;
    CLI::App* score = app.add_subcommand("score", "score contributions per period");
    score->add_option("events", events_path, "events JSONL file")->required();
    score->add_option("--snapshot", snapshot_path,
                      "snapshot output; defaults to <out>.qsnp when --out is set");
    add_common(score);

    CLI::App* simulate = app.add_subcommand("simulate", "run the staking game grid");
    simulate->add_option("--wealth-out", wealth_out_path, "per-round wealth path CSV");
    add_common(simulate);

    CLI::App* replay = app.add_subcommand("auction-replay", "replay a review auction journal");
    replay->add_option("journal", journal_path, "auction journal JSONL file")->required();
    add_common(replay);

    CLI::App* validate = app.add_subcommand("validate", "check a snapshot, events, or config file");
    validate->add_option("file", validate_path, "file to check")->required();
    add_common(validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "qnar: %s\n", e.what());
        return kExitInputError;
    }

    try {
        Config cfg = Config::defaults();
        if (!config_path.empty()) cfg.apply_file(config_path);
        cfg.apply_env(environ);
        if (!weights_path.empty()) cfg.apply_file(weights_path);
        if (seed_set) cfg.set("sim.seed", std::to_string(seed));
        if (threads_set) cfg.set("sim.threads", std::to_string(threads));
        if (epochs_set) cfg.set("epoch.count", std::to_string(epochs));
        log_config(cfg);

        if (score->parsed()) return cmd_score(cfg, events_path, out_path, snapshot_path);
        if (simulate->parsed()) return cmd_simulate(cfg, out_path, wealth_out_path);
        if (replay->parsed()) return cmd_auction_replay(cfg, journal_path, out_path);
        return cmd_validate(cfg, validate_path);
    } catch (const Error& e) {
        std::fprintf(stderr, "qnar: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qnar: %s\n", e.what());
        return kExitInputError;
    }
}
