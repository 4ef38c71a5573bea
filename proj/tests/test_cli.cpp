#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using std::filesystem::path;

namespace {

const path kFixtures{QNAR_FIXTURES};

struct RunResult {
    int status = -1;
    std::string out;
    std::string err;
};

std::string slurp(const path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

path work_dir() {
    path dir = std::filesystem::temp_directory_path() / "qnar_cli_test";
    std::filesystem::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
    path dir = work_dir();
    path out = dir / "stdout.txt";
    path err = dir / "stderr.txt";
    std::string cmd = env + (env.empty() ? "" : " ") + QNAR_BIN + " " + args + " > '" +
                      out.string() + "' 2> '" + err.string() + "'";
    int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    RunResult result;
    result.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string write_file(const std::string& name, const std::string& content) {
    path p = work_dir() / name;
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out);
    out << content;
    return p.string();
}

} // namespace

TEST_CASE("score renders author credit, scores, and a snapshot") {
    path events = kFixtures / "fig5_events.jsonl";
    path csv = work_dir() / "scores.csv";
    RunResult r = run_cli("score '" + events.string() + "' --out '" + csv.string() + "'");

    CHECK(r.status == 0);
    CHECK(contains(r.err, "courselet->author transition: 0.89"));
    CHECK(contains(r.err, "config: pagerank.alpha = 0.15"));
    CHECK(contains(r.err, "snapshot written: " + csv.string() + ".qsnp"));
    CHECK(r.out.empty());

    std::string scores = slurp(csv);
    CHECK(scores.rfind("period,node,s_star,s_normalized\n", 0) == 0);
    CHECK(std::filesystem::exists(csv.string() + ".qsnp"));

    SUBCASE("reruns are byte-identical") {
        path csv2 = work_dir() / "scores_again.csv";
        RunResult again =
            run_cli("score '" + events.string() + "' --out '" + csv2.string() + "'");
        CHECK(again.status == 0);
        CHECK(slurp(csv2) == scores);
        CHECK(slurp(csv2.string() + ".qsnp") == slurp(csv.string() + ".qsnp"));
    }
}

TEST_CASE("simulate runs the configured grid deterministically across threads") {
    std::string env = "QNAR_SIM_N=6 QNAR_SIM_ROUNDS=40 QNAR_SIM_REPS=3 QNAR_SIM_SEED=11";
    path a = work_dir() / "sim_a.csv";
    path b = work_dir() / "sim_b.csv";
    path wa = work_dir() / "wealth_a.csv";
    path wb = work_dir() / "wealth_b.csv";

    RunResult one = run_cli("simulate --out '" + a.string() + "' --wealth-out '" + wa.string() +
                                "' --threads 1",
                            env);
    RunResult three = run_cli("simulate --out '" + b.string() + "' --wealth-out '" + wb.string() +
                                  "' --threads 3",
                              env);
    CHECK(one.status == 0);
    CHECK(three.status == 0);
    CHECK(contains(one.err, "simulate: n=6 rounds=40 dist=uniform reps=3/3"));

    std::string csv = slurp(a);
    CHECK(csv == slurp(b));
    CHECK(slurp(wa) == slurp(wb));

    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "n,rounds,dist,exp_return,std,sharpe,survivors");
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.rfind("6,40,uniform,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 3);
}

TEST_CASE("auction replay prints the worked settlement") {
    path journal = kFixtures / "worked_auction.jsonl";
    path csv = work_dir() / "settlement.csv";
    RunResult r = run_cli("auction-replay '" + journal.string() + "' --out '" + csv.string() + "'");

    CHECK(r.status == 0);
    CHECK(contains(r.err, "auction: accepted, pot 5, burned 0, minted 0"));
    CHECK(contains(r.err, "decision sum: 1"));
    CHECK(contains(r.err, "S1: +0.666666667"));
    CHECK(contains(r.err, "S2: +1.333333333"));
    CHECK(contains(r.err, "S3: -2"));

    CHECK(slurp(csv) ==
          "staker,stake,vote,revealed,forfeited,returned,inflation\n"
          "S1,1,accept,1,0,1.666666667,0\n"
          "S2,2,accept,1,0,3.333333333,0\n"
          "S3,2,deny,1,0,0,0\n");
}

TEST_CASE("settings layer as defaults, file, environment, then flags") {
    std::string cfg = write_file("layered.conf",
                                 "pagerank.alpha = 0.25\n"
                                 "sim.seed = 5\n");
    path events = kFixtures / "fig5_events.jsonl";
    RunResult r = run_cli("score '" + events.string() + "' --config '" + cfg + "' --seed 42",
                          "QNAR_PAGERANK_ALPHA=0.3 QNAR_SIM_SEED=7");

    CHECK(r.status == 0);
    CHECK(contains(r.err, "config: pagerank.alpha = 0.3"));
    CHECK(contains(r.err, "config: sim.seed = 42"));
}

TEST_CASE("failures map to distinct exit codes") {
    SUBCASE("unreadable events file") {
        RunResult r = run_cli("score '" + (work_dir() / "nope.jsonl").string() + "'");
        CHECK(r.status == 2);
    }
    SUBCASE("events file with no events") {
        std::string empty = write_file("empty.jsonl", "");
        RunResult r = run_cli("score '" + empty + "'");
        CHECK(r.status == 2);
        CHECK(contains(r.err, "no events"));
    }
    SUBCASE("journal that breaks protocol") {
        std::string empty = write_file("empty_journal.jsonl", "");
        RunResult r = run_cli("auction-replay '" + empty + "'");
        CHECK(r.status == 4);
    }
    SUBCASE("rank engine that cannot converge") {
        path events = kFixtures / "fig5_events.jsonl";
        RunResult r = run_cli("score '" + events.string() + "'", "QNAR_PAGERANK_MAX_ITER=1");
        CHECK(r.status == 3);
    }
    SUBCASE("unknown flag") {
        RunResult r = run_cli("simulate --frobnicate");
        CHECK(r.status == 2);
    }
}

TEST_CASE("validate inspects snapshots, events, and configs") {
    path events = kFixtures / "fig5_events.jsonl";
    path csv = work_dir() / "validate_scores.csv";
    REQUIRE(run_cli("score '" + events.string() + "' --out '" + csv.string() + "'").status == 0);

    SUBCASE("snapshot") {
        RunResult r = run_cli("validate '" + csv.string() + ".qsnp'");
        CHECK(r.status == 0);
        CHECK(contains(r.out, "snapshot ok:"));
    }
    SUBCASE("events") {
        RunResult r = run_cli("validate '" + events.string() + "'");
        CHECK(r.status == 0);
        CHECK(contains(r.out, "events ok: 3 events"));
    }
    SUBCASE("config") {
        std::string cfg = write_file("valid.conf", "sim.n = 5\ncredrank.decay = 0.7\n");
        RunResult r = run_cli("validate '" + cfg + "'");
        CHECK(r.status == 0);
        CHECK(contains(r.out, "config ok:"));
    }
    SUBCASE("garbage") {
        std::string junk = write_file("junk.txt", "this is not anything parseable\n");
        RunResult r = run_cli("validate '" + junk + "'");
        CHECK(r.status == 2);
    }
}
