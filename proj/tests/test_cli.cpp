#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include "opdyn/io.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::test;

namespace fs = std::filesystem;

namespace {

const std::string kCli = OPDYN_CLI_PATH;
const fs::path kFixtures = OPDYN_FIXTURE_DIR;

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "opdyn_cli_tests";
    fs::create_directories(dir);
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path log = work_dir() / "cli_output.txt";
    const std::string command = kCli + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(command.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    r.output.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return r;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::string fixture(const char* name) { return (kFixtures / name).string(); }

}  // namespace

TEST_CASE("check: the synchronous fixture satisfies its assumptions") {
    const RunResult r = run_cli("check " + fixture("friedkin_example.model"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("row-stochastic") != std::string::npos);
    CHECK(r.output.find("assumptions: hold") != std::string::npos);
}

TEST_CASE("check: the gossip fixture reports a contracting expectation") {
    const RunResult r = run_cli("check " + fixture("gossip_example.model"));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("rho(Abar) = 0.9") != std::string::npos);
    CHECK(r.output.find("Schur stable (reachability): yes") != std::string::npos);
}

TEST_CASE("check: fully open-minded model violates the reachability assumption") {
    const fs::path path = work_dir() / "all_open.model";
    {
        std::ofstream out(path);
        out << R"({
          "schema_version": 1, "kind": "gossip", "n": 2,
          "edges": [[1, 1], [1, 2], [2, 1], [2, 2]],
          "u": [0, 100],
          "H": [1.0, 1.0],
          "Gamma": [[0.5, 0.5], [0.5, 0.5]]
        })";
    }
    const RunResult r = run_cli("check " + path.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("assumptions: violated") != std::string::npos);
}

TEST_CASE("exit codes: missing files and parse failures report 2") {
    CHECK(run_cli("check " + (work_dir() / "missing.model").string()).exit_code == 2);

    const fs::path bad = work_dir() / "bad.model";
    {
        std::ofstream out(bad);
        out << "{ not json";
    }
    CHECK(run_cli("check " + bad.string()).exit_code == 2);
    CHECK(run_cli("limit " + bad.string()).exit_code == 2);
}

TEST_CASE("limit: writes the published limit profile") {
    const fs::path out = work_dir() / "fj_limit.csv";
    const RunResult r =
        run_cli("limit " + fixture("friedkin_example.model") + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string content = read_file(out);
    CHECK(content.find("# command = limit") != std::string::npos);
    CHECK(content.find("name,row,col,value") != std::string::npos);
    CHECK(content.find("x_prime,1,,60.0") != std::string::npos);
    CHECK(content.find("V,2,3,0.54") != std::string::npos);
}

TEST_CASE("limit: gossip fixture agrees with the synchronous limit") {
    const fs::path out = work_dir() / "gossip_limit.json";
    const RunResult r = run_cli("limit " + fixture("gossip_example.model") + " --format json --out " +
                                out.string());
    CHECK(r.exit_code == 0);
    const std::string content = read_file(out);
    CHECK(content.find("\"manifest\"") != std::string::npos);
    CHECK(content.find("x_star") != std::string::npos);
    CHECK(content.find("rho") != std::string::npos);
    CHECK(r.output.find("x* = [60.02") != std::string::npos);
}

TEST_CASE("map: reproduces the bundled gossip fixture") {
    const fs::path out = work_dir() / "mapped.model";
    const RunResult r =
        run_cli("map " + fixture("friedkin_example.model") + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("max residual") != std::string::npos);

    const ModelDocument mapped = load_model(out);
    REQUIRE_FALSE(mapped.is_fj());
    CHECK(max_abs_diff(mapped.gossip().openness(), paper_h()) <= 0.001);
    CHECK(max_abs_diff(mapped.gossip().mixing(), paper_gamma()) <= 0.001);

    const ModelDocument bundled = load_model(kFixtures / "gossip_example.model");
    CHECK(max_abs_diff(mapped.gossip().openness(), bundled.gossip().openness()) == 0.0);
    CHECK(max_abs_diff(mapped.gossip().mixing(), bundled.gossip().mixing()) == 0.0);

    CHECK(run_cli("map " + fixture("gossip_example.model")).exit_code == 1);
}

TEST_CASE("simulate: identical seeds give bit-identical trajectory files") {
    const fs::path out_a = work_dir() / "traj_a.csv";
    const fs::path out_b = work_dir() / "traj_b.csv";
    const std::string base = "simulate " + fixture("gossip_example.model") +
                             " --steps 2000 --seed 7 --out ";
    CHECK(run_cli(base + out_a.string()).exit_code == 0);
    CHECK(run_cli(base + out_b.string()).exit_code == 0);
    const std::string a = read_file(out_a);
    CHECK(a == read_file(out_b));
    CHECK(a.find("# seed = 7") != std::string::npos);
    CHECK(a.find("# steps = 2000") != std::string::npos);

    const fs::path out_c = work_dir() / "traj_c.csv";
    CHECK(run_cli("simulate " + fixture("gossip_example.model") + " --steps 2000 --seed 8 --out " +
                  out_c.string())
              .exit_code == 0);
    CHECK(a != read_file(out_c));
}

TEST_CASE("simulate: zero steps emits the initial profile only") {
    const fs::path out = work_dir() / "traj_zero.csv";
    const RunResult r = run_cli("simulate " + fixture("gossip_example.model") +
                                " --steps 0 --out " + out.string());
    CHECK(r.exit_code == 0);
    const std::string content = read_file(out);
    CHECK(content.find("\n0,25,25,75,85,25,25,75,85\n") != std::string::npos);
    int data_rows = 0;
    bool in_data = false;
    for (std::size_t i = 0; i < content.size(); ++i) {
        if (content[i] == '\n') continue;
        const bool line_start = i == 0 || content[i - 1] == '\n';
        if (!line_start) continue;
        if (content[i] == 'k') in_data = true;
        else if (in_data && content[i] != '#') ++data_rows;
    }
    CHECK(data_rows == 1);
}

TEST_CASE("simulate: synchronous iteration table for the fj fixture") {
    const fs::path out = work_dir() / "fj_traj.csv";
    const RunResult r = run_cli("simulate " + fixture("friedkin_example.model") +
                                " --steps 200 --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("final x = [60.02") != std::string::npos);
    const std::string content = read_file(out);
    CHECK(content.find("# kind = fj") != std::string::npos);
}

TEST_CASE("ensemble: rejects synchronous models and honors checkpoints") {
    CHECK(run_cli("ensemble " + fixture("friedkin_example.model") + " --steps 100 --replicates 4")
              .exit_code == 1);

    const fs::path out = work_dir() / "ens.csv";
    const RunResult r =
        run_cli("ensemble " + fixture("gossip_example.model") +
                " --steps 2000 --replicates 16 --seed 3 --checkpoints 100,1000,2000 --out " +
                out.string());
    CHECK(r.exit_code == 0);
    const std::string content = read_file(out);
    CHECK(content.find("checkpoint,mse,replicates") != std::string::npos);
    CHECK(content.find("\n100,") != std::string::npos);
    CHECK(content.find("\n2000,") != std::string::npos);
    CHECK(content.find("# replicates = 16") != std::string::npos);
}

TEST_CASE("output directory env var provides the default location") {
    const fs::path dir = work_dir() / "env_out";
    fs::remove_all(dir);
    const std::string command = "OPDYN_OUT_DIR=" + dir.string() + " " + kCli + " limit " +
                                fixture("friedkin_example.model") + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(dir / "friedkin_example_limit.csv"));
    fs::remove_all(dir);
}
