#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "opdyn/errors.hpp"
#include "opdyn/io.hpp"
#include "opdyn/rng.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::test;

namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = OPDYN_FIXTURE_DIR;

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "opdyn_io_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("load_model: bundled synchronous fixture") {
    const ModelDocument doc = load_model(kFixtures / "friedkin_example.model");
    REQUIRE(doc.is_fj());
    const FJModel& m = doc.fj();
    CHECK(m.agent_count() == 4);
    CHECK(m.graph().edge_count() == 13);
    CHECK(m.influence()(0, 0) == 0.220);
    CHECK(m.influence()(0, 1) == 0.120);
    CHECK(m.influence()(0, 2) == 0.360);
    CHECK(m.influence()(0, 3) == 0.300);
    CHECK(m.prejudice() == std::vector<double>{25.0, 25.0, 75.0, 85.0});
    CHECK(doc.name == std::string("friedkin_example"));
}

TEST_CASE("load_model: bundled gossip fixture carries the mapped coefficients") {
    const ModelDocument doc = load_model(kFixtures / "gossip_example.model");
    REQUIRE_FALSE(doc.is_fj());
    const GossipModel& m = doc.gossip();
    CHECK(max_abs_diff(m.openness(), paper_h()) <= 0.001);
    CHECK(max_abs_diff(m.mixing(), paper_gamma()) <= 0.001);
    CHECK(m.uniform_edges());

    // The fixture is the full-precision image of the synchronous fixture.
    const GossipModel mapped = paper_gossip_model();
    CHECK(max_abs_diff(m.openness(), mapped.openness()) == 0.0);
    CHECK(max_abs_diff(m.mixing(), mapped.mixing()) == 0.0);
}

TEST_CASE("parse_model: malformed json is a parse error") {
    CHECK_THROWS_WITH_AS(parse_model("{ this is not json"), doctest::Contains("ParseError"), Error);
    try {
        parse_model("{\"schema_version\": 1,");
    } catch (const Error& e) {
        CHECK(e.code() == errc::parse_error);
    }
}

TEST_CASE("parse_model: missing and ill-typed fields are named") {
    CHECK_THROWS_WITH_AS(parse_model("{}"), doctest::Contains("schema_version"), Error);
    CHECK_THROWS_WITH_AS(
        parse_model(R"({"schema_version": 1, "kind": "nope", "n": 2, "edges": [], "u": [0, 0]})"),
        doctest::Contains("kind"), Error);
    CHECK_THROWS_WITH_AS(
        parse_model(R"({"schema_version": 9, "kind": "fj", "n": 2, "edges": [], "u": [0, 0]})"),
        doctest::Contains("schema_version"), Error);
}

TEST_CASE("parse_model: gamma row off stochasticity is rejected with the row named") {
    const std::string text = R"({
      "schema_version": 1, "kind": "gossip", "n": 2,
      "edges": [[1, 1], [1, 2], [2, 1], [2, 2]],
      "u": [0, 100],
      "H": [0.5, 0.5],
      "Gamma": [[0.5, 0.5], [0.6, 0.3]]
    })";
    CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("row 2"), Error);
    CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("row-stochastic"), Error);

    // Renormalization rescues rounded rows and reports the correction.
    LoadReport report;
    const ModelDocument doc = parse_model(text, LoadOptions{.renormalize = true}, &report);
    CHECK(report.renormalized);
    CHECK(report.max_row_correction == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(doc.gossip().mixing()(1, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("parse_model: triplet matrices equal their dense form") {
    const std::string dense = R"({
      "schema_version": 1, "kind": "fj", "n": 2,
      "edges": [[1, 1], [1, 2], [2, 1], [2, 2]],
      "u": [1, 2],
      "W": [[0.5, 0.5], [0.25, 0.75]]
    })";
    const std::string triplets = R"({
      "schema_version": 1, "kind": "fj", "n": 2,
      "edges": [[1, 1], [1, 2], [2, 1], [2, 2]],
      "u": [1, 2],
      "W": {"triplets": [[1, 1, 0.5], [1, 2, 0.5], [2, 1, 0.25], [2, 2, 0.75]]}
    })";
    CHECK(parse_model(dense) == parse_model(triplets));
}

TEST_CASE("parse_model: missing self-loops are reported") {
    const std::string text = R"({
      "schema_version": 1, "kind": "fj", "n": 2,
      "edges": [[1, 2], [2, 1], [2, 2]],
      "u": [1, 2],
      "W": [[0.5, 0.5], [0.25, 0.75]]
    })";
    LoadReport report;
    const ModelDocument doc = parse_model(text, {}, &report);
    CHECK(report.added_self_loops == std::vector<int>{0});
    CHECK(doc.graph().edge_count() == 4);
}

TEST_CASE("parse_model: edge weights follow the file's edge order") {
    const std::string text = R"({
      "schema_version": 1, "kind": "gossip", "n": 2,
      "edges": [[2, 2], [1, 1], [1, 2]],
      "u": [0, 1],
      "H": [0.5, 0.5],
      "Gamma": [[0.5, 0.5], [0, 1]],
      "edge_weights": [0.5, 0.3, 0.2]
    })";
    const ModelDocument doc = parse_model(text);
    // Canonical order is (1,1), (1,2), (2,2).
    REQUIRE(doc.gossip().edge_weights().has_value());
    CHECK(*doc.gossip().edge_weights() == std::vector<double>{0.3, 0.2, 0.5});

    // Auto-added self-loops cannot be weighted.
    const std::string missing_loop = R"({
      "schema_version": 1, "kind": "gossip", "n": 2,
      "edges": [[1, 2], [2, 2]],
      "u": [0, 1],
      "H": [0.5, 0.5],
      "Gamma": [[0.5, 0.5], [0, 1]],
      "edge_weights": [0.5, 0.5]
    })";
    CHECK_THROWS_WITH_AS(parse_model(missing_loop), doctest::Contains("self-loop"), Error);
}

TEST_CASE("round-trip: serialize then parse is the identity on models") {
    RngStream rng(246, 0);
    for (int trial = 0; trial < 60; ++trial) {
        ModelDocument doc;
        if (trial % 2 == 0) {
            doc.model = random_fj_model(rng);
            doc.name = "fj case " + std::to_string(trial);
        } else {
            GossipModel m = random_gossip_model(rng, 8, false);
            if (trial % 4 == 1) {
                // Re-create with random weights over the canonical edge list.
                std::vector<double> w(static_cast<std::size_t>(m.graph().edge_count()));
                double sum = 0.0;
                for (double& v : w) {
                    v = uniform(rng, 0.1, 1.0);
                    sum += v;
                }
                for (double& v : w) v /= sum;
                doc.model = GossipModel::create(m.graph(), m.openness(), m.mixing(), m.prejudice(), w);
            } else {
                doc.model = m;
            }
            doc.description = "gossip case";
        }
        const ModelDocument back = parse_model(serialize_model(doc));
        CHECK(back == doc);
        CHECK(model_hash(back) == model_hash(doc));
    }
}

TEST_CASE("save_model and load_model round-trip through the filesystem") {
    ModelDocument doc;
    doc.model = paper_fj_model();
    doc.name = "disk trip";
    const fs::path path = temp_dir() / "roundtrip.model";
    save_model(path, doc);
    CHECK(load_model(path) == doc);
    fs::remove(path);

    CHECK_THROWS_AS(load_model(temp_dir() / "does_not_exist.model"), Error);
    try {
        load_model(temp_dir() / "does_not_exist.model");
    } catch (const Error& e) {
        CHECK(e.code() == errc::io_error);
    }
}

TEST_CASE("format_g17 keeps doubles bit-exact") {
    RngStream rng(135, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double v = (rng.next_unit() - 0.5) * std::pow(10.0, uniform(rng, -6, 6));
        CHECK(std::stod(format_g17(v)) == v);
    }
}

TEST_CASE("atomic_write replaces the file content completely") {
    const fs::path path = temp_dir() / "atomic.txt";
    atomic_write(path, "first\n");
    atomic_write(path, "second\n");
    std::ifstream in(path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "second\n");
    CHECK_FALSE(fs::exists(path.string() + ".tmp"));
    fs::remove(path);
}

TEST_CASE("render_trajectory embeds the manifest and the table") {
    const GossipModel m = paper_gossip_model();
    const Trajectory t = run_trajectory(m, 10, RngStream(1));
    Manifest mf;
    mf.add("tool", std::string("opdyn test"));
    mf.add("seed", std::uint64_t{1});

    const std::string csv = render_trajectory(t, 4, mf, ResultsFormat::Csv);
    CHECK(csv.find("# tool = opdyn test") != std::string::npos);
    CHECK(csv.find("# seed = 1") != std::string::npos);
    CHECK(csv.find("k,x_1,x_2,x_3,x_4,xbar_1,xbar_2,xbar_3,xbar_4") != std::string::npos);
    CHECK(csv.find("\n0,25,25,75,85,25,25,75,85\n") != std::string::npos);

    const std::string json = render_trajectory(t, 4, mf, ResultsFormat::Json);
    CHECK(json.find("\"manifest\"") != std::string::npos);
    CHECK(json.find("\"columns\"") != std::string::npos);
}

TEST_CASE("render_ensemble reports the decay fit") {
    EnsembleStats stats;
    stats.checkpoints = {10, 100};
    stats.mse = {1.0, 0.1};
    stats.replicates = 7;
    stats.decay_fit = DecayFit{1.0, 0.5};
    Manifest mf;
    mf.add("command", std::string("ensemble"));

    const std::string csv = render_ensemble(stats, mf, ResultsFormat::Csv);
    CHECK(csv.find("checkpoint,mse,replicates") != std::string::npos);
    CHECK(csv.find("10,1,7") != std::string::npos);
    CHECK(csv.find("# decay_fit exponent = 1") != std::string::npos);

    const std::string json = render_ensemble(stats, mf, ResultsFormat::Json);
    CHECK(json.find("\"decay_fit\"") != std::string::npos);
}

TEST_CASE("render_analysis lays out vectors and matrices in long form") {
    std::vector<AnalysisRecord> records{
        {"x_prime", 1, -1, 60.0},
        {"V", 2, 3, 0.549},
        {"rho", -1, -1, 0.958},
    };
    Manifest mf;
    const std::string csv = render_analysis(records, mf, ResultsFormat::Csv);
    CHECK(csv.find("name,row,col,value") != std::string::npos);
    CHECK(csv.find("x_prime,1,,60") != std::string::npos);
    CHECK(csv.find("V,2,3,0.54") != std::string::npos);
    CHECK(csv.find("rho,,,0.95") != std::string::npos);

    const std::string json = render_analysis(records, mf, ResultsFormat::Json);
    CHECK(json.find("[\"rho\", null, null, 0.95") != std::string::npos);
}
