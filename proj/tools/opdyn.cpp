// opdyn: analyze, map and simulate opinion-dynamics models from the command
// line. Subcommands: check | limit | map | simulate | ensemble.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "opdyn/errors.hpp"
#include "opdyn/io.hpp"
#include "opdyn/linalg.hpp"
#include "opdyn/model.hpp"
#include "opdyn/sim.hpp"
#include "opdyn/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace opdyn;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitParseIo = 2;

struct CommonArgs {
    std::string model_path;
    std::string out;
    std::string format = "csv";
    bool renormalize = false;
};

ResultsFormat parse_format(const std::string& f) {
    if (f == "csv") return ResultsFormat::Csv;
    if (f == "json") return ResultsFormat::Json;
    fail(errc::validation_error, "--format must be csv or json");
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

fs::path resolve_out(const CommonArgs& args, const std::string& suffix) {
    if (!args.out.empty()) return args.out;
    const char* dir = std::getenv("OPDYN_OUT_DIR");
    const fs::path base = (dir && *dir) ? fs::path(dir) : fs::path(".");
    const std::string stem = fs::path(args.model_path).stem().string();
    const std::string ext = args.format == "json" ? ".json" : ".csv";
    return base / (stem + "_" + suffix + ext);
}

ModelDocument load_with_warnings(const CommonArgs& args) {
    LoadOptions opts;
    opts.renormalize = args.renormalize;
    LoadReport report;
    ModelDocument doc = load_model(args.model_path, opts, &report);
    if (!report.added_self_loops.empty()) {
        std::string nodes;
        for (int i : report.added_self_loops) nodes += (nodes.empty() ? "" : ", ") + std::to_string(i + 1);
        std::fprintf(stderr, "warning: added missing self-loops for agents %s\n", nodes.c_str());
    }
    if (report.renormalized)
        std::fprintf(stderr, "renormalized rows; max correction %.3g\n", report.max_row_correction);
    return doc;
}

Manifest base_manifest(const CommonArgs& args, const ModelDocument& doc, const char* command) {
    Manifest m;
    m.add("tool", std::string("opdyn ") + kVersion);
    m.add("command", std::string(command));
    m.add("model", args.model_path);
    m.add("model_hash", hex64(model_hash(doc)));
    m.add("kind", std::string(doc.kind()));
    m.add("n", doc.graph().node_count());
    m.add("edges", doc.graph().edge_count());
    m.add("renormalize", std::string(args.renormalize ? "true" : "false"));
    return m;
}

std::string join_u64(const std::vector<std::uint64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

void print_vector(const char* label, const std::vector<double>& v) {
    std::printf("%s = [", label);
    for (std::size_t i = 0; i < v.size(); ++i) std::printf("%s%.3f", i ? ", " : "", v[i]);
    std::printf("]\n");
}

int cmd_check(const CommonArgs& args) {
    const ModelDocument doc = load_with_warnings(args);
    std::printf("model: %s (n = %d, |E| = %d)\n", doc.kind(), doc.graph().node_count(),
                doc.graph().edge_count());

    bool ok = true;
    if (doc.is_fj()) {
        const FJModel& m = doc.fj();
        const StochasticityClass wc = classify_stochasticity(m.influence());
        std::printf("W: %s\n", to_string(wc.kind));
        const bool assumption = validate_fj_assumption(m);
        ok = assumption;
        std::printf("path to a positively self-weighted agent from everywhere: %s\n",
                    assumption ? "yes" : "NO");
        Matrix lam_w(static_cast<std::size_t>(m.agent_count()), static_cast<std::size_t>(m.agent_count()));
        for (std::size_t i = 0; i < lam_w.rows(); ++i)
            for (std::size_t j = 0; j < lam_w.cols(); ++j)
                lam_w(i, j) = m.susceptibility()[i] * m.influence()(i, j);
        std::printf("rho(Lambda W) = %.6f\n", spectral_radius(lam_w));
        const StochasticityClass lc = classify_stochasticity(lam_w);
        if (lc.kind != StochasticityKind::NotSubstochastic)
            std::printf("Lambda W Schur stable (reachability): %s\n",
                        substochastic_schur_stable(lam_w) ? "yes" : "no");
    } else {
        const GossipModel& m = doc.gossip();
        const StochasticityClass gc = classify_stochasticity(m.mixing());
        std::printf("Gamma: %s\n", to_string(gc.kind));
        const bool assumption = validate_gossip_assumption(m);
        ok = assumption;
        std::printf("path to an agent with openness < 1 from everywhere: %s\n",
                    assumption ? "yes" : "NO");
        const ExpectedDynamics ed = expected_dynamics(m);
        std::printf("rho(Abar) = %.6f\n", spectral_radius(ed.abar));
        const StochasticityClass ac = classify_stochasticity(ed.abar);
        std::printf("Abar: %s\n", to_string(ac.kind));
        if (ac.kind != StochasticityKind::NotSubstochastic)
            std::printf("Abar Schur stable (reachability): %s\n",
                        substochastic_schur_stable(ed.abar) ? "yes" : "no");
    }
    std::printf("assumptions: %s\n", ok ? "hold" : "violated");
    return ok ? kExitOk : kExitValidation;
}

int cmd_limit(const CommonArgs& args) {
    const ModelDocument doc = load_with_warnings(args);
    Manifest manifest = base_manifest(args, doc, "limit");
    std::vector<AnalysisRecord> records;

    if (doc.is_fj()) {
        const FJModel& m = doc.fj();
        const FJLimit lim = fj_limit(m);
        records.push_back({"assumption_fj", -1, -1, 1.0});
        for (std::size_t i = 0; i < lim.x_limit.size(); ++i)
            records.push_back({"x_prime", static_cast<int>(i) + 1, -1, lim.x_limit[i]});
        for (std::size_t i = 0; i < lim.total_effects.rows(); ++i)
            for (std::size_t j = 0; j < lim.total_effects.cols(); ++j)
                records.push_back({"V", static_cast<int>(i) + 1, static_cast<int>(j) + 1,
                                   lim.total_effects(i, j)});
        print_vector("x'", lim.x_limit);
    } else {
        const GossipModel& m = doc.gossip();
        const ExpectedDynamics ed = expected_dynamics(m);
        if (!ed.x_star)
            fail(errc::assumption_violated,
                 "the expected dynamics has no fixed point: no path to an agent with openness < 1");
        records.push_back({"assumption_gossip", -1, -1, 1.0});
        for (std::size_t i = 0; i < ed.x_star->size(); ++i)
            records.push_back({"x_star", static_cast<int>(i) + 1, -1, (*ed.x_star)[i]});
        for (std::size_t i = 0; i < ed.abar.rows(); ++i)
            for (std::size_t j = 0; j < ed.abar.cols(); ++j)
                records.push_back({"Abar", static_cast<int>(i) + 1, static_cast<int>(j) + 1,
                                   ed.abar(i, j)});
        records.push_back({"rho", -1, -1, *ed.rho});
        print_vector("x*", *ed.x_star);
        std::printf("rho(Abar) = %.3f\n", *ed.rho);
    }

    const fs::path out = resolve_out(args, "limit");
    atomic_write(out, render_analysis(records, manifest, parse_format(args.format)));
    std::printf("wrote %s\n", out.string().c_str());
    return kExitOk;
}

int cmd_map(const CommonArgs& args) {
    const ModelDocument doc = load_with_warnings(args);
    if (!doc.is_fj()) fail(errc::validation_error, "map expects an fj model");
    const FJModel& m = doc.fj();
    const GossipModel mapped = fj_to_gossip(m);

    // Residuals of the two identities the mapping guarantees.
    const auto n = static_cast<std::size_t>(m.agent_count());
    const DegreeMatrix deg = degree_matrix(m.graph());
    double res1 = 0.0, res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(deg.diagonal[i]);
        const double hi = mapped.openness()[i];
        res1 = std::max(res1, std::abs(d * (1.0 - hi) - (1.0 - m.susceptibility()[i])));
        for (std::size_t j = 0; j < n; ++j) {
            const double id = (i == j) ? 1.0 : 0.0;
            const double lhs = d * (1.0 - hi) * id + hi * (id - mapped.mixing()(i, j));
            const double rhs = id - m.susceptibility()[i] * m.influence()(i, j);
            res2 = std::max(res2, std::abs(lhs - rhs));
        }
    }
    std::printf("identity D(I-H) = I-Lambda: max residual %.3g\n", res1);
    std::printf("identity D(I-H)+H(I-Gamma) = I-Lambda W: max residual %.3g\n", res2);
    print_vector("H", mapped.openness());

    ModelDocument out_doc;
    out_doc.model = mapped;
    if (doc.name) out_doc.name = *doc.name + " (mapped)";
    out_doc.description = doc.description;

    fs::path out;
    if (!args.out.empty()) {
        out = args.out;
    } else {
        const char* dir = std::getenv("OPDYN_OUT_DIR");
        const fs::path base = (dir && *dir) ? fs::path(dir) : fs::path(".");
        out = base / (fs::path(args.model_path).stem().string() + "_gossip.model");
    }
    save_model(out, out_doc);
    std::printf("wrote %s\n", out.string().c_str());
    return kExitOk;
}

int cmd_simulate(const CommonArgs& args, std::uint64_t steps, std::uint64_t seed,
                 const std::vector<std::uint64_t>& checkpoints) {
    const ModelDocument doc = load_with_warnings(args);
    Manifest manifest = base_manifest(args, doc, "simulate");
    manifest.add("steps", steps);

    Trajectory t;
    if (doc.is_fj()) {
        t = run_synchronous(doc.fj(), steps, checkpoints);
    } else {
        t = run_trajectory(doc.gossip(), steps, RngStream(seed), checkpoints);
        manifest.add("seed", seed);
        manifest.add("stream", t.stream_id);
    }
    manifest.add("checkpoints", join_u64(t.checkpoints));

    const fs::path out = resolve_out(args, "trajectory");
    atomic_write(out, render_trajectory(t, doc.graph().node_count(), manifest,
                                        parse_format(args.format)));
    print_vector("final x", t.samples.back().state);
    print_vector("final xbar", t.samples.back().time_avg);
    std::printf("wrote %s\n", out.string().c_str());
    return kExitOk;
}

int cmd_ensemble(const CommonArgs& args, std::uint64_t steps, int replicates, std::uint64_t seed,
                 const std::vector<std::uint64_t>& checkpoints, int threads) {
    const ModelDocument doc = load_with_warnings(args);
    if (doc.is_fj())
        fail(errc::validation_error, "ensemble expects a gossip model (fj dynamics is deterministic)");

    const EnsembleStats stats =
        run_ensemble(doc.gossip(), steps, replicates, seed, checkpoints, threads);

    Manifest manifest = base_manifest(args, doc, "ensemble");
    manifest.add("steps", steps);
    manifest.add("replicates", replicates);
    manifest.add("seed", seed);
    manifest.add("checkpoints", join_u64(stats.checkpoints));

    for (std::size_t c = 0; c < stats.checkpoints.size(); ++c)
        std::printf("mse(%llu) = %.6g\n", static_cast<unsigned long long>(stats.checkpoints[c]),
                    stats.mse[c]);
    if (stats.decay_fit)
        std::printf("decay fit: mse ~ C / k^p with p = %.3f, log10 C = %.3f\n",
                    stats.decay_fit->exponent, stats.decay_fit->log10_constant);
    else
        std::printf("decay fit: unavailable\n");

    const fs::path out = resolve_out(args, "ensemble");
    atomic_write(out, render_ensemble(stats, manifest, parse_format(args.format)));
    std::printf("wrote %s\n", out.string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"opdyn: gossip opinion dynamics with stubborn agents"};
    app.require_subcommand(1);

    CommonArgs common;
    std::uint64_t steps = 10'000;
    std::uint64_t seed = 1;
    int replicates = 100;
    int threads = 0;
    std::vector<std::uint64_t> checkpoints;

    const auto add_common = [&](CLI::App* sub, bool with_format = true) {
        sub->add_option("model", common.model_path, "model file")->required();
        sub->add_flag("--renormalize", common.renormalize,
                      "renormalize W/Gamma rows before validation (reported, never silent)");
        if (with_format) {
            sub->add_option("--out", common.out, "output file (default derived from the model name, in $OPDYN_OUT_DIR)");
            sub->add_option("--format", common.format, "csv or json")
                ->check(CLI::IsMember({"csv", "json"}));
        }
    };

    CLI::App* check = app.add_subcommand("check", "validate assumptions and stability");
    add_common(check, false);

    CLI::App* limit = app.add_subcommand("limit", "limit opinions and effect matrices");
    add_common(limit);

    CLI::App* map = app.add_subcommand("map", "map an fj model onto an equivalent gossip model");
    map->add_option("model", common.model_path, "fj model file")->required();
    map->add_flag("--renormalize", common.renormalize, "renormalize W rows before validation");
    map->add_option("--out", common.out, "output model file");

    CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory and its time averages");
    add_common(simulate);
    simulate->add_option("--steps", steps, "number of steps");
    simulate->add_option("--seed", seed, "rng seed (gossip models)");
    simulate->add_option("--checkpoints", checkpoints, "checkpoint steps (default: powers of ten)")
        ->delimiter(',');

    CLI::App* ensemble = app.add_subcommand("ensemble", "replicate trajectories and report mse decay");
    add_common(ensemble);
    ensemble->add_option("--steps", steps, "steps per replicate");
    ensemble->add_option("--replicates", replicates, "number of replicates")->check(CLI::PositiveNumber);
    ensemble->add_option("--seed", seed, "base seed; replicate r uses stream r");
    ensemble->add_option("--checkpoints", checkpoints, "checkpoint steps (default: powers of ten)")
        ->delimiter(',');
    ensemble->add_option("--threads", threads, "worker threads (0 = hardware default)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (check->parsed()) return cmd_check(common);
        if (limit->parsed()) return cmd_limit(common);
        if (map->parsed()) return cmd_map(common);
        if (simulate->parsed()) return cmd_simulate(common, steps, seed, checkpoints);
        if (ensemble->parsed()) return cmd_ensemble(common, steps, replicates, seed, checkpoints, threads);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return (e.code() == errc::parse_error || e.code() == errc::io_error) ? kExitParseIo
                                                                             : kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    }
    return kExitValidation;
}
