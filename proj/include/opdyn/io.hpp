#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "opdyn/model.hpp"
#include "opdyn/sim.hpp"

namespace opdyn {

/// A loaded model file: either kind of model plus its file-level metadata.
struct ModelDocument {
    int schema_version = 1;
    std::optional<std::string> name;
    std::optional<std::string> description;
    std::variant<FJModel, GossipModel> model;

    bool is_fj() const noexcept { return std::holds_alternative<FJModel>(model); }
    const FJModel& fj() const { return std::get<FJModel>(model); }
    const GossipModel& gossip() const { return std::get<GossipModel>(model); }
    const char* kind() const noexcept { return is_fj() ? "fj" : "gossip"; }
    const SocialGraph& graph() const;
    const std::vector<double>& prejudice() const;

    friend bool operator==(const ModelDocument& a, const ModelDocument& b);
};

struct LoadOptions {
    /// Divide each W / Gamma row by its sum before validation. Meant for
    /// published matrices rounded to a few decimals; the applied correction
    /// is reported, never silent.
    bool renormalize = false;
};

struct LoadReport {
    std::vector<int> added_self_loops;  // 0-based node ids
    bool renormalized = false;
    double max_row_correction = 0.0;  // largest |row sum - 1| removed by renormalization
};

/// Parses the JSON model format (see README). Throws ParseError with a byte
/// position for malformed JSON and ValidationError naming the offending
/// field or invariant otherwise.
ModelDocument parse_model(const std::string& text, const LoadOptions& options = {},
                          LoadReport* report = nullptr);
ModelDocument load_model(const std::filesystem::path& path, const LoadOptions& options = {},
                         LoadReport* report = nullptr);

/// Canonical serialization; parse_model(serialize_model(d)) == d exactly.
std::string serialize_model(const ModelDocument& doc);
void save_model(const std::filesystem::path& path, const ModelDocument& doc);

/// FNV-1a 64-bit hash of the canonical serialization, quoted in manifests.
std::uint64_t model_hash(const ModelDocument& doc);

/// Ordered key-value block embedded in every results file; holds everything
/// needed to reproduce the run (command, parameters, seed, model hash).
struct Manifest {
    std::vector<std::pair<std::string, std::string>> entries;
    void add(std::string key, std::string value);
    void add(std::string key, std::uint64_t value);
    void add(std::string key, int value);
};

enum class ResultsFormat { Csv, Json };

/// Shortest text keeping full double precision ("%.17g").
std::string format_g17(double v);

std::string render_trajectory(const Trajectory& t, int agents, const Manifest& manifest,
                              ResultsFormat format);
std::string render_ensemble(const EnsembleStats& stats, const Manifest& manifest,
                            ResultsFormat format);

/// Long-format analysis record; row/col are 1-based, -1 when not applicable.
struct AnalysisRecord {
    std::string name;
    int row = -1;
    int col = -1;
    double value = 0.0;
};

std::string render_analysis(const std::vector<AnalysisRecord>& records, const Manifest& manifest,
                            ResultsFormat format);

/// Write-temp-then-rename; creates parent directories as needed.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace opdyn
