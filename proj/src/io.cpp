#include "opdyn/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "opdyn/errors.hpp"

namespace opdyn {

using nlohmann::json;

const SocialGraph& ModelDocument::graph() const {
    return is_fj() ? fj().graph() : gossip().graph();
}

const std::vector<double>& ModelDocument::prejudice() const {
    return is_fj() ? fj().prejudice() : gossip().prejudice();
}

bool operator==(const ModelDocument& a, const ModelDocument& b) {
    if (a.schema_version != b.schema_version || a.name != b.name ||
        a.description != b.description || a.is_fj() != b.is_fj())
        return false;
    return a.is_fj() ? a.fj() == b.fj() : a.gossip() == b.gossip();
}

namespace {

constexpr int kSchemaVersion = 1;

const json& require_field(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) fail(errc::validation_error, std::string("missing field \"") + key + "\"");
    return *it;
}

int read_int(const json& j, const char* key) {
    const json& v = require_field(j, key);
    if (!v.is_number_integer())
        fail(errc::validation_error, std::string("field \"") + key + "\" must be an integer");
    return v.get<int>();
}

std::string read_string(const json& j, const char* key) {
    const json& v = require_field(j, key);
    if (!v.is_string())
        fail(errc::validation_error, std::string("field \"") + key + "\" must be a string");
    return v.get<std::string>();
}

std::vector<double> read_vector(const json& v, const char* key, std::size_t expected) {
    if (!v.is_array() || v.size() != expected)
        fail(errc::validation_error, std::string("field \"") + key + "\" must be an array of " +
                                         std::to_string(expected) + " numbers");
    std::vector<double> out;
    out.reserve(expected);
    for (const json& x : v) {
        if (!x.is_number())
            fail(errc::validation_error, std::string("field \"") + key + "\" contains a non-number");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<Edge> read_edges(const json& j, int n) {
    const json& v = require_field(j, "edges");
    if (!v.is_array()) fail(errc::validation_error, "field \"edges\" must be an array of [i, j] pairs");
    std::vector<Edge> edges;
    edges.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const json& e = v[k];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
            fail(errc::validation_error,
                 "edges[" + std::to_string(k + 1) + "] must be a pair of integers");
        const int from = e[0].get<int>();
        const int to = e[1].get<int>();
        if (from < 1 || from > n || to < 1 || to > n)
            fail(errc::endpoint_out_of_range, "edges[" + std::to_string(k + 1) + "] = (" +
                                                  std::to_string(from) + ", " + std::to_string(to) +
                                                  ") is outside 1.." + std::to_string(n));
        edges.push_back({from - 1, to - 1});
    }
    return edges;
}

/// Dense form: array of n rows of n numbers. Sparse form: an object
/// {"triplets": [[i, j, value], ...]} with 1-based indices; omitted entries
/// are zero.
Matrix read_matrix(const json& j, const char* key, std::size_t n) {
    const json& v = require_field(j, key);
    if (v.is_array()) {
        if (v.size() != n)
            fail(errc::validation_error,
                 std::string("field \"") + key + "\" must have " + std::to_string(n) + " rows");
        std::vector<double> entries;
        entries.reserve(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::string row_key = std::string(key) + " row " + std::to_string(i + 1);
            const std::vector<double> row = read_vector(v[i], row_key.c_str(), n);
            entries.insert(entries.end(), row.begin(), row.end());
        }
        return Matrix::from_rows(n, n, std::move(entries));
    }
    if (v.is_object() && v.contains("triplets")) {
        const json& ts = v["triplets"];
        if (!ts.is_array())
            fail(errc::validation_error, std::string(key) + ".triplets must be an array");
        Matrix m(n, n);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const json& t = ts[k];
            if (!t.is_array() || t.size() != 3 || !t[0].is_number_integer() ||
                !t[1].is_number_integer() || !t[2].is_number())
                fail(errc::validation_error, std::string(key) + ".triplets[" + std::to_string(k + 1) +
                                                 "] must be [row, col, value]");
            const int i = t[0].get<int>();
            const int jj = t[1].get<int>();
            if (i < 1 || i > static_cast<int>(n) || jj < 1 || jj > static_cast<int>(n))
                fail(errc::validation_error, std::string(key) + ".triplets[" + std::to_string(k + 1) +
                                                 "] indexes outside 1.." + std::to_string(n));
            m(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(jj - 1)) = t[2].get<double>();
        }
        if (!m.all_finite()) fail(errc::validation_error, std::string(key) + " contains a non-finite entry");
        return m;
    }
    fail(errc::validation_error,
         std::string("field \"") + key + "\" must be dense rows or {\"triplets\": ...}");
}

double renormalize_rows(Matrix& m) {
    double max_correction = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double s = m.row_sum(i);
        if (!(s > 0.0))
            fail(errc::validation_error,
                 "row " + std::to_string(i + 1) + " sums to " + std::to_string(s) +
                     " and cannot be renormalized");
        max_correction = std::max(max_correction, std::abs(s - 1.0));
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) /= s;
    }
    return max_correction;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json edges_to_json(const SocialGraph& g) {
    json edges = json::array();
    for (const Edge& e : g.edge_list()) edges.push_back(json::array({e.from + 1, e.to + 1}));
    return edges;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

void append_manifest_csv(std::string& out, const Manifest& mf) {
    for (const auto& [k, v] : mf.entries) out += "# " + k + " = " + v + "\n";
}

void append_manifest_json(std::string& out, const Manifest& mf) {
    out += "  \"manifest\": {";
    bool first = true;
    for (const auto& [k, v] : mf.entries) {
        if (!first) out += ", ";
        first = false;
        out += "\"" + json_escape(k) + "\": \"" + json_escape(v) + "\"";
    }
    out += "}";
}

}  // namespace

ModelDocument parse_model(const std::string& text, const LoadOptions& options, LoadReport* report) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(errc::parse_error, e.what());  // carries the byte position
    }
    if (!j.is_object()) fail(errc::validation_error, "model file must be a JSON object");

    ModelDocument doc;
    doc.schema_version = read_int(j, "schema_version");
    if (doc.schema_version != kSchemaVersion)
        fail(errc::validation_error,
             "unsupported schema_version " + std::to_string(doc.schema_version));
    const std::string kind = read_string(j, "kind");
    if (kind != "fj" && kind != "gossip")
        fail(errc::validation_error, "field \"kind\" must be \"fj\" or \"gossip\", got \"" + kind + "\"");
    if (j.contains("name")) doc.name = read_string(j, "name");
    if (j.contains("description")) doc.description = read_string(j, "description");

    const int n = read_int(j, "n");
    if (n <= 1) fail(errc::too_few_nodes, "field \"n\" must be at least 2, got " + std::to_string(n));
    const auto nn = static_cast<std::size_t>(n);

    std::vector<Edge> file_edges = read_edges(j, n);
    SocialGraph graph = SocialGraph::build(n, file_edges);
    if (report) report->added_self_loops = graph.auto_added_self_loops();

    const std::vector<double> u = read_vector(require_field(j, "u"), "u", nn);

    if (kind == "fj") {
        Matrix w = read_matrix(j, "W", nn);
        if (options.renormalize) {
            const double corr = renormalize_rows(w);
            if (report) {
                report->renormalized = true;
                report->max_row_correction = corr;
            }
        }
        doc.model = FJModel::create(std::move(graph), std::move(w), u);
        return doc;
    }

    const std::vector<double> h = read_vector(require_field(j, "H"), "H", nn);
    Matrix gamma = read_matrix(j, "Gamma", nn);
    if (options.renormalize) {
        const double corr = renormalize_rows(gamma);
        if (report) {
            report->renormalized = true;
            report->max_row_correction = corr;
        }
    }

    std::optional<std::vector<double>> weights;
    if (j.contains("edge_weights")) {
        const json& wj = j["edge_weights"];
        std::vector<double> file_weights = read_vector(wj, "edge_weights", file_edges.size());
        if (!graph.auto_added_self_loops().empty())
            fail(errc::validation_error,
                 "edge_weights requires every self-loop to be listed explicitly in \"edges\"");
        // File weights follow the file's edge order; store them in canonical
        // edge order.
        std::vector<double> canonical(static_cast<std::size_t>(graph.edge_count()), -1.0);
        for (std::size_t k = 0; k < file_edges.size(); ++k) {
            const int idx = graph.edge_index(file_edges[k]);
            if (idx < 0 || canonical[static_cast<std::size_t>(idx)] >= 0.0)
                fail(errc::validation_error,
                     "edge_weights requires a duplicate-free \"edges\" list");
            canonical[static_cast<std::size_t>(idx)] = file_weights[k];
        }
        weights = std::move(canonical);
    }

    doc.model = GossipModel::create(std::move(graph), h, std::move(gamma), u, std::move(weights));
    return doc;
}

ModelDocument load_model(const std::filesystem::path& path, const LoadOptions& options,
                         LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io_error, "cannot open model file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_model(buffer.str(), options, report);
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

std::string serialize_model(const ModelDocument& doc) {
    json j;
    j["schema_version"] = doc.schema_version;
    j["kind"] = doc.kind();
    if (doc.name) j["name"] = *doc.name;
    if (doc.description) j["description"] = *doc.description;
    j["n"] = doc.graph().node_count();
    j["edges"] = edges_to_json(doc.graph());
    j["u"] = doc.prejudice();
    if (doc.is_fj()) {
        j["W"] = matrix_to_json(doc.fj().influence());
    } else {
        j["H"] = doc.gossip().openness();
        j["Gamma"] = matrix_to_json(doc.gossip().mixing());
        if (doc.gossip().edge_weights()) j["edge_weights"] = *doc.gossip().edge_weights();
    }
    return j.dump(2) + "\n";
}

void save_model(const std::filesystem::path& path, const ModelDocument& doc) {
    atomic_write(path, serialize_model(doc));
}

std::uint64_t model_hash(const ModelDocument& doc) {
    const std::string text = serialize_model(doc);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void Manifest::add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
}

void Manifest::add(std::string key, std::uint64_t value) {
    entries.emplace_back(std::move(key), std::to_string(value));
}

void Manifest::add(std::string key, int value) {
    entries.emplace_back(std::move(key), std::to_string(value));
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_trajectory(const Trajectory& t, int agents, const Manifest& manifest,
                              ResultsFormat format) {
    std::string out;
    if (format == ResultsFormat::Csv) {
        append_manifest_csv(out, manifest);
        out += "k";
        for (int i = 1; i <= agents; ++i) out += ",x_" + std::to_string(i);
        for (int i = 1; i <= agents; ++i) out += ",xbar_" + std::to_string(i);
        out += "\n";
        for (const TrajectorySample& s : t.samples) {
            out += std::to_string(s.step);
            for (double v : s.state) out += "," + format_g17(v);
            for (double v : s.time_avg) out += "," + format_g17(v);
            out += "\n";
        }
        return out;
    }
    out += "{\n";
    append_manifest_json(out, manifest);
    out += ",\n  \"columns\": [\"k\"";
    for (int i = 1; i <= agents; ++i) out += ", \"x_" + std::to_string(i) + "\"";
    for (int i = 1; i <= agents; ++i) out += ", \"xbar_" + std::to_string(i) + "\"";
    out += "],\n  \"rows\": [\n";
    for (std::size_t r = 0; r < t.samples.size(); ++r) {
        const TrajectorySample& s = t.samples[r];
        out += "    [" + std::to_string(s.step);
        for (double v : s.state) out += ", " + format_g17(v);
        for (double v : s.time_avg) out += ", " + format_g17(v);
        out += r + 1 < t.samples.size() ? "],\n" : "]\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string render_ensemble(const EnsembleStats& stats, const Manifest& manifest,
                            ResultsFormat format) {
    std::string out;
    if (format == ResultsFormat::Csv) {
        append_manifest_csv(out, manifest);
        if (stats.decay_fit)
            out += "# decay_fit exponent = " + format_g17(stats.decay_fit->exponent) +
                   ", log10_constant = " + format_g17(stats.decay_fit->log10_constant) + "\n";
        else
            out += "# decay_fit = unavailable\n";
        out += "checkpoint,mse,replicates\n";
        for (std::size_t c = 0; c < stats.checkpoints.size(); ++c)
            out += std::to_string(stats.checkpoints[c]) + "," + format_g17(stats.mse[c]) + "," +
                   std::to_string(stats.replicates) + "\n";
        return out;
    }
    out += "{\n";
    append_manifest_json(out, manifest);
    out += ",\n";
    if (stats.decay_fit)
        out += "  \"decay_fit\": {\"exponent\": " + format_g17(stats.decay_fit->exponent) +
               ", \"log10_constant\": " + format_g17(stats.decay_fit->log10_constant) + "},\n";
    else
        out += "  \"decay_fit\": null,\n";
    out += "  \"columns\": [\"checkpoint\", \"mse\", \"replicates\"],\n  \"rows\": [\n";
    for (std::size_t c = 0; c < stats.checkpoints.size(); ++c) {
        out += "    [" + std::to_string(stats.checkpoints[c]) + ", " + format_g17(stats.mse[c]) +
               ", " + std::to_string(stats.replicates) + "]";
        out += c + 1 < stats.checkpoints.size() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

std::string render_analysis(const std::vector<AnalysisRecord>& records, const Manifest& manifest,
                            ResultsFormat format) {
    std::string out;
    if (format == ResultsFormat::Csv) {
        append_manifest_csv(out, manifest);
        out += "name,row,col,value\n";
        for (const AnalysisRecord& r : records) {
            out += csv_escape(r.name) + ",";
            if (r.row > 0) out += std::to_string(r.row);
            out += ",";
            if (r.col > 0) out += std::to_string(r.col);
            out += "," + format_g17(r.value) + "\n";
        }
        return out;
    }
    out += "{\n";
    append_manifest_json(out, manifest);
    out += ",\n  \"columns\": [\"name\", \"row\", \"col\", \"value\"],\n  \"rows\": [\n";
    for (std::size_t k = 0; k < records.size(); ++k) {
        const AnalysisRecord& r = records[k];
        out += "    [\"" + json_escape(r.name) + "\", ";
        out += r.row > 0 ? std::to_string(r.row) : "null";
        out += ", ";
        out += r.col > 0 ? std::to_string(r.col) : "null";
        out += ", " + format_g17(r.value) + "]";
        out += k + 1 < records.size() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path parent = path.parent_path();
    if (!parent.empty()) {
        fs::create_directories(parent, ec);
        if (ec) fail(errc::io_error, "cannot create directory " + parent.string() + ": " + ec.message());
    }
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(errc::io_error, "cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) fail(errc::io_error, "write to " + tmp.string() + " failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) fail(errc::io_error, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace opdyn
