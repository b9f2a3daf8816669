#include "sorsim/documents.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace sorsim {

using nlohmann::json;

namespace {

json params_to_json(const GraphParams& p) {
    return json{{"n", p.n},         {"c", p.c},
                {"alpha", p.alpha}, {"mu", p.mu},
                {"seed", p.seed},   {"generator", to_string(p.generator)}};
}

template <typename T>
T require(const json& j, const std::string& path, const char* key) {
    if (!j.contains(key))
        throw DocumentError("document: missing field " + path + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw DocumentError("document: field " + path + key + " has the wrong type");
    }
}

GraphParams params_from_json(const json& j) {
    GraphParams p;
    p.n = require<std::uint32_t>(j, "params.", "n");
    p.c = require<std::uint32_t>(j, "params.", "c");
    p.alpha = require<double>(j, "params.", "alpha");
    p.mu = require<std::uint32_t>(j, "params.", "mu");
    p.seed = require<std::uint64_t>(j, "params.", "seed");
    const auto gen = parse_generator(require<std::string>(j, "params.", "generator"));
    if (!gen) throw DocumentError("document: params.generator must be 'exact' or 'poisson'");
    p.generator = *gen;
    return p;
}

}  // namespace

std::string serialize_graph(const OverlayGraph& graph) {
    json doc;
    doc["format_version"] = kGraphFormatVersion;
    doc["params"] = params_to_json(graph.params());
    doc["gamma"] = graph.gamma();
    doc["labels"] = graph.labels();
    json edges = json::array();
    for (const auto& [u, v] : graph.edges()) edges.push_back(json::array({u, v}));
    doc["edges"] = std::move(edges);
    json kinds = json::array();
    for (auto k : graph.edge_kinds())
        kinds.push_back(k == EdgeKind::short_range ? "short_range" : "long_range");
    doc["edge_kinds"] = std::move(kinds);
    return doc.dump(2) + "\n";
}

OverlayGraph deserialize_graph(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DocumentError(std::string("graph document: invalid JSON: ") + e.what());
    }
    const auto version = require<int>(doc, "", "format_version");
    if (version != kGraphFormatVersion)
        throw DocumentError("graph document: unknown format_version " + std::to_string(version));
    if (!doc.contains("params") || !doc.at("params").is_object())
        throw DocumentError("graph document: missing field params");
    const GraphParams params = params_from_json(doc.at("params"));
    const auto gamma = require<double>(doc, "", "gamma");
    auto labels = require<std::vector<std::uint32_t>>(doc, "", "labels");

    if (!doc.contains("edges") || !doc.at("edges").is_array())
        throw DocumentError("graph document: missing field edges");
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
            !e[1].is_number_unsigned())
            throw DocumentError("graph document: edges entries must be [u, v] pairs");
        edges.emplace_back(e[0].get<std::uint32_t>(), e[1].get<std::uint32_t>());
    }
    auto kind_names = require<std::vector<std::string>>(doc, "", "edge_kinds");
    std::vector<EdgeKind> kinds;
    for (const auto& name : kind_names) {
        if (name == "short_range")
            kinds.push_back(EdgeKind::short_range);
        else if (name == "long_range")
            kinds.push_back(EdgeKind::long_range);
        else
            throw DocumentError("graph document: unknown edge kind '" + name + "'");
    }
    try {
        return OverlayGraph::from_parts(params, gamma, std::move(labels), std::move(edges),
                                        std::move(kinds), /*validate=*/true);
    } catch (const std::invalid_argument& e) {
        throw DocumentError(std::string("graph document: ") + e.what());
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::ios_base::failure("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure("cannot open for reading: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void save_graph(const OverlayGraph& graph, const std::string& path) {
    write_text_file(path, serialize_graph(graph));
}

OverlayGraph load_graph(const std::string& path) { return deserialize_graph(read_text_file(path)); }

std::string serialize_trace(const RouteQuery& query, const RouteTrace& trace,
                            std::size_t max_path_entries) {
    json doc;
    doc["format_version"] = kTraceFormatVersion;
    doc["query"] = {{"source", query.source},
                    {"target", query.target},
                    {"algorithm", to_string(query.algorithm)}};
    doc["outcome"] = to_string(trace.outcome);
    doc["forward_hops"] = trace.forward_hops;
    doc["backtrack_hops"] = trace.backtrack_hops;
    doc["marked_count"] = trace.marked_count;
    if (trace.path.size() > max_path_entries) {
        doc["path"] = std::vector<NodeId>(trace.path.begin(),
                                          trace.path.begin() + max_path_entries);
        doc["path_truncated"] = true;
        doc["path_total_length"] = trace.path.size();
    } else {
        doc["path"] = trace.path;
        doc["path_truncated"] = false;
    }
    if (trace.x_sequence.size() > max_path_entries) {
        doc["x_sequence"] = std::vector<std::uint32_t>(
            trace.x_sequence.begin(), trace.x_sequence.begin() + max_path_entries);
        doc["x_sequence_truncated"] = true;
        doc["x_sequence_total_length"] = trace.x_sequence.size();
    } else {
        doc["x_sequence"] = trace.x_sequence;
        doc["x_sequence_truncated"] = false;
    }
    return doc.dump(2) + "\n";
}

std::string serialize_experiment_config(const ExperimentConfig& config) {
    json doc;
    doc["format_version"] = kConfigFormatVersion;
    doc["n_values"] = config.n_values;
    doc["c_values"] = config.c_values;
    doc["alpha_values"] = config.alpha_values;
    if (config.mu_rule.kind == MuRule::Kind::explicit_value)
        doc["mu_rule"] = {{"kind", "explicit"}, {"value", config.mu_rule.value}};
    else
        doc["mu_rule"] = {{"kind", "log2_of_n"}};
    json algos = json::array();
    for (auto a : config.algorithms) algos.push_back(to_string(a));
    doc["algorithms"] = std::move(algos);
    doc["graphs_per_cell"] = config.graphs_per_cell;
    doc["pairs_per_graph"] = config.pairs_per_graph;
    doc["base_seed"] = config.base_seed;
    doc["generator"] = to_string(config.generator);
    return doc.dump(2) + "\n";
}

ExperimentConfig deserialize_experiment_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw DocumentError(std::string("experiment config: invalid JSON: ") + e.what());
    }
    const auto version = require<int>(doc, "", "format_version");
    if (version != kConfigFormatVersion)
        throw DocumentError("experiment config: unknown format_version " +
                            std::to_string(version));
    ExperimentConfig config;
    config.n_values = require<std::vector<std::uint32_t>>(doc, "", "n_values");
    config.c_values = require<std::vector<std::uint32_t>>(doc, "", "c_values");
    config.alpha_values = require<std::vector<double>>(doc, "", "alpha_values");
    if (doc.contains("mu_rule")) {
        const auto& rule = doc.at("mu_rule");
        const auto kind = require<std::string>(rule, "mu_rule.", "kind");
        if (kind == "explicit") {
            config.mu_rule.kind = MuRule::Kind::explicit_value;
            config.mu_rule.value = require<std::uint32_t>(rule, "mu_rule.", "value");
        } else if (kind == "log2_of_n") {
            config.mu_rule.kind = MuRule::Kind::log2_of_n;
        } else {
            throw DocumentError("experiment config: mu_rule.kind must be 'explicit' or "
                                "'log2_of_n'");
        }
    }
    const auto algo_names = require<std::vector<std::string>>(doc, "", "algorithms");
    for (std::size_t i = 0; i < algo_names.size(); ++i) {
        const auto algo = parse_algorithm(algo_names[i]);
        if (!algo)
            throw DocumentError("experiment config: algorithms[" + std::to_string(i) +
                                "] is not a known algorithm: '" + algo_names[i] + "'");
        config.algorithms.push_back(*algo);
    }
    config.graphs_per_cell = require<std::uint32_t>(doc, "", "graphs_per_cell");
    config.pairs_per_graph = require<std::uint32_t>(doc, "", "pairs_per_graph");
    config.base_seed = require<std::uint64_t>(doc, "", "base_seed");
    const auto gen = parse_generator(require<std::string>(doc, "", "generator"));
    if (!gen) throw DocumentError("experiment config: generator must be 'exact' or 'poisson'");
    config.generator = *gen;
    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw DocumentError(e.what());
    }
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return deserialize_experiment_config(read_text_file(path));
}

std::string serialize_estimator_report(const EstimatorReport& report) {
    json doc;
    doc["estimator"] = report.estimator;
    doc["point"] = report.point;
    doc["ci95"] = {report.ci_lo, report.ci_hi};
    doc["samples"] = report.samples;
    doc["defined"] = report.defined;
    if (!report.diagnostic.empty()) doc["diagnostic"] = report.diagnostic;
    if (report.analytic) doc["analytic"] = *report.analytic;
    json params = json::object();
    for (const auto& [key, value] : report.parameters) params[key] = value;
    doc["parameters"] = std::move(params);
    return doc.dump(2) + "\n";
}

}  // namespace sorsim
