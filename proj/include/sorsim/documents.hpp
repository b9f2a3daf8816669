#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "sorsim/analysis.hpp"
#include "sorsim/graph.hpp"
#include "sorsim/routing.hpp"

namespace sorsim {

// Raised for malformed documents and invariant violations on load; the
// message names the first violation found.
class DocumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kGraphFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;
inline constexpr int kTraceFormatVersion = 1;

// Canonical graph document: nodes ascending, edges as (u, v) pairs with
// u < v in lexicographic order, edge_kinds parallel to edges. Equal graphs
// serialize to identical bytes.
std::string serialize_graph(const OverlayGraph& graph);
OverlayGraph deserialize_graph(const std::string& text);

void save_graph(const OverlayGraph& graph, const std::string& path);
OverlayGraph load_graph(const std::string& path);

// Trace document; paths longer than max_path_entries are truncated with an
// explicit marker (hop counts stay exact).
std::string serialize_trace(const RouteQuery& query, const RouteTrace& trace,
                            std::size_t max_path_entries = 1u << 20);

std::string serialize_experiment_config(const ExperimentConfig& config);
ExperimentConfig deserialize_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

std::string serialize_estimator_report(const EstimatorReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sorsim
