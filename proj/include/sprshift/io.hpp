#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sprshift/census.hpp"
#include "sprshift/graph.hpp"
#include "sprshift/measure.hpp"
#include "sprshift/pliss.hpp"
#include "sprshift/spr_gate.hpp"
#include "sprshift/stochastics.hpp"

namespace sprshift {

using json = nlohmann::json;

// Graph description file: {vertices, edges, bouquet?, truncation?, labels?}.
// `edges` is one sorted successor array per vertex. A file may also be a
// pure bouquet spec, materialized on demand.
struct GraphSource {
    std::optional<DirectedGraph> graph;
    std::optional<BouquetSpec> bouquet;
    std::optional<int> truncation;
};

GraphSource parse_graph_source(const json& j);
GraphSource load_graph_source(const std::filesystem::path& path);

// Materialized graph (explicit edges win over the bouquet rule).
DirectedGraph realize_graph(const GraphSource& source);

// Canonical byte-stable serialization: sorted keys, sorted adjacency.
json serialize_graph(const DirectedGraph& g);

CylinderPotential parse_potential(const json& j);
CylinderPotential load_potential(const std::filesystem::path& path);
json serialize_potential(const CylinderPotential& p);

std::vector<CocycleOrbit> parse_orbits(const json& j);
std::vector<CocycleOrbit> load_orbits(const std::filesystem::path& path);

json serialize_verdict(const SprVerdict& v);
json serialize_measure(const MarkovMeasure& m);
json serialize_census(const LoopCensus& c);
json serialize_report(const StatReport& r);

// Write-to-temp then atomic rename; no partial files on failure.
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

// CSV with '.' decimals regardless of locale, 17 significant digits.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

std::string format_double(double x);

// FNV-1a of the canonical serialization, 16 hex digits.
std::string graph_hash(const DirectedGraph& g);

} // namespace sprshift
