#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sprshift/errors.hpp"

namespace sprshift {

using Vertex = int;

// Closed-form loop-count rules for bouquet families. Values of ell_n:
//   CeilPow2OverNsq: ell_n = ceil(2^n / n^2) for n >= M, else 0.
//   Ruette:          ell_n = 2^(n - sqrt(n)) when n is a perfect square, else 0.
// Both have first-return generating function radius exactly 1/2.
enum class BouquetFamily { Table, CeilPow2OverNsq, Ruette };

struct BouquetSpec {
    Vertex base = 0;
    BouquetFamily family = BouquetFamily::Table;
    int M = 1;                              // CeilPow2OverNsq threshold
    std::vector<std::pair<int, std::uint64_t>> table; // explicit n -> ell_n

    // ell_n for the configured rule; errors on n <= 0.
    std::uint64_t loops_of_length(int n) const;
};

// Finite directed graph on dense vertex ids 0..V-1, sorted adjacency,
// no parallel edges. Immutable after construction.
class DirectedGraph {
public:
    DirectedGraph() = default;
    // Edges as (from, to) pairs. Throws on duplicate edges or out-of-range ids.
    DirectedGraph(int vertex_count, std::vector<std::pair<Vertex, Vertex>> edges,
                  std::vector<std::string> labels = {});

    int vertex_count() const { return static_cast<int>(out_.size()); }
    std::size_t edge_count() const { return edge_count_; }
    const std::vector<Vertex>& successors(Vertex v) const { return out_[v]; }
    const std::vector<Vertex>& predecessors(Vertex v) const { return in_[v]; }
    bool has_edge(Vertex u, Vertex v) const;
    const std::vector<std::string>& labels() const { return labels_; }

    bool proper() const { return proper_; }          // all in/out degrees >= 1
    bool locally_finite() const { return true; }     // finite graphs always are

    // Truncation provenance, when built from a bouquet spec.
    const std::optional<BouquetSpec>& bouquet() const { return bouquet_; }
    std::optional<int> truncation() const { return truncation_; }
    // n=1 loops beyond the first cannot be realized as distinct edges of a
    // vertex shift; set when the materialization dropped some of them.
    bool bouquet_clamped() const { return bouquet_clamped_; }

    std::vector<std::pair<Vertex, Vertex>> edge_list() const;

private:
    friend DirectedGraph build_bouquet_graph(const BouquetSpec&, int);
    std::vector<std::vector<Vertex>> out_;
    std::vector<std::vector<Vertex>> in_;
    std::vector<std::string> labels_;
    std::size_t edge_count_ = 0;
    bool proper_ = false;
    std::optional<BouquetSpec> bouquet_;
    std::optional<int> truncation_;
    bool bouquet_clamped_ = false;
};

struct Component {
    std::vector<Vertex> vertices;  // ascending
    bool wandering = false;        // singleton without a self-loop
};

struct SpectralDecomposition {
    int period = 1;
    std::vector<std::vector<Vertex>> classes; // S_0..S_{p-1}, each ascending
};

// Star-of-loops realization of a bouquet spec, truncated at max loop length n_max.
DirectedGraph build_bouquet_graph(const BouquetSpec& spec, int n_max);

// Tarjan SCCs, ordered by minimal vertex id. Singletons without self-loop
// are flagged wandering.
std::vector<Component> strongly_connected_components(const DirectedGraph& g);

// gcd of cycle lengths through the component's minimal vertex.
// Errors if the component has no cycle.
int period(const DirectedGraph& g, const Component& comp);

// Cyclic classes S_i = {b : a ->^n b, n = i mod p} with a = minimal vertex id.
SpectralDecomposition spectral_decomposition(const DirectedGraph& g, const Component& comp);

// The induced subgraph on `keep` (ids renumbered by ascending position).
DirectedGraph induced_subgraph(const DirectedGraph& g, const std::vector<Vertex>& keep);

// Number of paths of each length between two vertices by exhaustive walk;
// test oracle and period cross-check. Lengths 1..max_len.
std::vector<std::uint64_t> count_paths_brute(const DirectedGraph& g, Vertex from, Vertex to,
                                             int max_len);

} // namespace sprshift
