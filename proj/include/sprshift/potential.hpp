#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "sprshift/graph.hpp"

namespace sprshift {

// Real function of finitely many coordinates: depends on x_offset..x_{offset+range-1}.
// offset <= 0; one-sided potentials have offset 0. The table must cover the
// admissible words of its length and nothing else.
class CylinderPotential {
public:
    CylinderPotential() : range_(1) {}
    CylinderPotential(int range, std::map<std::vector<Vertex>, double> values, int offset = 0);

    static CylinderPotential constant(double c, const DirectedGraph& g);
    static CylinderPotential indicator(Vertex v, const DirectedGraph& g, double scale = 1.0);
    // f(x) = by_vertex[x_0]
    static CylinderPotential from_vertex_values(std::vector<double> by_vertex);
    // f(x) = table(x_0, x_1) on edges
    static CylinderPotential from_edge_values(const DirectedGraph& g,
                                              const std::vector<std::vector<double>>& by_edge);

    int range() const { return range_; }
    int offset() const { return offset_; }
    bool one_sided() const { return offset_ == 0; }
    const std::map<std::vector<Vertex>, double>& table() const { return values_; }

    double value(std::span<const Vertex> word) const; // word.size() == range
    double sup_abs() const;

    std::optional<double> holder_beta;  // declared regularity, metadata only
    std::optional<double> holder_norm;

    // Errors unless the table matches the admissible words of g exactly.
    void validate_against(const DirectedGraph& g) const;

private:
    int range_;
    int offset_ = 0;
    std::map<std::vector<Vertex>, double> values_;
};

struct SinaiReduction {
    CylinderPotential one_sided;  // psi-tilde = psi o sigma^m as a function of x_0..x_{2m}
    int shift = 0;                // m
    double telescope_bound = 0;   // |psi_n - psi~_n| <= 2m sup|psi| along any orbit
};

// Exact for locally constant functions: re-anchor the window at coordinate 0.
SinaiReduction sinai_reduction(const CylinderPotential& two_sided);

} // namespace sprshift
