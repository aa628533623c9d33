#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <vector>

#include "sprshift/graph.hpp"
#include "sprshift/potential.hpp"

namespace sprshift {

// Stationary Markov measure on the paths of a finite graph. For measures of
// maximal entropy and equilibrium measures the Perron data of the weighted
// adjacency matrix is kept alongside: lambda, left/right vectors with
// sum_u l_u r_u = 1, p_uv = B_uv r_v / (lambda r_u), p_v = l_v r_v.
struct MarkovMeasure {
    DirectedGraph graph;
    Eigen::VectorXd initial;      // p_v, sums to 1
    Eigen::MatrixXd transition;   // p_uv, row-stochastic, supported on edges
    double entropy = 0;           // h(sigma, mu) = -sum p_u p_uv log p_uv

    double lambda = 0;            // e^{pressure}; adjacency Perron root for the MME
    Eigen::VectorXd right;        // r
    Eigen::VectorXd left;         // l

    double mass(std::span<const Vertex> word) const;   // cylinder measure, 0 if inadmissible
    double mean(const CylinderPotential& f) const;     // integral of a one-sided potential

    void validate(double tol_rows = 1e-12, double tol_stationary = 1e-10) const;
};

struct CylinderMass {
    double value = 0;        // product of transition probabilities
    double eigen_value = 0;  // lambda^{-(n-1)} r_{last}/r_{first} p_{first}
    bool admissible = true;
};

// Unique measure of maximal entropy of a finite irreducible graph.
MarkovMeasure parry_measure(const DirectedGraph& g);

// Both routes to the cylinder mass of an MME; they agree to 1e-12.
CylinderMass cylinder_mass(const MarkovMeasure& m, std::span<const Vertex> word);

struct HigherBlockRecode {
    DirectedGraph block_graph;
    std::vector<std::vector<Vertex>> words;  // block vertex -> (k-1)-word
    int word_length = 1;

    // block vertex whose word starts with a given original vertex
    std::vector<std::vector<Vertex>> blocks_starting_at;
};

// Vertices = admissible (k-1)-words, edges on overlap; the potential becomes
// a function of one edge. k <= 2 is the identity recoding.
HigherBlockRecode higher_block_recode(const DirectedGraph& g, int k);

// Recoded range-2 potential on the block graph.
CylinderPotential recode_potential(const HigherBlockRecode& rc, const CylinderPotential& phi);

struct Equilibrium {
    MarkovMeasure measure;   // lives on recode.block_graph
    double pressure = 0;     // log lambda of the weighted matrix
    HigherBlockRecode recode;
};

// Equilibrium measure of a locally constant potential via the weighted
// Perron data; checks h(mu) + mu(phi) = P.
Equilibrium equilibrium_measure(const DirectedGraph& g, const CylinderPotential& phi);

// Weighted adjacency B_uv = A_uv e^{phi(u,v)} for a potential of range <= 2.
Eigen::MatrixXd weighted_adjacency(const DirectedGraph& g, const CylinderPotential& phi);

} // namespace sprshift
