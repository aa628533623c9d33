#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sprshift/census.hpp"
#include "sprshift/potential.hpp"

namespace sprshift {

enum class Verdict { Spr, PositiveRecurrentNotSpr, Inconclusive };
enum class Tristate { Yes, No, Unknown };

struct EvidenceItem {
    std::string name;
    double value = 0;
    bool rigorous = false;
    std::string detail;
};

// Three-way diagnosis with the evidence that produced it. `spr` and `pr`
// carry the certified knowledge; the verdict never claims SPR without a
// rigorous item (partial sums only ever underestimate F_a(R_a), so a
// partial sum > 1 is already a certificate).
struct SprVerdict {
    Verdict verdict = Verdict::Inconclusive;
    Tristate spr = Tristate::Unknown;
    Tristate pr = Tristate::Unknown;
    std::vector<EvidenceItem> evidence;

    void merge(const SprVerdict& other); // throws if certified items contradict
    void finalize();                     // derive `verdict` from spr/pr
};

// Vere-Jones route: partial sums of F_a at R_a, closed-form tail bounds for
// the built-in bouquet families, immediate certificate on finite support.
SprVerdict vere_jones_test(const LoopCensus& census);

// Positive-recurrence series sum e^{-nh} Z_n (divergence is a trend
// heuristic) and sum n e^{-nh} Z*_n (convergence certified by closed-form or
// finite-support tails).
SprVerdict positive_recurrence_test(const LoopCensus& census, double h);

struct ExitPathReport {
    std::vector<Vertex> W;
    double rate = 0;       // limsup estimate of (1/n) log #exit paths, max over pairs
    double h_sub = 0;      // Gurevich entropy of Sigma' = Sigma cap W^Z
    bool holds = false;    // h_sub >= rate
    bool counts_vanish = false;
    int horizon = 0;
};

// Gurevich-Zargaryan criterion for a user-supplied finite window W:
// counts paths (a, xi_1..xi_n, b) with a,b in W and xi_i outside W.
// Errors when Sigma' is reducible, prompting a larger W.
ExitPathReport exit_path_rate(const DirectedGraph& g, const std::vector<Vertex>& W, int horizon);

struct WeightedCensus {
    std::vector<double> Z;       // Z_n(phi, a)
    std::vector<double> Zstar;   // Z*_n(phi, a)
    double pressure = 0;         // log lambda of the weighted block matrix
    double pressure_rate = 0;    // window-end ratio of log Z_n, cross-check
    double first_return_rate = 0;// log of the taboo block spectral radius
    bool finite_support = false;
    SprVerdict verdict;          // SPR-for-potential by rate comparison
};

// Weighted loop sums over periodic points in [a] (first-return constrained
// for Z*), exact transfer-matrix computation after range-2 recoding.
WeightedCensus weighted_census(const DirectedGraph& g, Vertex a, const CylinderPotential& phi,
                               int horizon);

struct SprOptions {
    Vertex base = 0;
    int horizon = 64;
    std::vector<Vertex> W;       // empty: automatic growth from {base}
    int max_w_rounds = 5;
    bool run_exit_path = true;
};

// Full gate for a finite graph: Vere-Jones, PR series, taboo-eigenvalue gap,
// exit-path probe with automatic W growth.
SprVerdict spr_diagnose(const DirectedGraph& g, const SprOptions& opt);

// Full gate for an idealized bouquet family (exact ell-table path).
SprVerdict spr_diagnose(const BouquetSpec& spec, int horizon);

} // namespace sprshift
