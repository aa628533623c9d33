#pragma once

#include <optional>
#include <vector>

#include "sprshift/bigint.hpp"
#include "sprshift/graph.hpp"

namespace sprshift {

// Exact loop counts Z_n(a) and first-return counts Z*_n(a) at a base vertex,
// n = 1..horizon. Z_n = (A^n)_aa; Z*_n counts loops avoiding a internally.
struct LoopCensus {
    Vertex base = 0;
    int horizon = 0;
    std::vector<BigInt> Z;      // Z[n-1] = Z_n(a)
    std::vector<BigInt> Zstar;  // Zstar[n-1] = Z*_n(a)
    bool exact = true;

    // Z*_n == 0 for all n > support_bound, certified from graph structure
    // (the taboo subgraph seen by first-return loops is acyclic).
    bool finite_support_certified = false;
    int support_bound = 0;

    // Set when derived from a built-in bouquet rule; unlocks closed-form
    // radius and tail bounds in the SPR gate.
    std::optional<BouquetSpec> family;

    const BigInt& loops(int n) const { return Z.at(n - 1); }
    const BigInt& first_returns(int n) const { return Zstar.at(n - 1); }
};

struct EntropyEstimate {
    double h = 0;       // point estimate, p-step ratio at the window end
    double h_lo = 0;    // rigorous lower envelope (supermultiplicativity)
    double h_hi = 0;    // ratio extrapolation; heuristic, not a bound
    int window = 0;     // largest n with Z_{pn} > 0 that entered the estimate
    int period = 1;
};

struct RadiusEstimate {
    double r_a = 0;                  // exp(-h), radius of T_a
    double R_a = 0;                  // radius of F_a; +inf when certified finite support
    bool R_exact = false;            // closed form or finite-support certificate
};

// Exact census by adjacency propagation; asserts the renewal identity
// Z_n = Z*_n + sum_k Z*_k Z_{n-k} for every n <= horizon.
LoopCensus count_loops(const DirectedGraph& g, Vertex base, int horizon);

// Census of an idealized (untruncated) bouquet: Z*_n = ell_n exactly,
// Z_n from the renewal recursion.
LoopCensus bouquet_census(const BouquetSpec& spec, int horizon);

// Point estimate with rigorous lower envelope; errors when every Z_{pn}
// in the window vanishes.
EntropyEstimate gurevich_entropy(const LoopCensus& census, int period);

RadiusEstimate convergence_radii(const LoopCensus& census);

// limsup (1/n) log Z*_n estimated over the last half of the window;
// -inf when the support is certified finite.
double first_return_rate(const LoopCensus& census);

void check_renewal_identity(const LoopCensus& census); // throws on violation

} // namespace sprshift
