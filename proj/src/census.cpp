#include "sprshift/census.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sprshift {

namespace {

void propagate(const DirectedGraph& g, std::vector<BigInt>& from, std::vector<BigInt>& scratch,
               Vertex taboo = -1) {
    std::fill(scratch.begin(), scratch.end(), BigInt(0));
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
        if (from[u] == 0) continue;
        for (Vertex v : g.successors(u)) {
            if (v == taboo) continue;
            scratch[v] += from[u];
        }
    }
    std::swap(from, scratch);
}

// True when every cycle of g touching the relevant part of V\{a} is absent,
// i.e. first-return loops at a have bounded length. Returns the bound
// (longest taboo path + 2) when acyclic.
std::optional<int> taboo_acyclic_bound(const DirectedGraph& g, Vertex a) {
    // Kahn's algorithm on the subgraph without a; a cycle there means
    // arbitrarily long first-return loops whenever it is reachable, and
    // harmless otherwise -- to stay conservative require full acyclicity
    // of the reachable-from-a, co-reachable-to-a taboo region.
    const int n = g.vertex_count();
    std::vector<char> fwd(n, 0), bwd(n, 0);
    std::vector<Vertex> queue;
    for (Vertex v : g.successors(a))
        if (v != a && !fwd[v]) { fwd[v] = 1; queue.push_back(v); }
    for (std::size_t h = 0; h < queue.size(); ++h)
        for (Vertex v : g.successors(queue[h]))
            if (v != a && !fwd[v]) { fwd[v] = 1; queue.push_back(v); }
    queue.clear();
    for (Vertex v : g.predecessors(a))
        if (v != a && !bwd[v]) { bwd[v] = 1; queue.push_back(v); }
    for (std::size_t h = 0; h < queue.size(); ++h)
        for (Vertex v : g.predecessors(queue[h]))
            if (v != a && !bwd[v]) { bwd[v] = 1; queue.push_back(v); }

    std::vector<char> keep(n, 0);
    std::vector<int> indeg(n, 0);
    int kept = 0;
    for (Vertex v = 0; v < n; ++v)
        if (v != a && fwd[v] && bwd[v]) { keep[v] = 1; ++kept; }
    for (Vertex u = 0; u < n; ++u) {
        if (!keep[u]) continue;
        for (Vertex v : g.successors(u))
            if (keep[v]) ++indeg[v];
    }
    std::vector<Vertex> order;
    for (Vertex v = 0; v < n; ++v)
        if (keep[v] && indeg[v] == 0) order.push_back(v);
    std::vector<int> depth(n, 0);
    int longest = 0;
    for (std::size_t h = 0; h < order.size(); ++h) {
        Vertex u = order[h];
        longest = std::max(longest, depth[u]);
        for (Vertex v : g.successors(u)) {
            if (!keep[v]) continue;
            depth[v] = std::max(depth[v], depth[u] + 1);
            if (--indeg[v] == 0) order.push_back(v);
        }
    }
    if (static_cast<int>(order.size()) != kept) return std::nullopt; // cycle
    return longest + 2;
}

} // namespace

void check_renewal_identity(const LoopCensus& c) {
    for (int n = 1; n <= c.horizon; ++n) {
        BigInt rhs = c.first_returns(n);
        for (int k = 1; k < n; ++k) rhs += c.first_returns(k) * c.loops(n - k);
        if (rhs != c.loops(n))
            fail_numeric("count_loops", "renewal identity fails at n=" + std::to_string(n));
    }
}

LoopCensus count_loops(const DirectedGraph& g, Vertex base, int horizon) {
    if (base < 0 || base >= g.vertex_count()) fail_pre("count_loops", "base vertex out of range");
    if (horizon < 1) fail_pre("count_loops", "horizon must be >= 1");
    {
        const auto comps = strongly_connected_components(g);
        for (const auto& c : comps) {
            if (!std::binary_search(c.vertices.begin(), c.vertices.end(), base)) continue;
            if (c.wandering) fail_pre("count_loops", "base vertex is wandering");
        }
    }

    LoopCensus c;
    c.base = base;
    c.horizon = horizon;
    c.Z.resize(horizon);
    c.Zstar.resize(horizon);

    std::vector<BigInt> v(g.vertex_count()), scratch(g.vertex_count());
    v[base] = 1;
    for (int n = 1; n <= horizon; ++n) {
        propagate(g, v, scratch);
        c.Z[n - 1] = v[base];
    }

    // First returns: walk the taboo graph, re-entering base only on the last step.
    std::fill(v.begin(), v.end(), BigInt(0));
    c.Zstar[0] = g.has_edge(base, base) ? 1 : 0;
    for (Vertex w : g.successors(base))
        if (w != base) v[w] = 1;
    for (int n = 2; n <= horizon; ++n) {
        BigInt hits = 0;
        for (Vertex u : g.predecessors(base))
            if (u != base) hits += v[u];
        c.Zstar[n - 1] = hits;
        if (n < horizon) propagate(g, v, scratch, base);
    }

    if (auto bound = taboo_acyclic_bound(g, base)) {
        c.finite_support_certified = true;
        c.support_bound = *bound;
    }
    check_renewal_identity(c);
    return c;
}

LoopCensus bouquet_census(const BouquetSpec& spec, int horizon) {
    if (horizon < 1) fail_pre("bouquet_census", "horizon must be >= 1");
    LoopCensus c;
    c.base = spec.base;
    c.horizon = horizon;
    c.family = spec;
    c.Zstar.resize(horizon);
    c.Z.resize(horizon);
    for (int n = 1; n <= horizon; ++n) c.Zstar[n - 1] = spec.loops_of_length(n);
    for (int n = 1; n <= horizon; ++n) {
        BigInt z = c.Zstar[n - 1];
        for (int k = 1; k < n; ++k) z += c.Zstar[k - 1] * c.Z[n - k - 1];
        c.Z[n - 1] = z;
    }
    if (spec.family == BouquetFamily::Table) {
        int last = 0;
        for (const auto& [len, count] : spec.table)
            if (count > 0) last = std::max(last, len);
        c.finite_support_certified = true;
        c.support_bound = last;
    }
    return c;
}

EntropyEstimate gurevich_entropy(const LoopCensus& c, int p) {
    if (p < 1) fail_pre("gurevich_entropy", "period must be >= 1");
    if (c.horizon < 4 * p) fail_pre("gurevich_entropy", "census horizon shorter than 4 periods");

    EntropyEstimate est;
    est.period = p;
    est.h_lo = -std::numeric_limits<double>::infinity();
    int last = 0, prev = 0;
    for (int m = 1; m * p <= c.horizon; ++m) {
        const BigInt& z = c.loops(m * p);
        if (z == 0) continue;
        // log Z_{p(m+k)} >= log Z_{pm} + log Z_{pk}: each term is a lower bound.
        est.h_lo = std::max(est.h_lo, log_big(z) / double(m * p));
        prev = last;
        last = m;
    }
    if (last == 0) fail_pre("gurevich_entropy", "all subsampled loop counts vanish in the window");
    est.window = last;
    if (prev == 0) {
        est.h = log_big(c.loops(last * p)) / double(last * p);
        est.h_hi = est.h;
    } else {
        // p-step ratio at the end of the window; exponentially convergent
        // for finite graphs, reported without a rigor claim.
        est.h = (log_big(c.loops(last * p)) - log_big(c.loops(prev * p))) /
                double((last - prev) * p);
        est.h_hi = est.h;
    }
    est.h = std::max(est.h, est.h_lo);
    est.h_hi = std::max(est.h_hi, est.h);
    if (est.h_lo > est.h) est.h_lo = est.h;
    return est;
}

double first_return_rate(const LoopCensus& c) {
    if (c.finite_support_certified) return -std::numeric_limits<double>::infinity();
    double rate = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (int n = (c.horizon + 1) / 2; n <= c.horizon; ++n) {
        const BigInt& z = c.first_returns(n);
        if (z == 0) continue;
        any = true;
        rate = std::max(rate, log_big(z) / double(n));
    }
    if (!any) {
        // Nothing in the tail half of the window; fall back to the full window.
        for (int n = 1; n <= c.horizon; ++n)
            if (c.first_returns(n) > 0)
                rate = std::max(rate, log_big(c.first_returns(n)) / double(n));
    }
    return rate;
}

RadiusEstimate convergence_radii(const LoopCensus& c) {
    RadiusEstimate est;
    if (c.family && c.family->family != BouquetFamily::Table) {
        // Both built-in rules have limsup ell_n^{1/n} = 2.
        est.R_a = 0.5;
        est.R_exact = true;
    } else if (c.finite_support_certified) {
        est.R_a = std::numeric_limits<double>::infinity();
        est.R_exact = true;
    } else {
        est.R_a = std::exp(-first_return_rate(c));
    }
    try {
        est.r_a = std::exp(-gurevich_entropy(c, 1).h);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Precondition) throw;
        est.r_a = std::numeric_limits<double>::quiet_NaN(); // window too empty
    }
    return est;
}

} // namespace sprshift
