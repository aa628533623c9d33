#include "sprshift/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sprshift {

std::uint64_t BouquetSpec::loops_of_length(int n) const {
    if (n <= 0) fail_input("bouquet", "loop length must be positive, got " + std::to_string(n));
    switch (family) {
    case BouquetFamily::CeilPow2OverNsq: {
        if (n < M) return 0;
        if (n >= 63) fail_input("bouquet", "ceil_pow2_over_nsq overflows 64-bit at n=" + std::to_string(n));
        const std::uint64_t p = std::uint64_t{1} << n;
        const std::uint64_t q = std::uint64_t(n) * std::uint64_t(n);
        return (p + q - 1) / q;
    }
    case BouquetFamily::Ruette: {
        const int r = static_cast<int>(std::lround(std::sqrt(double(n))));
        if (r * r != n) return 0;
        const int e = n - r; // 2^(n - sqrt n)
        if (e >= 63) fail_input("bouquet", "ruette rule overflows 64-bit at n=" + std::to_string(n));
        return std::uint64_t{1} << e;
    }
    case BouquetFamily::Table:
        for (const auto& [len, count] : table)
            if (len == n) return count;
        return 0;
    }
    fail_input("bouquet", "unknown family");
}

DirectedGraph::DirectedGraph(int vertex_count, std::vector<std::pair<Vertex, Vertex>> edges,
                             std::vector<std::string> labels) {
    if (vertex_count < 0) fail_input("build_graph", "negative vertex count");
    out_.resize(vertex_count);
    in_.resize(vertex_count);
    for (const auto& [u, v] : edges) {
        if (u < 0 || u >= vertex_count || v < 0 || v >= vertex_count)
            fail_input("build_graph", "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                          ") references a vertex outside 0.." +
                                          std::to_string(vertex_count - 1));
        out_[u].push_back(v);
        in_[v].push_back(u);
    }
    for (Vertex u = 0; u < vertex_count; ++u) {
        std::sort(out_[u].begin(), out_[u].end());
        if (std::adjacent_find(out_[u].begin(), out_[u].end()) != out_[u].end())
            fail_input("build_graph", "duplicate edge out of vertex " + std::to_string(u));
        std::sort(in_[u].begin(), in_[u].end());
    }
    edge_count_ = edges.size();
    proper_ = vertex_count > 0;
    for (Vertex u = 0; u < vertex_count; ++u)
        if (out_[u].empty() || in_[u].empty()) proper_ = false;
    if (!labels.empty() && static_cast<int>(labels.size()) != vertex_count)
        fail_input("build_graph", "label count does not match vertex count");
    labels_ = std::move(labels);
}

bool DirectedGraph::has_edge(Vertex u, Vertex v) const {
    if (u < 0 || u >= vertex_count()) return false;
    return std::binary_search(out_[u].begin(), out_[u].end(), v);
}

std::vector<std::pair<Vertex, Vertex>> DirectedGraph::edge_list() const {
    std::vector<std::pair<Vertex, Vertex>> edges;
    edges.reserve(edge_count_);
    for (Vertex u = 0; u < vertex_count(); ++u)
        for (Vertex v : out_[u]) edges.emplace_back(u, v);
    return edges;
}

DirectedGraph build_bouquet_graph(const BouquetSpec& spec, int n_max) {
    if (n_max < 1) fail_input("build_graph", "bouquet truncation must be >= 1");
    if (spec.base != 0) fail_input("build_graph", "bouquet base vertex must be 0 in a fresh graph");
    std::vector<std::pair<Vertex, Vertex>> edges;
    int next = 1;
    bool clamped = false;
    for (int n = 1; n <= n_max; ++n) {
        std::uint64_t ell = spec.loops_of_length(n);
        if (ell == 0) continue;
        if (n == 1) {
            edges.emplace_back(0, 0);
            if (ell > 1) clamped = true; // parallel self-loops have no vertex-shift realization
            continue;
        }
        for (std::uint64_t i = 0; i < ell; ++i) {
            Vertex prev = 0;
            for (int step = 1; step < n; ++step) {
                edges.emplace_back(prev, next);
                prev = next++;
            }
            edges.emplace_back(prev, 0);
        }
    }
    if (edges.empty()) fail_input("build_graph", "bouquet rule is zero up to the truncation bound");
    DirectedGraph g(next, std::move(edges));
    g.bouquet_ = spec;
    g.truncation_ = n_max;
    g.bouquet_clamped_ = clamped;
    return g;
}

namespace {

struct TarjanState {
    const DirectedGraph& g;
    std::vector<int> index, low, on_stack;
    std::vector<Vertex> stack;
    int counter = 0;
    std::vector<std::vector<Vertex>> sccs;

    explicit TarjanState(const DirectedGraph& graph)
        : g(graph), index(graph.vertex_count(), -1), low(graph.vertex_count(), 0),
          on_stack(graph.vertex_count(), 0) {}

    // Iterative DFS; bouquet truncations can have long petal chains.
    void run(Vertex root) {
        struct Frame { Vertex v; std::size_t next_edge; };
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            auto& [v, next_edge] = frames.back();
            if (next_edge < g.successors(v).size()) {
                Vertex w = g.successors(v)[next_edge++];
                if (index[w] == -1) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                if (low[v] == index[v]) {
                    std::vector<Vertex> scc;
                    Vertex w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        scc.push_back(w);
                    } while (w != v);
                    sccs.push_back(std::move(scc));
                }
                Vertex done = v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[done]);
            }
        }
    }
};

} // namespace

std::vector<Component> strongly_connected_components(const DirectedGraph& g) {
    TarjanState state(g);
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (state.index[v] == -1) state.run(v);

    std::vector<Component> comps;
    comps.reserve(state.sccs.size());
    for (auto& scc : state.sccs) {
        std::sort(scc.begin(), scc.end());
        Component c;
        c.wandering = scc.size() == 1 && !g.has_edge(scc[0], scc[0]);
        c.vertices = std::move(scc);
        comps.push_back(std::move(c));
    }
    std::sort(comps.begin(), comps.end(),
              [](const Component& a, const Component& b) { return a.vertices[0] < b.vertices[0]; });
    return comps;
}

namespace {

// BFS distances from a, restricted to the component.
std::vector<int> bfs_distances(const DirectedGraph& g, const std::vector<char>& in_comp, Vertex a) {
    std::vector<int> dist(g.vertex_count(), -1);
    std::vector<Vertex> queue{a};
    dist[a] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        Vertex u = queue[head];
        for (Vertex v : g.successors(u)) {
            if (!in_comp[v] || dist[v] != -1) continue;
            dist[v] = dist[u] + 1;
            queue.push_back(v);
        }
    }
    return dist;
}

} // namespace

int period(const DirectedGraph& g, const Component& comp) {
    if (comp.wandering) fail_pre("period", "component is wandering (no cycle)");
    std::vector<char> in_comp(g.vertex_count(), 0);
    for (Vertex v : comp.vertices) in_comp[v] = 1;
    const Vertex a = comp.vertices[0];
    const std::vector<int> dist = bfs_distances(g, in_comp, a);

    // gcd over edges u->v inside the component of dist(u)+1-dist(v);
    // equals the gcd of cycle lengths through a.
    int p = 0;
    for (Vertex u : comp.vertices) {
        if (dist[u] == -1) continue;
        for (Vertex v : g.successors(u)) {
            if (!in_comp[v] || dist[v] == -1) continue;
            p = std::gcd(p, std::abs(dist[u] + 1 - dist[v]));
        }
    }
    if (p == 0) fail_pre("period", "component has no cycle");
    return p;
}

SpectralDecomposition spectral_decomposition(const DirectedGraph& g, const Component& comp) {
    SpectralDecomposition dec;
    dec.period = period(g, comp);
    dec.classes.assign(dec.period, {});
    std::vector<char> in_comp(g.vertex_count(), 0);
    for (Vertex v : comp.vertices) in_comp[v] = 1;
    const Vertex a = comp.vertices[0];
    const std::vector<int> dist = bfs_distances(g, in_comp, a);
    for (Vertex v : comp.vertices) dec.classes[dist[v] % dec.period].push_back(v);
    for (auto& cls : dec.classes) std::sort(cls.begin(), cls.end());

    for (std::size_t i = 0; i < dec.classes.size(); ++i) {
        const auto& next = dec.classes[(i + 1) % dec.classes.size()];
        for (Vertex u : dec.classes[i])
            for (Vertex v : g.successors(u))
                if (in_comp[v] && !std::binary_search(next.begin(), next.end(), v))
                    fail_numeric("spectral_decomposition", "edge leaves its cyclic class");
    }
    return dec;
}

DirectedGraph induced_subgraph(const DirectedGraph& g, const std::vector<Vertex>& keep) {
    std::vector<Vertex> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<int> remap(g.vertex_count(), -1);
    for (std::size_t i = 0; i < sorted.size(); ++i) remap[sorted[i]] = static_cast<int>(i);
    std::vector<std::pair<Vertex, Vertex>> edges;
    for (Vertex u : sorted)
        for (Vertex v : g.successors(u))
            if (remap[v] != -1) edges.emplace_back(remap[u], remap[v]);
    return DirectedGraph(static_cast<int>(sorted.size()), std::move(edges));
}

namespace {

void walk_all(const DirectedGraph& g, Vertex at, Vertex to, int len, int max_len,
              std::vector<std::uint64_t>& counts) {
    if (len > 0 && at == to) ++counts[len];
    if (len == max_len) return;
    for (Vertex v : g.successors(at)) walk_all(g, v, to, len + 1, max_len, counts);
}

} // namespace

std::vector<std::uint64_t> count_paths_brute(const DirectedGraph& g, Vertex from, Vertex to,
                                             int max_len) {
    std::vector<std::uint64_t> counts(max_len + 1, 0);
    walk_all(g, from, to, 0, max_len, counts);
    return counts;
}

} // namespace sprshift
