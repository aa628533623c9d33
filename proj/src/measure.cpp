#include "sprshift/measure.hpp"

#include <algorithm>
#include <cmath>

#include "sprshift/perron.hpp"

namespace sprshift {

// --- CylinderPotential -----------------------------------------------------

CylinderPotential::CylinderPotential(int range, std::map<std::vector<Vertex>, double> values,
                                     int offset)
    : range_(range), offset_(offset), values_(std::move(values)) {
    if (range < 1) fail_input("potential", "range must be >= 1");
    if (offset > 0) fail_input("potential", "offset must be <= 0");
    if (offset + range <= 0) fail_input("potential", "window must reach coordinate 0");
    for (const auto& [word, val] : values_) {
        if (static_cast<int>(word.size()) != range)
            fail_input("potential", "table word of length " + std::to_string(word.size()) +
                                        " in a range-" + std::to_string(range) + " potential");
        if (!std::isfinite(val)) fail_input("potential", "non-finite table value");
    }
}

CylinderPotential CylinderPotential::constant(double c, const DirectedGraph& g) {
    std::map<std::vector<Vertex>, double> values;
    for (Vertex v = 0; v < g.vertex_count(); ++v) values[{v}] = c;
    return CylinderPotential(1, std::move(values));
}

CylinderPotential CylinderPotential::indicator(Vertex v, const DirectedGraph& g, double scale) {
    std::map<std::vector<Vertex>, double> values;
    for (Vertex u = 0; u < g.vertex_count(); ++u) values[{u}] = (u == v) ? scale : 0.0;
    return CylinderPotential(1, std::move(values));
}

CylinderPotential CylinderPotential::from_vertex_values(std::vector<double> by_vertex) {
    std::map<std::vector<Vertex>, double> values;
    for (Vertex v = 0; v < static_cast<Vertex>(by_vertex.size()); ++v) values[{v}] = by_vertex[v];
    return CylinderPotential(1, std::move(values));
}

CylinderPotential CylinderPotential::from_edge_values(
    const DirectedGraph& g, const std::vector<std::vector<double>>& by_edge) {
    std::map<std::vector<Vertex>, double> values;
    for (Vertex u = 0; u < g.vertex_count(); ++u)
        for (Vertex v : g.successors(u)) values[{u, v}] = by_edge.at(u).at(v);
    return CylinderPotential(2, std::move(values));
}

double CylinderPotential::value(std::span<const Vertex> word) const {
    if (static_cast<int>(word.size()) != range_)
        fail_input("potential", "word length does not match potential range");
    auto it = values_.find(std::vector<Vertex>(word.begin(), word.end()));
    if (it == values_.end()) fail_input("potential", "word missing from potential table");
    return it->second;
}

double CylinderPotential::sup_abs() const {
    double m = 0;
    for (const auto& [word, val] : values_) m = std::max(m, std::abs(val));
    return m;
}

void CylinderPotential::validate_against(const DirectedGraph& g) const {
    for (const auto& [word, val] : values_) {
        for (std::size_t i = 0; i + 1 < word.size(); ++i)
            if (!g.has_edge(word[i], word[i + 1]))
                fail_input("potential", "table contains an inadmissible word");
        for (Vertex v : word)
            if (v < 0 || v >= g.vertex_count())
                fail_input("potential", "table word references an unknown vertex");
    }
    // every admissible word of the range must be covered
    std::vector<std::vector<Vertex>> words;
    for (Vertex v = 0; v < g.vertex_count(); ++v) words.push_back({v});
    for (int len = 2; len <= range_; ++len) {
        std::vector<std::vector<Vertex>> next;
        for (const auto& w : words)
            for (Vertex v : g.successors(w.back())) {
                auto ext = w;
                ext.push_back(v);
                next.push_back(std::move(ext));
            }
        words = std::move(next);
    }
    for (const auto& w : words)
        if (!values_.count(w)) fail_input("potential", "admissible word missing from table");
}

SinaiReduction sinai_reduction(const CylinderPotential& psi) {
    SinaiReduction out;
    out.shift = -psi.offset();
    if (out.shift == 0) {
        out.one_sided = psi;
        return out;
    }
    // Same table, window re-anchored at zero: psi~ = psi o sigma^m.
    out.one_sided = CylinderPotential(psi.range(), psi.table(), 0);
    out.one_sided.holder_beta = psi.holder_beta;
    out.one_sided.holder_norm = psi.holder_norm;
    out.telescope_bound = 2.0 * double(out.shift) * psi.sup_abs();
    return out;
}

// --- MarkovMeasure ----------------------------------------------------------

double MarkovMeasure::mass(std::span<const Vertex> word) const {
    if (word.empty()) return 1.0;
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (!graph.has_edge(word[i], word[i + 1])) return 0.0;
    double m = initial[word[0]];
    for (std::size_t i = 0; i + 1 < word.size(); ++i) m *= transition(word[i], word[i + 1]);
    return m;
}

double MarkovMeasure::mean(const CylinderPotential& f) const {
    if (!f.one_sided()) fail_pre("measure_mean", "potential must be one-sided");
    double total = 0;
    for (const auto& [word, val] : f.table()) total += mass(word) * val;
    return total;
}

void MarkovMeasure::validate(double tol_rows, double tol_stationary) const {
    const int n = graph.vertex_count();
    if (initial.size() != n || transition.rows() != n || transition.cols() != n)
        fail_input("measure", "dimension mismatch with graph");
    if (std::abs(initial.sum() - 1.0) > tol_rows)
        fail_numeric("measure", "initial distribution does not sum to 1");
    for (int u = 0; u < n; ++u) {
        double row = 0;
        for (int v = 0; v < n; ++v) {
            if (transition(u, v) < 0) fail_numeric("measure", "negative transition probability");
            if (transition(u, v) > 0 && !graph.has_edge(u, v))
                fail_numeric("measure", "transition mass off the edge set");
            row += transition(u, v);
        }
        if (std::abs(row - 1.0) > tol_rows)
            fail_numeric("measure", "row " + std::to_string(u) + " does not sum to 1");
    }
    Eigen::VectorXd stat = transition.transpose() * initial;
    if ((stat - initial).cwiseAbs().maxCoeff() > tol_stationary)
        fail_numeric("measure", "initial distribution is not stationary");
}

namespace {

void require_irreducible(const DirectedGraph& g, const char* op) {
    const auto comps = strongly_connected_components(g);
    if (comps.size() != 1 || comps[0].wandering)
        fail_pre(op, "graph must be finite, irreducible, with a cycle");
}

double markov_entropy(const Eigen::VectorXd& p, const Eigen::MatrixXd& P) {
    double h = 0;
    for (int u = 0; u < P.rows(); ++u)
        for (int v = 0; v < P.cols(); ++v)
            if (P(u, v) > 0) h -= p[u] * P(u, v) * std::log(P(u, v));
    return h;
}

MarkovMeasure measure_from_weights(const DirectedGraph& g, const Eigen::MatrixXd& B,
                                   const char* op) {
    require_irreducible(g, op);
    const PerronData<double> pd = perron<double>(B);
    MarkovMeasure m;
    m.graph = g;
    m.lambda = pd.lambda;
    m.right = pd.right;
    m.left = pd.left;
    const int n = g.vertex_count();
    m.transition = Eigen::MatrixXd::Zero(n, n);
    m.initial = Eigen::VectorXd::Zero(n);
    for (int u = 0; u < n; ++u) {
        m.initial[u] = pd.left[u] * pd.right[u];
        for (Vertex v : g.successors(u))
            m.transition(u, v) = B(u, v) * pd.right[v] / (pd.lambda * pd.right[u]);
    }
    m.entropy = markov_entropy(m.initial, m.transition);
    m.validate();
    return m;
}

} // namespace

MarkovMeasure parry_measure(const DirectedGraph& g) {
    const int n = g.vertex_count();
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : g.successors(u)) A(u, v) = 1.0;
    MarkovMeasure m = measure_from_weights(g, A, "parry_measure");
    if (std::abs(m.entropy - std::log(m.lambda)) > 1e-10)
        fail_numeric("parry_measure", "entropy formula disagrees with log lambda");
    return m;
}

CylinderMass cylinder_mass(const MarkovMeasure& m, std::span<const Vertex> word) {
    CylinderMass out;
    if (word.empty()) {
        out.value = out.eigen_value = 1.0;
        return out;
    }
    for (std::size_t i = 0; i + 1 < word.size(); ++i)
        if (!m.graph.has_edge(word[i], word[i + 1])) {
            out.admissible = false;
            out.value = out.eigen_value = 0.0;
            return out;
        }
    out.value = m.mass(word);
    const std::size_t n = word.size();
    out.eigen_value = std::pow(m.lambda, -double(n - 1)) * m.right[word[n - 1]] /
                      m.right[word[0]] * m.initial[word[0]];
    return out;
}

HigherBlockRecode higher_block_recode(const DirectedGraph& g, int k) {
    if (k < 1) fail_pre("higher_block_recode", "range must be >= 1");
    HigherBlockRecode rc;
    rc.word_length = std::max(1, k - 1);
    if (k <= 2) {
        rc.block_graph = g;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            rc.words.push_back({v});
            rc.blocks_starting_at.push_back({v});
        }
        return rc;
    }
    // enumerate admissible (k-1)-words in lexicographic order
    std::vector<std::vector<Vertex>> words;
    for (Vertex v = 0; v < g.vertex_count(); ++v) words.push_back({v});
    for (int len = 2; len <= k - 1; ++len) {
        std::vector<std::vector<Vertex>> next;
        for (const auto& w : words)
            for (Vertex v : g.successors(w.back())) {
                auto ext = w;
                ext.push_back(v);
                next.push_back(std::move(ext));
            }
        words = std::move(next);
    }
    std::sort(words.begin(), words.end());
    std::map<std::vector<Vertex>, Vertex> ids;
    for (std::size_t i = 0; i < words.size(); ++i) ids[words[i]] = static_cast<Vertex>(i);

    std::vector<std::pair<Vertex, Vertex>> edges;
    for (const auto& w : words) {
        for (Vertex v : g.successors(w.back())) {
            std::vector<Vertex> shifted(w.begin() + 1, w.end());
            shifted.push_back(v);
            auto it = ids.find(shifted);
            if (it != ids.end()) edges.emplace_back(ids[w], it->second);
        }
    }
    rc.block_graph = DirectedGraph(static_cast<int>(words.size()), std::move(edges));
    rc.words = std::move(words);
    rc.blocks_starting_at.assign(g.vertex_count(), {});
    for (std::size_t i = 0; i < rc.words.size(); ++i)
        rc.blocks_starting_at[rc.words[i][0]].push_back(static_cast<Vertex>(i));
    return rc;
}

CylinderPotential recode_potential(const HigherBlockRecode& rc, const CylinderPotential& phi) {
    if (!phi.one_sided()) fail_pre("recode_potential", "recode a one-sided potential");
    if (phi.range() <= 2 && rc.word_length == 1) return phi;
    std::map<std::vector<Vertex>, double> values;
    for (Vertex u = 0; u < rc.block_graph.vertex_count(); ++u) {
        for (Vertex v : rc.block_graph.successors(u)) {
            std::vector<Vertex> word = rc.words[u];
            word.push_back(rc.words[v].back());
            // the recoded edge weight reads phi on the leading coordinates
            std::span<const Vertex> head(word.data(), phi.range());
            values[{u, v}] = phi.value(head);
        }
    }
    return CylinderPotential(2, std::move(values));
}

Eigen::MatrixXd weighted_adjacency(const DirectedGraph& g, const CylinderPotential& phi) {
    if (phi.range() > 2) fail_pre("weighted_adjacency", "potential must have range <= 2");
    if (!phi.one_sided()) fail_pre("weighted_adjacency", "potential must be one-sided");
    const int n = g.vertex_count();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : g.successors(u)) {
            double w;
            if (phi.range() == 1) {
                const Vertex word[] = {u};
                w = phi.value(word);
            } else {
                const Vertex word[] = {u, v};
                w = phi.value(word);
            }
            B(u, v) = std::exp(w);
        }
    return B;
}

Equilibrium equilibrium_measure(const DirectedGraph& g, const CylinderPotential& phi) {
    Equilibrium eq;
    eq.recode = higher_block_recode(g, phi.range());
    const CylinderPotential phi2 =
        (phi.range() <= 2) ? phi : recode_potential(eq.recode, phi);
    const Eigen::MatrixXd B = weighted_adjacency(eq.recode.block_graph, phi2);
    eq.measure = measure_from_weights(eq.recode.block_graph, B, "equilibrium_measure");
    eq.pressure = std::log(eq.measure.lambda);

    // variational identity h(mu) + mu(phi) = P
    double phi_mean = 0;
    const int n = eq.recode.block_graph.vertex_count();
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : eq.recode.block_graph.successors(u)) {
            double w;
            if (phi2.range() == 1) {
                const Vertex word[] = {u};
                w = phi2.value(word);
            } else {
                const Vertex word[] = {u, v};
                w = phi2.value(word);
            }
            phi_mean += eq.measure.initial[u] * eq.measure.transition(u, v) * w;
        }
    if (std::abs(eq.measure.entropy + phi_mean - eq.pressure) > 1e-9)
        fail_numeric("equilibrium_measure", "variational identity violated");
    return eq;
}

} // namespace sprshift
