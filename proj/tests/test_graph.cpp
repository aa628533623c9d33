#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "corpus.hpp"
#include "sprshift/graph.hpp"
#include "sprshift/io.hpp"

using namespace sprshift;
using namespace sprshift::testing;

TEST_CASE("golden mean builds proper") {
    const DirectedGraph g = golden_mean();
    CHECK(g.vertex_count() == 2);
    CHECK(g.edge_count() == 3);
    CHECK(g.proper());
    CHECK(g.has_edge(0, 0));
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 0));
    CHECK(!g.has_edge(1, 1));
}

TEST_CASE("full 2-shift has every degree 2") {
    const DirectedGraph g = full_shift(2);
    CHECK(g.proper());
    for (Vertex v = 0; v < 2; ++v) {
        CHECK(g.successors(v).size() == 2);
        CHECK(g.predecessors(v).size() == 2);
    }
}

TEST_CASE("duplicate edges rejected") {
    CHECK_THROWS_AS(DirectedGraph(2, {{0, 1}, {0, 1}}), Error);
    CHECK_THROWS_AS(DirectedGraph(1, {{0, 3}}), Error);
}

TEST_CASE("bouquet materialization: star of loops") {
    BouquetSpec spec;
    spec.family = BouquetFamily::CeilPow2OverNsq;
    spec.M = 1;
    const DirectedGraph g = build_bouquet_graph(spec, 12);
    CHECK(g.proper());
    CHECK(g.bouquet_clamped()); // ell_1 = 2 cannot both be realized as self-loops

    // in-degree of the base counts one edge per materialized loop
    std::uint64_t expected = 0;
    for (int n = 1; n <= 12; ++n) expected += (n == 1) ? std::min<std::uint64_t>(spec.loops_of_length(n), 1)
                                                       : spec.loops_of_length(n);
    CHECK(g.predecessors(0).size() == expected);

    // every materialized first-return loop shows up in the census of the graph
    CHECK(first_returns_brute(g, 0, 2) == spec.loops_of_length(2));
    CHECK(first_returns_brute(g, 0, 5) == spec.loops_of_length(5));
}

TEST_CASE("bouquet rules") {
    BouquetSpec ceil1;
    ceil1.family = BouquetFamily::CeilPow2OverNsq;
    ceil1.M = 1;
    CHECK(ceil1.loops_of_length(1) == 2);
    CHECK(ceil1.loops_of_length(2) == 1);
    CHECK(ceil1.loops_of_length(9) == 7);
    CHECK(ceil1.loops_of_length(12) == 29);

    BouquetSpec ruette;
    ruette.family = BouquetFamily::Ruette;
    CHECK(ruette.loops_of_length(1) == 1);   // 2^(1-1)
    CHECK(ruette.loops_of_length(4) == 4);   // 2^(4-2)
    CHECK(ruette.loops_of_length(9) == 64);  // 2^(9-3)
    CHECK(ruette.loops_of_length(5) == 0);
}

TEST_CASE("strongly connected components") {
    CHECK(strongly_connected_components(golden_mean()).size() == 1);

    // disjoint union of two full 2-shifts
    DirectedGraph two(4, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}});
    const auto comps = strongly_connected_components(two);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].vertices == std::vector<Vertex>{0, 1});
    CHECK(comps[1].vertices == std::vector<Vertex>{2, 3});

    // chain with no return edges: three wandering singletons
    DirectedGraph chain(3, {{0, 1}, {1, 2}});
    const auto wander = strongly_connected_components(chain);
    REQUIRE(wander.size() == 3);
    for (const auto& c : wander) CHECK(c.wandering);
}

TEST_CASE("period") {
    {
        const DirectedGraph g = full_shift(2);
        CHECK(period(g, strongly_connected_components(g)[0]) == 1);
    }
    {
        const DirectedGraph g = directed_cycle(3);
        CHECK(period(g, strongly_connected_components(g)[0]) == 3);
    }
    {
        const DirectedGraph g = golden_mean();
        CHECK(period(g, strongly_connected_components(g)[0]) == 1); // gcd(1, 2)
    }
    {
        const DirectedGraph g = bidirected_cycle(4);
        CHECK(period(g, strongly_connected_components(g)[0]) == 2);
    }
}

TEST_CASE("period divides every cycle length (brute force up to 12)") {
    for (const DirectedGraph& g : thermodynamic_corpus()) {
        const auto comps = strongly_connected_components(g);
        for (const auto& comp : comps) {
            if (comp.wandering) continue;
            const int p = period(g, comp);
            for (Vertex v : comp.vertices) {
                const auto loops = count_paths_brute(g, v, v, 12);
                for (int len = 1; len <= 12; ++len)
                    if (loops[len] > 0) CHECK(len % p == 0);
            }
        }
    }
}

TEST_CASE("spectral decomposition") {
    {
        const DirectedGraph g = directed_cycle(3);
        const auto dec = spectral_decomposition(g, strongly_connected_components(g)[0]);
        CHECK(dec.period == 3);
        CHECK(dec.classes == std::vector<std::vector<Vertex>>{{0}, {1}, {2}});
    }
    {
        const DirectedGraph g = full_shift(2);
        const auto dec = spectral_decomposition(g, strongly_connected_components(g)[0]);
        CHECK(dec.period == 1);
        CHECK(dec.classes[0] == std::vector<Vertex>{0, 1});
    }
    {
        const DirectedGraph g = bidirected_cycle(4);
        const auto dec = spectral_decomposition(g, strongly_connected_components(g)[0]);
        CHECK(dec.period == 2);
        CHECK(dec.classes[0] == std::vector<Vertex>{0, 2});
        CHECK(dec.classes[1] == std::vector<Vertex>{1, 3});
    }
}

TEST_CASE("spectral decomposition class-edge property, full scan") {
    for (const DirectedGraph& g : thermodynamic_corpus()) {
        const auto comps = strongly_connected_components(g);
        for (const auto& comp : comps) {
            if (comp.wandering) continue;
            const auto dec = spectral_decomposition(g, comp); // verifies internally
            std::size_t covered = 0;
            for (const auto& cls : dec.classes) covered += cls.size();
            CHECK(covered == comp.vertices.size());
        }
    }
}

TEST_CASE("serialize round-trip is the identity") {
    for (const DirectedGraph& g : thermodynamic_corpus()) {
        const json j = serialize_graph(g);
        const DirectedGraph back = realize_graph(parse_graph_source(j));
        CHECK(back.vertex_count() == g.vertex_count());
        CHECK(back.edge_list() == g.edge_list());
        CHECK(serialize_graph(back).dump() == j.dump()); // byte-stable
    }
}

TEST_CASE("acyclic component has no period") {
    DirectedGraph chain(3, {{0, 1}, {1, 2}});
    const auto comps = strongly_connected_components(chain);
    CHECK_THROWS_AS(period(chain, comps[0]), Error);
}
