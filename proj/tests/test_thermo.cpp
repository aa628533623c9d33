#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "corpus.hpp"
#include "sprshift/measure.hpp"
#include "sprshift/perron.hpp"
#include "sprshift/rng.hpp"
#include "sprshift/spectral.hpp"

using namespace sprshift;
using namespace sprshift::testing;

TEST_CASE("parry measure: full 2-shift is the fair coin") {
    const MarkovMeasure m = parry_measure(full_shift(2));
    CHECK(m.lambda == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(m.initial[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(m.initial[1] == doctest::Approx(0.5).epsilon(1e-12));
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) CHECK(m.transition(u, v) == doctest::Approx(0.5));
    CHECK(m.entropy == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("parry measure: golden mean against the 2x2 eigen-oracle") {
    const MarkovMeasure m = parry_measure(golden_mean());
    const double lam = golden_lambda();
    CHECK(std::abs(m.lambda - lam) < 1e-10);
    CHECK(std::abs(m.transition(0, 0) - 1.0 / lam) < 1e-10);
    CHECK(std::abs(m.transition(0, 1) - 1.0 / (lam * lam)) < 1e-10);
    CHECK(std::abs(m.transition(1, 0) - 1.0) < 1e-10);
    CHECK(std::abs(m.initial[0] - lam * lam / (lam * lam + 1.0)) < 1e-10);
    CHECK(std::abs(m.entropy - std::log(lam)) < 1e-10);
}

TEST_CASE("parry measure: directed 3-cycle is uniform with zero entropy") {
    const MarkovMeasure m = parry_measure(directed_cycle(3));
    for (int v = 0; v < 3; ++v) CHECK(m.initial[v] == doctest::Approx(1.0 / 3));
    CHECK(m.entropy == doctest::Approx(0.0));
}

TEST_CASE("parry rejects reducible graphs") {
    DirectedGraph two(4, {{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}});
    CHECK_THROWS_AS(parry_measure(two), Error);
}

TEST_CASE("cylinder masses") {
    const MarkovMeasure full = parry_measure(full_shift(2));
    {
        const Vertex word[] = {0, 1};
        const CylinderMass cm = cylinder_mass(full, word);
        CHECK(cm.value == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(cm.eigen_value == doctest::Approx(0.25).epsilon(1e-12));
    }
    {
        const CylinderMass cm = cylinder_mass(full, {});
        CHECK(cm.value == 1.0);
    }
    const MarkovMeasure gm = parry_measure(golden_mean());
    {
        const Vertex word[] = {0, 1, 0};
        const CylinderMass cm = cylinder_mass(gm, word);
        const double expected = gm.initial[0] * gm.transition(0, 1) * gm.transition(1, 0);
        CHECK(cm.value == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(cm.value - cm.eigen_value) < 1e-12);
    }
    {
        const Vertex word[] = {1, 1};
        const CylinderMass cm = cylinder_mass(gm, word);
        CHECK(!cm.admissible);
        CHECK(cm.value == 0.0);
    }
}

TEST_CASE("cylinder masses sum to one over words of each length") {
    for (const DirectedGraph& g : {golden_mean(), full_shift(2), house()}) {
        const MarkovMeasure m = parry_measure(g);
        std::vector<std::vector<Vertex>> words;
        for (Vertex v = 0; v < g.vertex_count(); ++v) words.push_back({v});
        for (int len = 1; len <= 8; ++len) {
            double total = 0;
            for (const auto& w : words) total += m.mass(w);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
            std::vector<std::vector<Vertex>> next;
            for (const auto& w : words)
                for (Vertex v : g.successors(w.back())) {
                    auto e = w;
                    e.push_back(v);
                    next.push_back(std::move(e));
                }
            words = std::move(next);
        }
    }
}

TEST_CASE("equilibrium of the zero potential is the MME") {
    for (const DirectedGraph& g : {golden_mean(), full_shift(2), house()}) {
        const MarkovMeasure mme = parry_measure(g);
        const Equilibrium eq = equilibrium_measure(g, CylinderPotential::constant(0.0, g));
        CHECK(std::abs(eq.pressure - std::log(mme.lambda)) < 1e-10);
        for (int u = 0; u < g.vertex_count(); ++u) {
            CHECK(eq.measure.initial[u] == doctest::Approx(mme.initial[u]).epsilon(1e-9));
            for (int v = 0; v < g.vertex_count(); ++v)
                CHECK(eq.measure.transition(u, v) ==
                      doctest::Approx(mme.transition(u, v)).epsilon(1e-9));
        }
    }
}

TEST_CASE("equilibrium of the Bernoulli tilt, closed form") {
    const DirectedGraph g = full_shift(2);
    for (double t : {-0.8, 0.3, 1.2}) {
        const Equilibrium eq = equilibrium_measure(g, CylinderPotential::indicator(0, g, t));
        CHECK(eq.pressure == doctest::Approx(std::log(1 + std::exp(t))).epsilon(1e-11));
        const double p = std::exp(t) / (1 + std::exp(t));
        CHECK(eq.measure.initial[0] == doctest::Approx(p).epsilon(1e-10));
        for (int u = 0; u < 2; ++u) {
            CHECK(eq.measure.transition(u, 0) == doctest::Approx(p).epsilon(1e-10));
            CHECK(eq.measure.transition(u, 1) == doctest::Approx(1 - p).epsilon(1e-10));
        }
    }
}

TEST_CASE("equilibrium of a constant potential shifts the pressure only") {
    const DirectedGraph g = golden_mean();
    const MarkovMeasure mme = parry_measure(g);
    const Equilibrium eq = equilibrium_measure(g, CylinderPotential::constant(0.37, g));
    CHECK(eq.pressure == doctest::Approx(std::log(mme.lambda) + 0.37).epsilon(1e-10));
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v)
            CHECK(eq.measure.transition(u, v) == doctest::Approx(mme.transition(u, v)).epsilon(1e-10));
}

TEST_CASE("higher block recode shapes") {
    {
        const HigherBlockRecode rc = higher_block_recode(golden_mean(), 3);
        CHECK(rc.block_graph.vertex_count() == 3); // 00, 01, 10
        CHECK(rc.block_graph.edge_count() == 5);
    }
    {
        const HigherBlockRecode rc = higher_block_recode(full_shift(2), 3);
        CHECK(rc.block_graph.vertex_count() == 4);
        CHECK(rc.block_graph.edge_count() == 8);
    }
    {
        const HigherBlockRecode rc = higher_block_recode(golden_mean(), 2);
        CHECK(rc.block_graph.vertex_count() == 2); // identity
    }
}

TEST_CASE("higher block recode preserves cylinder masses") {
    const DirectedGraph g = golden_mean();
    const HigherBlockRecode rc = higher_block_recode(g, 3);
    const MarkovMeasure mme = parry_measure(g);
    const MarkovMeasure block_mme = parry_measure(rc.block_graph);
    // block vertex = 2-word: the block 1-cylinder is the original 2-cylinder
    for (Vertex b = 0; b < rc.block_graph.vertex_count(); ++b) {
        const std::vector<Vertex> word = rc.words[b];
        const Vertex bw[] = {b};
        CHECK(block_mme.mass(bw) == doctest::Approx(mme.mass(word)).epsilon(1e-9));
    }
    // block 2-cylinders are original 3-cylinders
    for (Vertex b = 0; b < rc.block_graph.vertex_count(); ++b)
        for (Vertex c : rc.block_graph.successors(b)) {
            std::vector<Vertex> word = rc.words[b];
            word.push_back(rc.words[c].back());
            const Vertex bw[] = {b, c};
            CHECK(block_mme.mass(bw) == doctest::Approx(mme.mass(word)).epsilon(1e-9));
        }
}

TEST_CASE("sinai reduction re-anchors two-sided windows") {
    {
        // psi(x) = x_{-1} x_0 with symbols +-1 encoded by vertex id 0 -> +1, 1 -> -1
        std::map<std::vector<Vertex>, double> table;
        for (Vertex a = 0; a < 2; ++a)
            for (Vertex b = 0; b < 2; ++b)
                table[{a, b}] = (a == 0 ? 1.0 : -1.0) * (b == 0 ? 1.0 : -1.0);
        const CylinderPotential psi(2, table, -1);
        const SinaiReduction red = sinai_reduction(psi);
        CHECK(red.shift == 1);
        CHECK(red.one_sided.offset() == 0);
        CHECK(red.one_sided.range() == 2);
        // identical distribution under the stationary measure
        const MarkovMeasure m = parry_measure(full_shift(2));
        CHECK(m.mean(red.one_sided) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(red.telescope_bound == doctest::Approx(2.0));
    }
    {
        std::map<std::vector<Vertex>, double> table{{{0}, 0.5}, {{1}, -0.5}};
        const CylinderPotential psi(1, table, 0);
        const SinaiReduction red = sinai_reduction(psi);
        CHECK(red.shift == 0);
        CHECK(red.telescope_bound == 0.0);
    }
    {
        // a two-sided coboundary u - u o sigma with u reading x_{-1}:
        // the reduction keeps the Birkhoff sums bounded by the same telescope
        std::map<std::vector<Vertex>, double> table;
        for (Vertex a = 0; a < 2; ++a)
            for (Vertex b = 0; b < 2; ++b)
                table[{a, b}] = (a == 0 ? 1.0 : 0.0) - (b == 0 ? 1.0 : 0.0);
        const CylinderPotential cob(2, table, -1);
        const SinaiReduction red = sinai_reduction(cob);
        CounterRng rng(5, 0);
        std::vector<Vertex> orbit{0};
        for (int k = 0; k < 300; ++k) orbit.push_back(rng.next_u64() & 1);
        double sum = 0;
        for (int j = 1; j + 1 < static_cast<int>(orbit.size()); ++j) {
            const Vertex w[] = {orbit[j], orbit[j + 1]};
            sum += red.one_sided.value(w);
            CHECK(std::abs(sum) <= 2.0 + 1e-12); // telescoping coboundary sums
        }
    }
}

TEST_CASE("sinai telescope bound along sampled orbits") {
    const DirectedGraph g = full_shift(2);
    const MarkovMeasure m = parry_measure(g);
    std::map<std::vector<Vertex>, double> table;
    for (Vertex a = 0; a < 2; ++a)
        for (Vertex b = 0; b < 2; ++b)
            table[{a, b}] = (a == 0 ? 1.0 : -1.0) * (b == 0 ? 1.0 : -1.0);
    const CylinderPotential psi(2, table, -1);
    const SinaiReduction red = sinai_reduction(psi);

    // walk a pseudo-random orbit; Birkhoff sums of psi (windows at -1..0)
    // and psi-tilde (windows at 0..1) differ by at most the telescope bound
    CounterRng rng(11, 0);
    std::vector<Vertex> orbit{0};
    for (int k = 0; k < 200; ++k) orbit.push_back(rng.next_u64() & 1);
    double s_two_sided = 0, s_one_sided = 0;
    for (int j = 1; j + 1 < static_cast<int>(orbit.size()); ++j) {
        const Vertex wa[] = {orbit[j - 1], orbit[j]};
        const Vertex wb[] = {orbit[j], orbit[j + 1]};
        s_two_sided += psi.value(wa);
        s_one_sided += red.one_sided.value(wb);
        CHECK(std::abs(s_two_sided - s_one_sided) <= red.telescope_bound + 1e-12);
    }
}

TEST_CASE("transfer operator is normalized and has the right gap") {
    {
        const TransferOperator op = transfer_operator(parry_measure(full_shift(2)));
        CHECK(op.normalization_defect < 1e-12);
        const SpectralGap gap = spectral_gap(op);
        CHECK(gap.period == 1);
        CHECK(gap.subleading == doctest::Approx(0.0).epsilon(1e-12));
    }
    {
        const TransferOperator op = transfer_operator(parry_measure(golden_mean()));
        const SpectralGap gap = spectral_gap(op);
        const double expected = (std::sqrt(5.0) - 1.0) / (std::sqrt(5.0) + 1.0);
        CHECK(std::abs(gap.subleading - expected) < 1e-9);
    }
    {
        const TransferOperator op = transfer_operator(parry_measure(directed_cycle(3)));
        const SpectralGap gap = spectral_gap(op);
        CHECK(gap.period == 3);
        CHECK(gap.peripheral.size() == 3);
        CHECK(gap.subleading == doctest::Approx(0.0).epsilon(1e-12)); // 3-step operator
    }
}

TEST_CASE("subleading modulus matches a dense eigensolver on the corpus") {
    for (const DirectedGraph& g : {golden_mean(), full_shift(3), house()}) {
        const MarkovMeasure m = parry_measure(g);
        const TransferOperator op = transfer_operator(m);
        const SpectralGap gap = spectral_gap(op);

        Eigen::EigenSolver<Eigen::MatrixXd> es(m.transition);
        std::vector<double> mods;
        for (int i = 0; i < es.eigenvalues().size(); ++i)
            mods.push_back(std::abs(es.eigenvalues()[i]));
        std::sort(mods.rbegin(), mods.rend());
        CHECK(std::abs(gap.subleading - mods[1]) < 1e-8);
    }
}

TEST_CASE("pressure curve: Bernoulli closed form pointwise to 1e-10") {
    const DirectedGraph g = full_shift(2);
    const CylinderPotential zero = CylinderPotential::constant(0.0, g);
    const CylinderPotential ind = CylinderPotential::indicator(0, g);
    std::vector<double> grid;
    for (int i = -20; i <= 20; ++i) grid.push_back(i * 0.1);
    const PressureCurve curve = pressure_curve(g, zero, ind, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(std::abs(curve.value[i] - std::log(1 + std::exp(grid[i]))) < 1e-10);
    CHECK(curve.max_convexity_defect <= 1e-9);
}

TEST_CASE("pressure curve: t = 0 recovers the entropy, constants are affine") {
    const DirectedGraph g = golden_mean();
    const CylinderPotential zero = CylinderPotential::constant(0.0, g);
    {
        const CylinderPotential dir = CylinderPotential::indicator(1, g);
        const PressureCurve curve = pressure_curve(g, zero, dir, {0.0});
        CHECK(curve.value[0] == doctest::Approx(std::log(golden_lambda())).epsilon(1e-10));
    }
    {
        const CylinderPotential cdir = CylinderPotential::constant(0.4, g);
        const PressureCurve curve = pressure_curve(g, zero, cdir, {-1.0, 0.0, 1.0, 2.0});
        const double h = std::log(golden_lambda());
        for (std::size_t i = 0; i < curve.t.size(); ++i)
            CHECK(curve.value[i] == doctest::Approx(h + 0.4 * curve.t[i]).epsilon(1e-9));
    }
}

TEST_CASE("asymptotic variance three constructions agree") {
    const DirectedGraph g = full_shift(2);
    const MarkovMeasure m = parry_measure(g);
    const TransferOperator op = transfer_operator(m);
    const SpectralGap gap = spectral_gap(op);
    const CylinderPotential zero = CylinderPotential::constant(0.0, g);

    SUBCASE("plus-minus one coin has variance 1") {
        const CylinderPotential pm = CylinderPotential::from_vertex_values({1.0, -1.0});
        const VarianceResult gk = green_kubo_variance(m, pm, gap);
        const VarianceResult lr = linear_response_variance(g, zero, pm);
        CHECK(gk.sigma2 == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(gk.sigma2 - lr.sigma2) <= 1e-6 * std::max(1.0, gk.sigma2));
    }
    SUBCASE("indicator has variance 1/4 = P''(0)") {
        const CylinderPotential ind = CylinderPotential::indicator(0, g);
        const VarianceResult gk = green_kubo_variance(m, ind, gap);
        const VarianceResult lr = linear_response_variance(g, zero, ind);
        CHECK(gk.sigma2 == doctest::Approx(0.25).epsilon(1e-10));
        CHECK(std::abs(gk.sigma2 - lr.sigma2) <= 1e-6);
    }
    SUBCASE("coboundary has zero variance and zero obstructions") {
        // u = 1_[0], psi = u - u o sigma, a range-2 table
        std::map<std::vector<Vertex>, double> table;
        for (Vertex a = 0; a < 2; ++a)
            for (Vertex b = 0; b < 2; ++b)
                table[{a, b}] = (a == 0 ? 1.0 : 0.0) - (b == 0 ? 1.0 : 0.0);
        const CylinderPotential cob(2, table);
        const VarianceResult gk = green_kubo_variance(m, cob, gap);
        CHECK(gk.sigma2 <= 1e-8);
        const ObstructionScan scan = coboundary_obstruction_scan(g, cob, 10, m.mean(cob));
        CHECK(scan.max_abs <= 1e-10);
    }
}

TEST_CASE("variance on a periodic graph uses the p-block form") {
    const DirectedGraph g = bidirected_cycle(4);
    const MarkovMeasure m = parry_measure(g);
    const TransferOperator op = transfer_operator(m);
    const SpectralGap gap = spectral_gap(op);
    CHECK(gap.period == 2);
    const CylinderPotential ind = CylinderPotential::indicator(0, g);
    const VarianceResult gk = green_kubo_variance(m, ind, gap);
    CHECK(gk.sigma2 >= 0);
    const CylinderPotential zero = CylinderPotential::constant(0.0, g);
    const VarianceResult lr = linear_response_variance(g, zero, ind);
    CHECK(std::abs(gk.sigma2 - lr.sigma2) <= 1e-6 * std::max(1.0, gk.sigma2));
}

TEST_CASE("rate function: binary entropy closed form") {
    const DirectedGraph g = full_shift(2);
    const CylinderPotential zero = CylinderPotential::constant(0.0, g);
    const CylinderPotential pm_half = CylinderPotential::from_vertex_values({0.5, -0.5});
    auto Lambda = [&](double t) { return pressure_at(g, zero, pm_half, t) - std::log(2.0); };

    std::vector<double> s_grid;
    for (int i = -40; i <= 40; ++i) s_grid.push_back(i * 0.01);
    const RateFunction rf = rate_function(Lambda, 0.25, s_grid, 40.0);

    auto closed = [](double s) {
        const double a = 0.5 + s, b = 0.5 - s;
        return std::log(2.0) + a * std::log(a) + b * std::log(b);
    };
    for (std::size_t i = 0; i < s_grid.size(); ++i) {
        const double s = s_grid[i];
        if (std::abs(s) > 0.45) continue;
        const double expected = (s == 0) ? 0.0 : closed(s);
        CHECK(std::abs(rf.value[i] - expected) < 1e-6);
    }
    CHECK(std::abs(rf.value[40]) < 1e-10); // I(0) = 0
    CHECK(rf.curvature_at_zero == doctest::Approx(4.0).epsilon(0.05));
    const double i02 = rf.value[60]; // s = 0.2
    CHECK(i02 == doctest::Approx(0.0823).epsilon(0.002));
}

TEST_CASE("return-time tails") {
    SUBCASE("full 2-shift: exactly 2^-n") {
        const MarkovMeasure m = parry_measure(full_shift(2));
        const ReturnTimeTail tail = return_time_tail(m, 0, 30);
        for (int n = 1; n <= 30; ++n) {
            CHECK(tail.survival[n - 1] == std::ldexp(1.0, -n)); // exact dyadic
            CHECK(tail.survival_from_base[n - 1] == std::ldexp(1.0, -n));
        }
        CHECK(tail.theta == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("directed 3-cycle: deterministic return at 3 from the base") {
        const MarkovMeasure m = parry_measure(directed_cycle(3));
        const ReturnTimeTail tail = return_time_tail(m, 0, 5);
        CHECK(tail.survival_from_base[0] == doctest::Approx(1.0));
        CHECK(tail.survival_from_base[1] == doctest::Approx(1.0));
        CHECK(tail.survival_from_base[2] == doctest::Approx(0.0));
        CHECK(tail.survival[0] == doctest::Approx(2.0 / 3));
        CHECK(tail.survival[1] == doctest::Approx(1.0 / 3));
        CHECK(tail.survival[2] == doctest::Approx(0.0));
    }
    SUBCASE("golden mean at a = 1: geometric with ratio 1/lambda") {
        const MarkovMeasure m = parry_measure(golden_mean());
        const ReturnTimeTail tail = return_time_tail(m, 1, 20);
        const double ratio = 1.0 / golden_lambda();
        for (int n = 2; n <= 20; ++n)
            CHECK(tail.survival[n - 1] / tail.survival[n - 2] ==
                  doctest::Approx(ratio).epsilon(1e-10));
        CHECK(tail.theta == doctest::Approx(ratio).epsilon(1e-10));
    }
    SUBCASE("zero-mass base rejected") {
        const MarkovMeasure m = parry_measure(full_shift(2));
        MarkovMeasure crippled = m;
        crippled.initial[0] = 0;
        CHECK_THROWS_AS(return_time_tail(crippled, 0, 4), Error);
    }
}

TEST_CASE("periodic-orbit obstructions detect non-coboundaries") {
    const DirectedGraph g = full_shift(2);
    const MarkovMeasure m = parry_measure(g);
    const CylinderPotential ind = CylinderPotential::indicator(0, g);
    const ObstructionScan scan = coboundary_obstruction_scan(g, ind, 10, m.mean(ind));
    CHECK(scan.max_abs >= 0.5 - 1e-12); // fixed point 000... gives |1 - 1/2|
    const ObstructionScan flat =
        coboundary_obstruction_scan(g, CylinderPotential::constant(0.3, g), 10, 0.3);
    CHECK(flat.max_abs <= 1e-12);
}

TEST_CASE("exponential decay of correlations with the measured gap") {
    for (const DirectedGraph& g : {golden_mean(), full_shift(2), house()}) {
        const MarkovMeasure m = parry_measure(g);
        const TransferOperator op = transfer_operator(m);
        const SpectralGap gap = spectral_gap(op);
        if (gap.period != 1) continue;
        const CylinderPotential f = CylinderPotential::indicator(0, g);
        const std::vector<double> cov = covariance_sequence(m, f, f, 50);
        const double rho = std::max(gap.subleading, 1e-4);
        double C = 1e-12;
        for (int n = 1; n <= 10; ++n) C = std::max(C, std::abs(cov[n]) / std::pow(rho, n));
        for (int n = 11; n <= 50; ++n)
            CHECK(std::abs(cov[n]) <= (C * 1.0000001) * std::pow(rho, n) + 1e-280);
    }
}

TEST_CASE("golden mean correlation ratio equals the subleading ratio to 1e-6") {
    const MarkovMeasure m = parry_measure(golden_mean());
    const CylinderPotential f = CylinderPotential::indicator(0, m.graph);
    const std::vector<double> cov = covariance_sequence(m, f, f, 51);
    const double expected = (std::sqrt(5.0) - 1.0) / (std::sqrt(5.0) + 1.0);
    for (int n = 10; n <= 50; ++n) {
        const double ratio = std::abs(cov[n + 1]) / std::abs(cov[n]);
        CHECK(std::abs(ratio - expected) < 1e-6);
    }
}

TEST_CASE("period-2 class correlations decay with the 2-step gap") {
    const DirectedGraph g = bidirected_cycle(4);
    const MarkovMeasure m = parry_measure(g);
    const TransferOperator op = transfer_operator(m);
    const SpectralGap gap = spectral_gap(op);
    REQUIRE(gap.period == 2);

    // 2-step chain restricted to the class of vertex 0
    const std::vector<Vertex> cls = op.period_class;
    Eigen::MatrixXd P2 = m.transition * m.transition;
    const int k = static_cast<int>(cls.size());
    std::vector<std::pair<Vertex, Vertex>> edges;
    Eigen::MatrixXd sub(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            sub(i, j) = P2(cls[i], cls[j]);
            if (sub(i, j) > 0) edges.emplace_back(i, j);
        }
    MarkovMeasure two_step;
    two_step.graph = DirectedGraph(k, std::move(edges));
    two_step.transition = sub;
    two_step.initial = Eigen::VectorXd(k);
    double mass = 0;
    for (int i = 0; i < k; ++i) mass += m.initial[cls[i]];
    for (int i = 0; i < k; ++i) two_step.initial[i] = m.initial[cls[i]] / mass;
    two_step.lambda = 1;
    two_step.validate();

    std::vector<double> f_vals(k);
    for (int i = 0; i < k; ++i) f_vals[i] = (cls[i] == 0) ? 1.0 : 0.0;
    const CylinderPotential f = CylinderPotential::from_vertex_values(f_vals);
    const std::vector<double> cov = covariance_sequence(two_step, f, f, 40);
    const double theta = std::max(gap.subleading, 1e-6);
    double C = 1e-12;
    for (int n = 1; n <= 8; ++n) C = std::max(C, std::abs(cov[n]) / std::pow(theta, n));
    for (int n = 9; n <= 40; ++n)
        CHECK(std::abs(cov[n]) <= (C + 1.0) * std::pow(theta, n) + 1e-280);
}

TEST_CASE("variational principle against 100 random Markov measures") {
    for (const DirectedGraph& g : {golden_mean(), full_shift(2)}) {
        const CylinderPotential phi = CylinderPotential::indicator(0, g, 0.4);
        const Equilibrium eq = equilibrium_measure(g, phi);
        CounterRng rng(1234, 0);
        for (int trial = 0; trial < 100; ++trial) {
            // random transition matrix supported on the edges
            const int V = g.vertex_count();
            Eigen::MatrixXd P = Eigen::MatrixXd::Zero(V, V);
            for (Vertex u = 0; u < V; ++u) {
                double row = 0;
                for (Vertex v : g.successors(u)) {
                    const double w = 0.05 + rng.next_unit();
                    P(u, v) = w;
                    row += w;
                }
                for (Vertex v : g.successors(u)) P(u, v) /= row;
            }
            // stationary vector of P
            Eigen::VectorXd pi = Eigen::VectorXd::Ones(V) / V;
            for (int it = 0; it < 20000; ++it) pi = P.transpose() * pi;
            pi /= pi.sum();
            double h = 0, mean_phi = 0;
            for (Vertex u = 0; u < V; ++u)
                for (Vertex v : g.successors(u)) {
                    if (P(u, v) > 0) h -= pi[u] * P(u, v) * std::log(P(u, v));
                    const Vertex w[] = {u};
                    mean_phi += pi[u] * P(u, v) * phi.value(w);
                }
            CHECK(h + mean_phi <= eq.pressure + 1e-9);
        }
    }
}
