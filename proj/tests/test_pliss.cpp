#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "pesin_oracle.hpp"
#include "sprshift/pliss.hpp"
#include "sprshift/rng.hpp"

using namespace sprshift;
using sprshift::testing::oracle_pesin_constant;

namespace {

Eigen::Matrix2d rotation(double theta) {
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return R;
}

Eigen::Matrix2d diag(double a, double b) {
    Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
    D(0, 0) = a;
    D(1, 1) = b;
    return D;
}

} // namespace

TEST_CASE("pliss points: period-2 orbit (1, 0)") {
    CocycleOrbit orbit;
    orbit.values = {1.0, 0.0};
    const PlissResult res = pliss_points(orbit, 0.0, 1.0, 0.0);
    CHECK(res.measure == doctest::Approx(1.0)); // both points qualify
    CHECK(res.lower_bound == doctest::Approx(0.5));
    CHECK(res.bound_holds);
}

TEST_CASE("pliss points: classical form at kappa = 0") {
    CocycleOrbit orbit;
    orbit.values = {2.0, -1.0, 1.5, 0.25};
    const double A = 2.0; // ess sup
    const double beta = -0.5;
    const PlissResult res = pliss_points(orbit, beta, A, 0.0);
    const double mean = (2.0 - 1.0 + 1.5 + 0.25) / 4;
    CHECK(res.lower_bound == doctest::Approx((mean - beta) / (A - beta)));
    CHECK(res.bound_holds);
}

TEST_CASE("pliss points: constant observable") {
    CocycleOrbit orbit;
    orbit.values = {0.7, 0.7, 0.7};
    const PlissResult res = pliss_points(orbit, 0.2, 0.7, 0.0);
    CHECK(res.measure == doctest::Approx(1.0));
    CHECK(res.lower_bound <= 1.0 + 1e-12);
}

TEST_CASE("pliss points: negative drift empties the set") {
    CocycleOrbit orbit;
    orbit.values = {0.5, -1.0};
    const PlissResult res = pliss_points(orbit, 0.0, 1.0, 0.0);
    CHECK(res.measure == 0.0);
    CHECK(res.lower_bound <= 0.0);
}

TEST_CASE("pliss preconditions") {
    CocycleOrbit orbit;
    orbit.values = {1.0, 0.0};
    CHECK_THROWS_AS(pliss_points(orbit, 1.0, 1.0, 0.0), Error);  // beta >= A
    CHECK_THROWS_AS(pliss_points(orbit, 0.0, 0.5, 0.0), Error);  // kappa violated
}

TEST_CASE("pliss bound: no counterexample over 1e4 random periodic orbits") {
    CounterRng rng(555, 0);
    int nontrivial = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        CocycleOrbit orbit;
        const int q = 1 + int(rng.next_u64() % 8);
        for (int i = 0; i < q; ++i) orbit.values.push_back(-2.0 + 4.0 * rng.next_unit());
        const double top = *std::max_element(orbit.values.begin(), orbit.values.end());
        const double A = top - 0.6 * rng.next_unit(); // sometimes below the sup
        int above = 0;
        for (double v : orbit.values)
            if (v > A) ++above;
        const double kappa = double(above) / q + 0.05 * rng.next_unit();
        const double beta = A - (0.1 + 2.0 * rng.next_unit());
        const PlissResult res = pliss_points(orbit, beta, A, kappa);
        CHECK(res.bound_holds);
        if (res.lower_bound > 0) ++nontrivial;
    }
    CHECK(nontrivial > 1000); // the sweep must exercise binding bounds
}

TEST_CASE("tempered envelope: c0 <= eps collapses to Pi") {
    const std::vector<double> pi{1.0, 1.1, 1.05};
    const TemperedEnvelope env = tempered_envelope(pi, 1.0);
    CHECK(env.c0 <= 1.0);
    for (int i = 0; i < 3; ++i) CHECK(env.envelope[i] == doctest::Approx(pi[i]).epsilon(1e-12));
    CHECK(env.tail_holds);
}

TEST_CASE("tempered envelope: constant on a fixed point") {
    const TemperedEnvelope env = tempered_envelope({2.5}, 0.3);
    CHECK(env.envelope[0] == doctest::Approx(2.5));
    CHECK(env.c0 == 0.0);
    CHECK(env.tail_holds);
}

TEST_CASE("tempered envelope: period-3 orbit (1, e, e^2) at eps = 1/2") {
    const std::vector<double> pi{1.0, M_E, M_E * M_E};
    const TemperedEnvelope env = tempered_envelope(pi, 0.5);
    CHECK(env.c0 == doctest::Approx(2.0)); // wrap step e^2 -> 1
    // hand enumeration: sup at x_0 reached one step back (T^{-1} x_0 = x_2)
    CHECK(env.envelope[0] == doctest::Approx(std::exp(1.5)).epsilon(1e-12));
    CHECK(env.envelope[1] == doctest::Approx(std::exp(1.5)).epsilon(1e-12));
    CHECK(env.envelope[2] == doctest::Approx(std::exp(2.0)).epsilon(1e-12));
    CHECK(env.tail_factor == doctest::Approx(16.0)); // 4 max(2 / 0.5, 1)
    CHECK(env.tail_holds);
}

TEST_CASE("tempered tail inequality over random orbits and eps in {0.1, 0.5, 1}") {
    CounterRng rng(777, 0);
    for (int trial = 0; trial < 10000; ++trial) {
        const int q = 1 + int(rng.next_u64() % 8);
        std::vector<double> pi;
        for (int i = 0; i < q; ++i) pi.push_back(std::exp(-2.0 + 4.0 * rng.next_unit()));
        for (double eps : {0.1, 0.5, 1.0}) {
            const TemperedEnvelope env = tempered_envelope(pi, eps);
            CHECK(env.tail_holds);
        }
    }
}

TEST_CASE("optimal pesin constant: pure diagonal fixed point gives K = 1") {
    const double chi = 0.4;
    CocycleOrbit orbit;
    orbit.steps = {diag(std::exp(-2 * chi), std::exp(2 * chi))};
    const PesinCertificate cert = optimal_pesin_constant(orbit, chi, 0.1);
    CHECK(cert.K == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cert.tempered);
}

TEST_CASE("optimal pesin constant: rotation-conjugated matrix vs oracle") {
    const double chi = 0.3, eps = 0.2;
    const Eigen::Matrix2d S = rotation(0.7);
    CocycleOrbit orbit;
    orbit.steps = {S * diag(std::exp(-1.0), std::exp(1.0)) * S.inverse()};
    const PesinCertificate cert = optimal_pesin_constant(orbit, chi, eps);
    const double oracle = oracle_pesin_constant(orbit, chi, eps, 3);
    CHECK(cert.K_at[0] == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(cert.tempered);
}

TEST_CASE("optimal pesin constant: alternating diagonal pair vs oracle") {
    const double chi = 0.5;
    CocycleOrbit orbit;
    orbit.steps = {diag(std::exp(-chi), std::exp(chi)),
                   diag(std::exp(-3 * chi), std::exp(3 * chi))};
    const PesinCertificate cert = optimal_pesin_constant(orbit, chi, 0.25);
    const double oracle = oracle_pesin_constant(orbit, chi, 0.25, 6);
    CHECK(cert.K_at[0] == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(cert.tempered);
}

TEST_CASE("optimal pesin constant rejects elliptic return maps") {
    CocycleOrbit orbit;
    orbit.steps = {rotation(0.3)};
    CHECK_THROWS_AS(optimal_pesin_constant(orbit, 0.1, 0.1), Error);

    CocycleOrbit parabolic;
    Eigen::Matrix2d P;
    P << 1, 1, 0, 1;
    parabolic.steps = {P};
    CHECK_THROWS_AS(optimal_pesin_constant(parabolic, 0.1, 0.1), Error);
}

TEST_CASE("random cocycles: K_* matches the oracle and is tempered") {
    CounterRng rng(909, 0);
    int done = 0;
    while (done < 100) {
        const int q = 1 + int(rng.next_u64() % 4);
        const Eigen::Matrix2d S = rotation(2 * M_PI * rng.next_unit());
        CocycleOrbit orbit;
        for (int i = 0; i < q; ++i) {
            const double d = 0.8 + 0.7 * rng.next_unit();
            const double wobble = 0.04 * (rng.next_unit() - 0.5);
            orbit.steps.push_back(rotation(wobble) * S * diag(std::exp(-d), std::exp(d)) *
                                  S.inverse());
        }
        const double chi = 0.35, eps = 0.15;
        PesinCertificate cert;
        try {
            cert = optimal_pesin_constant(orbit, chi, eps);
        } catch (const Error&) {
            continue; // wobble broke hyperbolicity; draw again
        }
        const double oracle = oracle_pesin_constant(orbit, chi, eps, 3 * q);
        CHECK(cert.K_at[0] == doctest::Approx(oracle).epsilon(1e-9));
        CHECK(cert.tempered);
        ++done;
    }
}

TEST_CASE("K_* monotonicity: weaker demands give smaller constants") {
    CounterRng rng(313, 0);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Matrix2d S = rotation(2 * M_PI * rng.next_unit());
        CocycleOrbit orbit;
        const int q = 1 + int(rng.next_u64() % 3);
        for (int i = 0; i < q; ++i) {
            const double d = 1.0 + 0.5 * rng.next_unit();
            orbit.steps.push_back(S * diag(std::exp(-d), std::exp(d)) * S.inverse());
        }
        const PesinCertificate strong = optimal_pesin_constant(orbit, 0.5, 0.1);
        const PesinCertificate weak = optimal_pesin_constant(orbit, 0.3, 0.4);
        CHECK(weak.K <= strong.K + 1e-12);
    }
}

TEST_CASE("pliss set to pesin block: uniformly hyperbolic cocycle") {
    CocycleOrbit orbit;
    orbit.steps = {diag(std::exp(-1.0), std::exp(1.0))};
    const PesinBlockComparison cmp = pliss_set_to_block({orbit}, 2, 0.5, 0.25);
    CHECK(cmp.measure_outside_pliss == 0.0);
    CHECK(cmp.measure_outside_block == 0.0);
    CHECK(cmp.holds);
    CHECK(!cmp.vacuous);
}

TEST_CASE("pliss set to pesin block: neutral stretch keeps the inequality") {
    CocycleOrbit good;
    good.steps = {diag(std::exp(-1.2), std::exp(1.2))};
    CocycleOrbit lazy; // long neutral stretch then a strong correction
    for (int i = 0; i < 5; ++i) lazy.steps.push_back(diag(std::exp(-0.05), std::exp(0.05)));
    lazy.steps.push_back(diag(std::exp(-6.0), std::exp(6.0)));
    const PesinBlockComparison cmp = pliss_set_to_block({good, lazy}, 1, 0.5, 0.25);
    CHECK(cmp.holds);
    CHECK(cmp.measure_outside_pliss > 0.0); // the neutral points are not Pliss at chi = 0.5
}

TEST_CASE("pliss set to pesin block: vacuous when nothing is Pliss") {
    CocycleOrbit weak;
    weak.steps = {diag(std::exp(-0.1), std::exp(0.1))};
    const PesinBlockComparison cmp = pliss_set_to_block({weak}, 1, 1.0, 0.5);
    CHECK(cmp.vacuous);
    CHECK(cmp.holds); // factor >= 4 makes the full-mass comparison trivial
}

TEST_CASE("block comparison over a random ensemble") {
    CounterRng rng(171, 0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<CocycleOrbit> ensemble;
        const int orbits = 1 + int(rng.next_u64() % 3);
        for (int o = 0; o < orbits; ++o) {
            CocycleOrbit orbit;
            const int q = 1 + int(rng.next_u64() % 4);
            const Eigen::Matrix2d S = rotation(2 * M_PI * rng.next_unit());
            for (int i = 0; i < q; ++i) {
                const double d = 0.2 + 1.3 * rng.next_unit();
                orbit.steps.push_back(S * diag(std::exp(-d), std::exp(d)) * S.inverse());
            }
            orbit.weight = 0.5 + rng.next_unit();
            ensemble.push_back(std::move(orbit));
        }
        const PesinBlockComparison cmp = pliss_set_to_block(ensemble, 2, 0.4, 0.2);
        CHECK(cmp.holds);
    }
}
