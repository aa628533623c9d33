#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "sprshift/errors.hpp"

namespace sprshift {

// Periodic orbit carrying scalar observable values or 2x2 invertible
// matrices, one per step; the orbit measure is uniform unless weighted
// inside an ensemble.
struct CocycleOrbit {
    std::vector<double> values;           // scalar case, size = period
    std::vector<Eigen::Matrix2d> steps;   // matrix case, size = period
    double weight = 1.0;                  // ensemble weight

    int period_length() const {
        return static_cast<int>(values.empty() ? steps.size() : values.size());
    }
    bool scalar() const { return !values.empty(); }
};

struct PlissResult {
    std::vector<int> points;   // orbit indices whose forward sums stay above beta*j
    double measure = 0;        // fraction of the orbit in the Pliss set
    double lower_bound = 0;    // (mean - beta - kappa ||phi - A||_inf) / (A - beta)
    bool bound_holds = false;
    int checked_horizon = 0;   // j range that certified "for all j >= 0"
};

// Pliss points of a periodic scalar orbit under the relaxed hypothesis
// nu{phi > A} <= kappa. The "for all j" condition is decided exactly: past
// the stabilization horizon the per-period drift dominates the worst dip.
PlissResult pliss_points(const CocycleOrbit& orbit, double beta, double A, double kappa);

struct TemperedEnvelope {
    std::vector<double> envelope;  // Pi_eps at each orbit point
    double c0 = 0;                 // max |log Pi(Tx) - log Pi(x)|
    double tail_factor = 0;        // 4 max(c0/eps, 1)
    bool tail_holds = false;       // nu{Pi_eps > t} <= factor * nu{Pi > t} at all jumps
    int window = 0;                // |n| range that attained the sup, certified
};

// Pi_eps(x) = sup_n e^{-|n| eps} Pi(T^n x), exact on a periodic orbit.
TemperedEnvelope tempered_envelope(const std::vector<double>& pi_values, double eps);

struct PesinCertificate {
    double chi = 0, eps = 0;
    double K = 0;                           // optimal constant over the window
    std::vector<double> K_at;               // pointwise K_* along the orbit
    std::vector<Eigen::Vector2d> stable;    // E^s directions per point
    std::vector<Eigen::Vector2d> unstable;  // E^u directions per point
    bool tempered = false;                  // e^{-eps} K_*(x) <= K_*(Tx) <= e^{eps} K_*(x)
    int window_n = 0, window_k = 0;
};

// Optimal Pesin bound of a 2x2 hyperbolic cocycle over a periodic orbit:
// splitting from the eigen-directions of the return matrix, K_* as the max
// over the (n, k) window of the defining ratios. Errors when the return
// matrix has non-real or unit-modulus eigenvalues.
PesinCertificate optimal_pesin_constant(const CocycleOrbit& orbit, double chi, double eps,
                                        int window_periods = 3);

struct PesinBlockComparison {
    double measure_outside_block = 0;  // nu(M \ Lambda_{n0})
    double measure_outside_pliss = 0;  // nu(M \ P_{n0})
    double factor = 0;                 // 4 max(c0/eps, 1)
    double C = 0;                      // block threshold, max step norms up to n0
    bool holds = false;
    bool vacuous = false;              // no Pliss point in the ensemble
};

// Prop-style comparison on an ensemble of periodic matrix orbits:
// Lambda_{n0} = {Pi_eps <= C} vs the n0-step Pliss set.
PesinBlockComparison pliss_set_to_block(const std::vector<CocycleOrbit>& ensemble, int n0,
                                        double chi, double eps);

} // namespace sprshift
