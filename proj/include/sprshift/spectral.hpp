#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "sprshift/measure.hpp"

namespace sprshift {

// Normalized Ruelle operator of a Markov measure after range-2 recoding,
// acting on vertex functions: (Lf)(v) = sum_{u->v} g(u,v) f(u) with
// g(u,v) = p_u p_uv / p_v, so L1 = 1 and L* preserves p.
struct TransferOperator {
    Eigen::MatrixXd op;              // op(v,u) = g(u,v) on edges
    Eigen::VectorXd eigenfunction;   // constant 1 after normalization
    Eigen::VectorXd eigenmeasure;    // p
    double normalization_defect = 0; // max_v |sum_u g(u,v) - 1|
    int period = 1;
    std::vector<Vertex> period_class; // cyclic class S_0 of the minimal vertex
};

TransferOperator transfer_operator(const MarkovMeasure& m);

struct SpectralGap {
    double leading = 1.0;
    double subleading = 0;    // rho = |lambda_2| / |lambda_1| of the p-step operator
    int period = 1;
    std::vector<std::complex<double>> peripheral; // p-th roots of unity when p > 1
    double residual = 0;
    bool converged = true;
};

// For period p > 1 the unit-circle spectrum is reported separately and the
// gap refers to the p-step operator on one cyclic class.
SpectralGap spectral_gap(const TransferOperator& op);

// Exact Cov_mu(f, g o sigma^n), n = 0..N, for one-sided potentials of range
// <= 2, by mean-projected propagation (the constant direction is projected
// out after every step, so the geometric decay keeps full relative accuracy).
std::vector<double> covariance_sequence(const MarkovMeasure& m, const CylinderPotential& f,
                                        const CylinderPotential& g, int N);

struct PressureCurve {
    std::vector<double> t;
    std::vector<double> value;          // P(t) = log lambda(t)
    std::vector<char> flagged;          // samples where the eigensolve failed
    double max_convexity_defect = 0;    // most negative second difference, >= 0 if convex
    double max_third_difference = 0;    // smoothness probe
};

// P(t) of the weighted matrix A e^{phi + t psi} over a t grid.
PressureCurve pressure_curve(const DirectedGraph& g, const CylinderPotential& phi,
                             const CylinderPotential& psi, const std::vector<double>& t_grid);

// Single pressure value, long-double eigensolve (used by the differentiation).
double pressure_at(const DirectedGraph& g, const CylinderPotential& phi,
                   const CylinderPotential& psi, double t);

enum class VarianceMethod { GreenKubo, LinearResponse };

struct VarianceResult {
    double sigma2 = 0;
    VarianceMethod method = VarianceMethod::GreenKubo;
    int truncation = 0;          // Green-Kubo series length
    double raw_coarse = 0;       // linear response second differences before
    double raw_fine = 0;         //   Richardson extrapolation, steps 1e-2 / 1e-3
};

// sigma^2 = (1/p)[Var(psi_p) + 2 sum_n Cov(psi_p, psi_p o sigma^{np})],
// truncated when rho^N Var(psi_p) < 1e-12. psi is centered internally.
VarianceResult green_kubo_variance(const MarkovMeasure& m, const CylinderPotential& psi,
                                   const SpectralGap& gap);

// d^2/dt^2 P(phi + t psi) at t = 0; phi is the measure's potential
// (zero for the MME).
VarianceResult linear_response_variance(const DirectedGraph& g, const CylinderPotential& phi,
                                        const CylinderPotential& psi);

struct RateFunction {
    std::vector<double> s;
    std::vector<double> value;     // I(s)
    std::vector<double> maximizer; // argmax t of st - Lambda(t)
    double sigma2 = 0;
    double curvature_at_zero = 0;  // measured I''(0)
    double domain = 0;             // |s| range where 1/2 sigma^-2 <= I'' <= 2 sigma^-2 held
};

// Legendre transform of a centered log-moment generating function.
// Lambda must be convex with Lambda(0) = 0; the maximizer is located by
// ternary search over [-t_span, t_span].
RateFunction rate_function(const std::function<double(double)>& Lambda, double sigma2,
                           const std::vector<double>& s_grid, double t_span);

struct ReturnTimeTail {
    std::vector<double> survival;           // mu[tau_a > n], n = 1..N, stationary start
    std::vector<double> survival_from_base; // same conditioned on x_0 = a
    double theta = 0;                       // fitted tail ratio, < 1
};

// Exact taboo-matrix powers: survival_n = p . Q^n 1 with Q = P minus the
// column of a.
ReturnTimeTail return_time_tail(const MarkovMeasure& m, Vertex a, int N);

struct ObstructionScan {
    double max_abs = 0;          // max |psi_n(x)/n - mu(psi)| over the scanned orbits
    std::size_t orbits_checked = 0;
};

// Periodic-orbit averages against the mean: all closed walks of length <= L.
ObstructionScan coboundary_obstruction_scan(const DirectedGraph& g, const CylinderPotential& psi,
                                            int L, double psi_mean);

} // namespace sprshift
