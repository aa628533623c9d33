#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sprshift/measure.hpp"
#include "sprshift/rng.hpp"
#include "sprshift/spectral.hpp"

namespace sprshift {

// Handle for an ensemble of stationary chains: replica r regenerates
// bit-exactly from substream (seed, r), so nothing is stored.
struct TrajectoryBatch {
    const MarkovMeasure* measure = nullptr;
    long n = 0;
    int replicas = 1;
    std::uint64_t seed = 0;
};

struct StatReport {
    std::string name;
    double estimate = 0;
    double reference = 0;
    std::string reference_provenance;
    double tolerance = 0;
    std::optional<double> standard_error;
    bool pass = false;
    long n = 0;
    int replicas = 0;
    std::uint64_t seed = 0;
    std::string notes;

    // distribution curve for external plotting, when the check has one
    std::vector<double> curve_x, curve_empirical, curve_reference;
};

// Observable compiled for the sampling inner loop; range <= 2.
struct CompiledObservable {
    int range = 1;
    std::vector<double> vertex_values;          // range 1
    std::vector<double> edge_values;            // range 2, row-major V x V
    double sup = 0;

    double step_value(Vertex from, Vertex to) const {
        return range == 1 ? vertex_values[from]
                          : edge_values[std::size_t(from) * stride + to];
    }
    std::size_t stride = 0;
};

CompiledObservable compile_observable(const MarkovMeasure& m, const CylinderPotential& psi,
                                      bool centered);

// Inverse-CDF sampler over sorted successors, stationary start.
class ChainSampler {
public:
    explicit ChainSampler(const MarkovMeasure& m);
    Vertex initial(CounterRng& rng) const;
    Vertex step(Vertex at, CounterRng& rng) const;

private:
    std::vector<double> initial_cdf_;
    std::vector<std::vector<double>> step_cdf_;  // per vertex, over sorted successors
    const DirectedGraph* graph_;
};

// Runs body(replica) for 0..R-1 on the worker pool; bodies must write only
// to their own replica's slots so results are thread-count independent.
void parallel_replicas(int R, const std::function<void(int)>& body);

// psi_n per replica; parallel, deterministic.
std::vector<double> replica_final_sums(const TrajectoryBatch& batch,
                                       const CompiledObservable& psi);

struct EmpiricalVariance {
    double sigma2 = 0;          // Var(psi_n) / n over the replicas
    double standard_error = 0;  // gaussian-scale error of the estimate
};

// Monte Carlo route to the asymptotic variance; centers psi internally.
EmpiricalVariance empirical_variance(const TrajectoryBatch& batch, const CylinderPotential& psi);

std::vector<StatReport> clt_check(const TrajectoryBatch& batch, const CylinderPotential& psi,
                                  double sigma);

StatReport arcsine_check(const TrajectoryBatch& batch, const CylinderPotential& psi, double sigma,
                         const std::vector<double>& s_grid);

StatReport records_check(const TrajectoryBatch& batch, const CylinderPotential& psi, double sigma,
                         const std::vector<double>& s_grid);

struct LilOptions {
    double c = 0.5;
    long n = 10000000;
    int trajectories = 100;
    long k_min = 1000;
};

// (i) running max of S_k / (sigma sqrt(2 k log log k)) against the soft
// bracket [0.7, 1.3]; (ii) the Strassen occupation fraction at fixed N
// averaged over trajectories, against 1 - e^{-4(c^{-2}-1)}.
std::vector<StatReport> lil_strassen_check(const MarkovMeasure& m, const CylinderPotential& psi,
                                           double sigma, const LilOptions& opt,
                                           std::uint64_t seed);

std::vector<StatReport> fclt_check(const TrajectoryBatch& batch, const CylinderPotential& psi,
                                   double sigma);

StatReport laplace_transform_check(const TrajectoryBatch& batch, const CylinderPotential& psi,
                                   double sigma, std::complex<double> z);

// one sampling pass shared across the evaluation points
std::vector<StatReport> laplace_transform_checks(const TrajectoryBatch& batch,
                                                 const CylinderPotential& psi, double sigma,
                                                 const std::vector<std::complex<double>>& zs);

struct LdpOptions {
    double a = 0.2;
    std::vector<int> n_grid = {64, 128, 256, 512, 1024};
    double tolerance = 0.10;
    int mc_replicas = 20000;    // Monte Carlo fallback for non-lattice observables
    std::uint64_t mc_seed = 1;
};

// Exact tilted tails by convolution over the chain-state x sum lattice when
// the observable is lattice-valued, importance-tilted Monte Carlo otherwise;
// the slope of (1/n) log mu[psi_n >= na] against the rate function.
StatReport ldp_empirical(const MarkovMeasure& m, const CylinderPotential& psi,
                         double rate_at_a, const LdpOptions& opt);

// Exact tail probabilities mu[psi_n >= n a] for lattice observables.
std::vector<double> exact_upper_tails(const MarkovMeasure& m, const CylinderPotential& psi,
                                      double a, const std::vector<int>& n_grid);

// mu[psi_n >= n a] sampled under the tilted equilibrium chain with exact
// per-path likelihood-ratio weights.
std::vector<double> importance_tilted_tails(const MarkovMeasure& m, const CylinderPotential& psi,
                                            double a, const std::vector<int>& n_grid,
                                            int replicas, std::uint64_t seed);

struct ErgodicityScan {
    std::vector<double> t;
    std::vector<double> delta;        // |mu(psi) - nu_t(psi)|
    std::vector<double> entropy_drop; // h(mu) - h(nu_t)
    double fitted_K = 0;              // max Delta / sqrt(entropy drop)
    double sharp_ratio = 0;           // Delta / sqrt(2 sigma^2 dh) at |t| = t_probe
    double t_probe = 0.05;
    StatReport report;
};

// Tilted equilibrium family nu_t of t*psi against the MME: the square-root
// entropy-deficit inequality with fitted constant, and the sharp small-t ratio.
ErgodicityScan effective_ergodicity_scan(const DirectedGraph& g, const CylinderPotential& psi,
                                         const std::vector<double>& t_grid);

StatReport empirical_tail_check(const MarkovMeasure& m, Vertex a,
                                const std::vector<double>& exact_survival, int n_max,
                                long samples, std::uint64_t seed);

// worker pool size: SPR_SHIFT_THREADS, else hardware concurrency
int worker_count();

} // namespace sprshift
