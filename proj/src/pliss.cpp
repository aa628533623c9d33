#include "sprshift/pliss.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sprshift {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double operator_norm(const Eigen::Matrix2d& A) {
    return A.jacobiSvd().singularValues()[0];
}

// Unit eigen-directions of the return matrix; requires real eigenvalues of
// distinct non-unit moduli.
struct Splitting {
    Eigen::Vector2d stable, unstable;
    double lambda_s = 0, lambda_u = 0; // signed eigenvalues, |lambda_s| < |lambda_u|
};

Splitting eigen_splitting(const Eigen::Matrix2d& ret) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(ret);
    const auto vals = es.eigenvalues();
    if (std::abs(vals[0].imag()) > 1e-10 * std::abs(vals[0]) + 1e-300 ||
        std::abs(vals[1].imag()) > 1e-10 * std::abs(vals[1]) + 1e-300)
        fail_pre("optimal_pesin_constant", "return matrix has non-real eigenvalues");
    double m0 = std::abs(vals[0].real()), m1 = std::abs(vals[1].real());
    if (std::abs(m0 - 1.0) < 1e-9 || std::abs(m1 - 1.0) < 1e-9)
        fail_pre("optimal_pesin_constant", "return matrix has unit-modulus eigenvalues");
    if (std::abs(m0 - m1) < 1e-12 * std::max(m0, m1))
        fail_pre("optimal_pesin_constant", "eigenvalue moduli coincide; no hyperbolic splitting");
    int s = m0 < m1 ? 0 : 1;
    Splitting sp;
    sp.lambda_s = vals[s].real();
    sp.lambda_u = vals[1 - s].real();
    sp.stable = es.eigenvectors().col(s).real().normalized();
    sp.unstable = es.eigenvectors().col(1 - s).real().normalized();
    return sp;
}

} // namespace

PlissResult pliss_points(const CocycleOrbit& orbit, double beta, double A, double kappa) {
    if (!orbit.scalar()) fail_pre("pliss_points", "orbit must carry scalar values");
    if (!(beta < A)) fail_pre("pliss_points", "beta must be strictly below A");
    const int q = orbit.period_length();
    const auto& phi = orbit.values;
    for (double v : phi)
        if (!std::isfinite(v)) fail_pre("pliss_points", "unbounded observable");

    int exceed = 0;
    for (double v : phi)
        if (v > A) ++exceed;
    if (double(exceed) / q > kappa + 1e-12)
        fail_pre("pliss_points", "nu{phi > A} exceeds kappa");

    // By periodicity, S_{mq+r} = m * (period drift) + S_r exactly, so
    // "S_j >= 0 for all j >= 0" reduces to j = 1..q: the j = q sum is the
    // drift itself, and a nonnegative drift makes later periods no smaller.
    PlissResult res;
    res.checked_horizon = q;
    for (int i = 0; i < q; ++i) {
        bool pliss = true;
        double s = 0;
        for (int j = 1; j <= q; ++j) {
            s += phi[(i + j - 1) % q] - beta;
            if (s < -1e-12) { pliss = false; break; }
        }
        if (pliss) res.points.push_back(i);
    }
    res.measure = double(res.points.size()) / q;

    double mean = std::accumulate(phi.begin(), phi.end(), 0.0) / q;
    double dev = 0;
    for (double v : phi) dev = std::max(dev, std::abs(v - A));
    res.lower_bound = (mean - beta - kappa * dev) / (A - beta);
    res.bound_holds = res.measure >= res.lower_bound - 1e-12;
    return res;
}

TemperedEnvelope tempered_envelope(const std::vector<double>& pi, double eps) {
    if (eps <= 0) fail_pre("tempered_envelope", "eps must be positive");
    if (pi.empty()) fail_pre("tempered_envelope", "empty orbit");
    for (double v : pi)
        if (!(v > 0) || !std::isfinite(v)) fail_pre("tempered_envelope", "Pi must be positive and finite");
    const int q = static_cast<int>(pi.size());
    const double pmax = *std::max_element(pi.begin(), pi.end());
    const double pmin = *std::min_element(pi.begin(), pi.end());

    TemperedEnvelope out;
    // beyond |n| = n0 the damping already puts terms below min Pi
    const int n0 = static_cast<int>(std::ceil(std::log(pmax / pmin) / eps)) + 1;
    out.window = n0;
    out.envelope.resize(q);
    for (int i = 0; i < q; ++i) {
        double best = 0;
        for (int n = -n0; n <= n0; ++n) {
            const int idx = ((i + n) % q + q) % q;
            best = std::max(best, std::exp(-std::abs(n) * eps) * pi[idx]);
        }
        out.envelope[i] = best;
    }

    out.c0 = 0;
    for (int i = 0; i < q; ++i)
        out.c0 = std::max(out.c0, std::abs(std::log(pi[(i + 1) % q]) - std::log(pi[i])));
    out.tail_factor = 4.0 * std::max(out.c0 / eps, 1.0);

    std::vector<double> jumps = pi;
    jumps.insert(jumps.end(), out.envelope.begin(), out.envelope.end());
    std::sort(jumps.begin(), jumps.end());
    jumps.erase(std::unique(jumps.begin(), jumps.end()), jumps.end());
    out.tail_holds = true;
    for (double t : jumps) {
        int lhs = 0, rhs = 0;
        for (int i = 0; i < q; ++i) {
            if (out.envelope[i] > t) ++lhs;
            if (pi[i] > t) ++rhs;
        }
        if (double(lhs) > out.tail_factor * double(rhs) + 1e-12) out.tail_holds = false;
    }
    return out;
}

namespace {

// norms of the cocycle applied to the propagated eigen-directions:
// s_norm[i][k] = |A^(k)(x_i) v_s(i)|, u_norm[i][k] = |A^(k)(x_i) v_u(i)|
struct CocycleNorms {
    std::vector<std::vector<double>> s_norm, u_norm;
    std::vector<Eigen::Vector2d> vs, vu;
    double lam_s_mod = 0, lam_u_mod = 0;
    int q = 0;
};

CocycleNorms cocycle_norms(const CocycleOrbit& orbit, int k_max) {
    const int q = orbit.period_length();
    Eigen::Matrix2d ret = Eigen::Matrix2d::Identity();
    for (int i = 0; i < q; ++i) ret = orbit.steps[i] * ret;
    const Splitting sp = eigen_splitting(ret);

    CocycleNorms cn;
    cn.q = q;
    cn.lam_s_mod = std::abs(sp.lambda_s);
    cn.lam_u_mod = std::abs(sp.lambda_u);
    cn.vs.resize(q);
    cn.vu.resize(q);
    cn.vs[0] = sp.stable;
    cn.vu[0] = sp.unstable;
    for (int i = 1; i < q; ++i) {
        cn.vs[i] = (orbit.steps[i - 1] * cn.vs[i - 1]).normalized();
        cn.vu[i] = (orbit.steps[i - 1] * cn.vu[i - 1]).normalized();
    }
    cn.s_norm.assign(q, std::vector<double>(k_max + 1, 1.0));
    cn.u_norm.assign(q, std::vector<double>(k_max + 1, 1.0));
    for (int i = 0; i < q; ++i) {
        Eigen::Vector2d s = cn.vs[i], u = cn.vu[i];
        for (int k = 1; k <= k_max; ++k) {
            const Eigen::Matrix2d& step = orbit.steps[(i + k - 1) % q];
            s = step * s;
            u = step * u;
            cn.s_norm[i][k] = s.norm();
            cn.u_norm[i][k] = u.norm();
        }
    }
    return cn;
}

} // namespace

PesinCertificate optimal_pesin_constant(const CocycleOrbit& orbit, double chi, double eps,
                                        int window_periods) {
    if (orbit.scalar()) fail_pre("optimal_pesin_constant", "orbit must carry matrices");
    if (chi <= 0 || eps <= 0) fail_pre("optimal_pesin_constant", "chi and eps must be positive");
    for (const auto& A : orbit.steps)
        if (std::abs(A.determinant()) < 1e-300)
            fail_pre("optimal_pesin_constant", "singular step matrix");
    const int q = orbit.period_length();
    const int K = window_periods * q;
    const CocycleNorms cn = cocycle_norms(orbit, K);

    const double rate_s = -std::log(cn.lam_s_mod) / q;
    const double rate_u = std::log(cn.lam_u_mod) / q;
    if (rate_s < chi - 1e-12 || rate_u < chi - 1e-12)
        fail_pre("optimal_pesin_constant",
                 "cocycle rates fall below chi; the optimal constant is infinite");

    PesinCertificate cert;
    cert.chi = chi;
    cert.eps = eps;
    cert.window_n = K;
    cert.window_k = K;
    cert.stable = cn.vs;
    cert.unstable = cn.vu;
    cert.K_at.resize(q);

    for (int i = 0; i < q; ++i) {
        double best = 0;
        for (int n = -K; n <= K; ++n) {
            const int j = ((i + n) % q + q) % q;
            const double damp = std::exp(-eps * std::abs(n));
            for (int k = 0; k <= K; ++k) {
                const double grow = std::exp(chi * k);
                // ||A^k| E^s(x_j)|| e^{chi k - eps|n|}
                best = std::max(best, cn.s_norm[j][k] * grow * damp);
                // ||A^{-k}| E^u(x_j)|| = 1 / ||A^(k)(x_{j-k}) v_u(x_{j-k})||
                const int jk = ((j - k) % q + q) % q;
                best = std::max(best, grow * damp / cn.u_norm[jk][k]);
            }
        }
        cert.K_at[i] = best;
    }
    cert.K = *std::max_element(cert.K_at.begin(), cert.K_at.end());

    cert.tempered = true;
    for (int i = 0; i < q; ++i) {
        const double here = cert.K_at[i], next = cert.K_at[(i + 1) % q];
        if (next > std::exp(eps) * here * (1 + 1e-9) ||
            next < std::exp(-eps) * here * (1 - 1e-9))
            cert.tempered = false;
    }
    return cert;
}

PesinBlockComparison pliss_set_to_block(const std::vector<CocycleOrbit>& ensemble, int n0,
                                        double chi, double eps) {
    if (n0 < 1) fail_pre("pliss_set_to_block", "n0 must be >= 1");
    if (eps <= 0 || chi <= 0) fail_pre("pliss_set_to_block", "chi and eps must be positive");
    PesinBlockComparison cmp;

    double total_weight = 0;
    for (const auto& orb : ensemble) {
        if (orb.scalar()) fail_pre("pliss_set_to_block", "ensemble must carry matrix orbits");
        total_weight += orb.weight;
    }
    if (total_weight <= 0) fail_pre("pliss_set_to_block", "ensemble weight must be positive");

    // global constants of the comparison
    double c_steps = 0, c0_step = 0;
    for (const auto& orb : ensemble) {
        const int q = orb.period_length();
        for (int i = 0; i < q; ++i) {
            Eigen::Matrix2d fwd = Eigen::Matrix2d::Identity();
            for (int k = 1; k <= n0; ++k) {
                fwd = orb.steps[(i + k - 1) % q] * fwd;
                c_steps = std::max(c_steps, operator_norm(fwd));
                c_steps = std::max(c_steps, operator_norm(fwd.inverse()));
            }
            c0_step = std::max(c0_step, std::log(operator_norm(orb.steps[i])));
            c0_step = std::max(c0_step, std::log(operator_norm(orb.steps[i].inverse())));
        }
    }
    cmp.C = std::max(c_steps, 1.0);
    const double c0 = chi + c0_step;
    cmp.factor = 4.0 * std::max(c0 / eps, 1.0);

    double outside_pliss = 0, outside_block = 0;
    bool any_pliss = false;
    for (const auto& orb : ensemble) {
        const int q = orb.period_length();
        const double point_weight = orb.weight / total_weight / q;

        bool split_ok = true;
        CocycleNorms cn;
        try {
            cn = cocycle_norms(orb, q);
        } catch (const Error&) {
            split_ok = false;
        }

        std::vector<char> in_pliss(q, 0);
        std::vector<double> pi(q, kInf);
        if (split_ok) {
            const double fs = cn.lam_s_mod * std::exp(chi * q);  // per-period factor, stable
            const double fu = std::exp(chi * q) / cn.lam_u_mod;  // per-period factor, unstable
            const int cyc = q / std::gcd(q, n0);
            for (int i = 0; i < q; ++i) {
                // Pliss condition at multiples of n0, decided exactly via the
                // per-period eigen scaling
                bool ok = fs <= 1.0 + 1e-12 && fu <= 1.0 + 1e-12;
                for (int j = 1; ok && j <= cyc; ++j) {
                    const long kn = long(j) * n0;
                    const long m = kn / q;
                    const int r = static_cast<int>(kn % q);
                    const double s_norm = std::pow(cn.lam_s_mod, double(m)) *
                                          cn.s_norm[i][r];
                    if (s_norm > std::exp(-chi * double(kn)) * (1 + 1e-12)) ok = false;
                    const int ir = ((i - r) % q + q) % q;
                    const double u_inv = std::pow(cn.lam_u_mod, -double(m)) / cn.u_norm[ir][r];
                    if (u_inv > std::exp(-chi * double(kn)) * (1 + 1e-12)) ok = false;
                }
                in_pliss[i] = ok;
                if (ok) any_pliss = true;

                // Pi(x) = max(sup_k |A^k|E^s| e^{chi k}, sup_k |A^-k|E^u| e^{chi k})
                if (fs <= 1.0 + 1e-12 && fu <= 1.0 + 1e-12) {
                    double ps = 0, pu = 0;
                    for (int k = 0; k <= q; ++k) {
                        ps = std::max(ps, cn.s_norm[i][k] * std::exp(chi * k));
                        const int ik = ((i - k) % q + q) % q;
                        pu = std::max(pu, std::exp(chi * k) / cn.u_norm[ik][k]);
                    }
                    pi[i] = std::max(ps, pu);
                }
            }
        }

        // tempered envelope of Pi along this orbit; infinite Pi poisons the orbit
        std::vector<double> pi_eps(q, kInf);
        const bool finite = std::all_of(pi.begin(), pi.end(),
                                        [](double v) { return std::isfinite(v); });
        if (finite) {
            const TemperedEnvelope env = tempered_envelope(pi, eps);
            pi_eps = env.envelope;
        }
        for (int i = 0; i < q; ++i) {
            if (!in_pliss[i]) outside_pliss += point_weight;
            if (!(pi_eps[i] <= cmp.C)) outside_block += point_weight;
        }
    }
    cmp.measure_outside_pliss = outside_pliss;
    cmp.measure_outside_block = outside_block;
    cmp.vacuous = !any_pliss;
    cmp.holds = outside_block <= cmp.factor * outside_pliss + 1e-12;
    return cmp;
}

} // namespace sprshift
