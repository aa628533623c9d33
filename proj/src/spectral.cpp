#include "sprshift/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sprshift/perron.hpp"

namespace sprshift {

namespace {

// f as a function of an edge, whatever its declared range (1 or 2).
double edge_value(const CylinderPotential& f, Vertex u, Vertex v) {
    if (f.range() == 1) {
        const Vertex word[] = {u};
        return f.value(word);
    }
    const Vertex word[] = {u, v};
    return f.value(word);
}

void require_range2(const CylinderPotential& f, const char* op) {
    if (f.range() > 2) fail_pre(op, "recode potentials of range > 2 first");
    if (!f.one_sided()) fail_pre(op, "potential must be one-sided");
}

} // namespace

TransferOperator transfer_operator(const MarkovMeasure& m) {
    const int n = m.graph.vertex_count();
    TransferOperator op;
    op.op = Eigen::MatrixXd::Zero(n, n);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : m.graph.successors(u))
            op.op(v, u) = m.initial[u] * m.transition(u, v) / m.initial[v];
    op.eigenfunction = Eigen::VectorXd::Ones(n);
    op.eigenmeasure = m.initial;
    op.normalization_defect = (op.op.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();

    const auto comps = strongly_connected_components(m.graph);
    if (comps.size() != 1) fail_pre("transfer_operator", "measure graph must be irreducible");
    const SpectralDecomposition dec = spectral_decomposition(m.graph, comps[0]);
    op.period = dec.period;
    op.period_class = dec.classes[0];
    return op;
}

SpectralGap spectral_gap(const TransferOperator& op) {
    SpectralGap gap;
    gap.period = op.period;
    const int n = static_cast<int>(op.op.rows());

    Eigen::MatrixXd step = op.op;
    std::vector<int> keep(n);
    for (int i = 0; i < n; ++i) keep[i] = i;

    if (op.period > 1) {
        for (int j = 0; j < op.period; ++j) {
            const double angle = 2.0 * std::numbers::pi * j / op.period;
            gap.peripheral.emplace_back(std::cos(angle), std::sin(angle));
        }
        // restrict the p-step operator to one cyclic class
        Eigen::MatrixXd power = op.op;
        for (int k = 1; k < op.period; ++k) power = op.op * power;
        const std::vector<Vertex>& cls = op.period_class;
        Eigen::MatrixXd sub(cls.size(), cls.size());
        for (std::size_t a = 0; a < cls.size(); ++a)
            for (std::size_t b = 0; b < cls.size(); ++b) sub(a, b) = power(cls[a], cls[b]);
        step = sub;
    } else {
        gap.peripheral.emplace_back(1.0, 0.0);
    }

    const PerronData<double> pd = perron<double>(step);
    gap.leading = pd.lambda;
    const SubleadingEstimate sub = subleading_modulus(step, pd.lambda, pd.right, pd.left);
    gap.subleading = sub.modulus / pd.lambda;
    gap.residual = sub.residual;
    gap.converged = sub.converged;
    return gap;
}

std::vector<double> covariance_sequence(const MarkovMeasure& m, const CylinderPotential& f,
                                        const CylinderPotential& g, int N) {
    require_range2(f, "covariance_sequence");
    require_range2(g, "covariance_sequence");
    const int n = m.graph.vertex_count();
    const Eigen::VectorXd& p = m.initial;
    const Eigen::MatrixXd& P = m.transition;

    // alpha(v) = sum_u p_u P_uv f(u,v); gamma(w) = sum_z P_wz g(w,z)
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n);
    double f_mean = 0, g_mean = 0, fg_mean = 0;
    for (Vertex u = 0; u < n; ++u) {
        for (Vertex v : m.graph.successors(u)) {
            const double w = p[u] * P(u, v);
            const double fv = edge_value(f, u, v);
            const double gv = edge_value(g, u, v);
            alpha[v] += w * fv;
            gamma[u] += P(u, v) * gv;
            f_mean += w * fv;
            g_mean += w * gv;
            fg_mean += w * fv * gv;
        }
    }

    std::vector<double> cov(N + 1);
    cov[0] = fg_mean - f_mean * g_mean;

    auto project = [&](Eigen::VectorXd& w) { w -= Eigen::VectorXd::Ones(n) * p.dot(w); };
    Eigen::VectorXd w = gamma;
    project(w);
    for (int k = 1; k <= N; ++k) {
        cov[k] = alpha.dot(w);
        if (k < N) {
            w = P * w;
            project(w);
        }
    }
    return cov;
}

PressureCurve pressure_curve(const DirectedGraph& g, const CylinderPotential& phi,
                             const CylinderPotential& psi, const std::vector<double>& t_grid) {
    require_range2(phi, "pressure_curve");
    require_range2(psi, "pressure_curve");
    PressureCurve curve;
    curve.t = t_grid;
    curve.value.resize(t_grid.size());
    curve.flagged.assign(t_grid.size(), 0);
    const int n = g.vertex_count();
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v : g.successors(u))
                B(u, v) = std::exp(edge_value(phi, u, v) + t_grid[i] * edge_value(psi, u, v));
        try {
            curve.value[i] = std::log(perron<double>(B).lambda);
        } catch (const Error&) {
            curve.value[i] = std::numeric_limits<double>::quiet_NaN();
            curve.flagged[i] = 1;
        }
    }
    for (std::size_t i = 1; i + 1 < curve.value.size(); ++i) {
        if (curve.flagged[i - 1] || curve.flagged[i] || curve.flagged[i + 1]) continue;
        const double d2 = curve.value[i + 1] - 2 * curve.value[i] + curve.value[i - 1];
        curve.max_convexity_defect = std::max(curve.max_convexity_defect, -d2);
        if (i + 2 < curve.value.size() && !curve.flagged[i + 2]) {
            const double d3 = curve.value[i + 2] - 3 * curve.value[i + 1] + 3 * curve.value[i] -
                              curve.value[i - 1];
            curve.max_third_difference = std::max(curve.max_third_difference, std::abs(d3));
        }
    }
    if (curve.max_convexity_defect > 1e-9)
        fail_numeric("pressure_curve", "convexity defect beyond tolerance");
    return curve;
}

double pressure_at(const DirectedGraph& g, const CylinderPotential& phi,
                   const CylinderPotential& psi, double t) {
    require_range2(phi, "pressure_at");
    require_range2(psi, "pressure_at");
    const int n = g.vertex_count();
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> B(n, n);
    B.setZero();
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v : g.successors(u))
            B(u, v) = std::exp(static_cast<long double>(edge_value(phi, u, v)) +
                               static_cast<long double>(t) * edge_value(psi, u, v));
    const auto pd = perron<long double>(B, 1e-17L, 200000);
    return static_cast<double>(std::log(pd.lambda));
}

VarianceResult green_kubo_variance(const MarkovMeasure& m, const CylinderPotential& psi,
                                   const SpectralGap& gap) {
    require_range2(psi, "asymptotic_variance");
    const int p = gap.period;

    // C(k) = Cov(psi, psi o sigma^k); the p-block aggregates decay like the
    // p-step gap even when C(k) itself does not decay.
    const double rho = std::min(gap.subleading, 0.999999);
    auto block_cov = [&](const std::vector<double>& C, int np) {
        double s = 0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) s += C[std::abs(np + j - i)];
        return s;
    };

    std::vector<double> C = covariance_sequence(m, psi, psi, 2 * p);
    const double var_p = block_cov(C, 0);
    int N = 1;
    if (var_p > 1e-300 && rho > 0) {
        N = static_cast<int>(std::ceil(std::log(1e-12 / var_p) / std::log(rho)));
        N = std::clamp(N, 1, 200000);
    }
    C = covariance_sequence(m, psi, psi, N * p + 2 * p);

    double sigma2 = var_p;
    for (int k = 1; k <= N; ++k) sigma2 += 2.0 * block_cov(C, k * p);
    sigma2 /= p;

    VarianceResult out;
    out.method = VarianceMethod::GreenKubo;
    out.sigma2 = std::max(sigma2, 0.0);
    out.truncation = N;
    return out;
}

VarianceResult linear_response_variance(const DirectedGraph& g, const CylinderPotential& phi,
                                        const CylinderPotential& psi) {
    auto second_difference = [&](double h) {
        const double plus = pressure_at(g, phi, psi, h);
        const double zero = pressure_at(g, phi, psi, 0.0);
        const double minus = pressure_at(g, phi, psi, -h);
        return (plus - 2 * zero + minus) / (h * h);
    };
    VarianceResult out;
    out.method = VarianceMethod::LinearResponse;
    out.raw_coarse = second_difference(1e-2);
    out.raw_fine = second_difference(1e-3);
    // one Richardson step on the h^2 error term
    out.sigma2 = (100.0 * out.raw_fine - out.raw_coarse) / 99.0;
    return out;
}

RateFunction rate_function(const std::function<double(double)>& Lambda, double sigma2,
                           const std::vector<double>& s_grid, double t_span) {
    if (sigma2 <= 0) fail_pre("rate_function", "needs positive asymptotic variance");
    RateFunction rf;
    rf.sigma2 = sigma2;
    rf.s = s_grid;
    rf.value.resize(s_grid.size());
    rf.maximizer.resize(s_grid.size());

    auto legendre = [&](double s, double* argmax) {
        double lo = -t_span, hi = t_span;
        // st - Lambda(t) is strictly concave in t
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            const double f1 = s * m1 - Lambda(m1);
            const double f2 = s * m2 - Lambda(m2);
            if (f1 < f2) lo = m1; else hi = m2;
            if (hi - lo < 1e-13 * std::max(1.0, t_span)) break;
        }
        const double t = 0.5 * (lo + hi);
        if (argmax) *argmax = t;
        return s * t - Lambda(t);
    };

    for (std::size_t i = 0; i < s_grid.size(); ++i)
        rf.value[i] = std::max(0.0, legendre(s_grid[i], &rf.maximizer[i]));

    const double delta = 0.02;
    const double i_plus = legendre(delta, nullptr);
    const double i_minus = legendre(-delta, nullptr);
    const double i_zero = legendre(0.0, nullptr);
    rf.curvature_at_zero = (i_plus - 2 * i_zero + i_minus) / (delta * delta);
    if (std::abs(i_zero) > 1e-10) fail_numeric("rate_function", "I(0) must vanish");

    // measured domain where the curvature bracket of the free-energy lemma holds
    double domain = 0;
    for (std::size_t i = 1; i + 1 < s_grid.size(); ++i) {
        const double ds = s_grid[i + 1] - s_grid[i];
        if (ds <= 0) continue;
        const double d2 = (rf.value[i + 1] - 2 * rf.value[i] + rf.value[i - 1]) / (ds * ds);
        if (d2 < -1e-9) fail_numeric("rate_function", "non-convex Legendre samples");
        const bool bracket = d2 >= 0.5 / sigma2 - 1e-6 && d2 <= 2.0 / sigma2 + 1e-6;
        if (bracket) domain = std::max(domain, std::abs(s_grid[i]));
    }
    rf.domain = domain;
    return rf;
}

ReturnTimeTail return_time_tail(const MarkovMeasure& m, Vertex a, int N) {
    const int n = m.graph.vertex_count();
    if (a < 0 || a >= n) fail_pre("return_time_tail", "vertex out of range");
    if (m.initial[a] <= 0) fail_pre("return_time_tail", "base vertex has zero mass");

    Eigen::MatrixXd Q = m.transition;
    Q.col(a).setZero(); // forbid stepping into a

    ReturnTimeTail out;
    out.survival.resize(N);
    out.survival_from_base.resize(N);
    Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
    for (int k = 1; k <= N; ++k) {
        u = Q * u; // u[v] = P[x_1..x_k != a | x_0 = v]
        out.survival[k - 1] = m.initial.dot(u);
        out.survival_from_base[k - 1] = u[a];
    }
    double theta = 0;
    for (int k = N - 1; k >= 1; --k) {
        if (out.survival[k] > 0 && out.survival[k - 1] > 0) {
            theta = out.survival[k] / out.survival[k - 1];
            break;
        }
    }
    out.theta = theta;
    if (!(theta < 1.0)) fail_numeric("return_time_tail", "tail ratio not below 1");
    return out;
}

namespace {

// Birkhoff sums over one period of a closed walk are edge sums around the
// cycle, wrap edge included, so the running edge-sum is exact for range <= 2.
void scan_walks(const DirectedGraph& g, const CylinderPotential& psi, Vertex start, Vertex at,
                int depth, int L, double sum, double mean, ObstructionScan& out) {
    if (depth > 0 && at == start) {
        out.max_abs = std::max(out.max_abs, std::abs(sum / depth - mean));
        ++out.orbits_checked;
    }
    if (depth == L) return;
    for (Vertex v : g.successors(at))
        scan_walks(g, psi, start, v, depth + 1, L, sum + edge_value(psi, at, v), mean, out);
}

} // namespace

ObstructionScan coboundary_obstruction_scan(const DirectedGraph& g, const CylinderPotential& psi,
                                            int L, double psi_mean) {
    require_range2(psi, "coboundary_obstruction_scan");
    if (L > 12) fail_pre("coboundary_obstruction_scan", "orbit length cap is 12");
    ObstructionScan out;
    for (Vertex s = 0; s < g.vertex_count(); ++s)
        scan_walks(g, psi, s, s, 0, L, 0.0, psi_mean, out);
    return out;
}

} // namespace sprshift
