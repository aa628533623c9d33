#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "sprshift/errors.hpp"

namespace sprshift {

template <typename Scalar>
struct PerronData {
    Scalar lambda = Scalar(0);
    Eigen::Vector<Scalar, Eigen::Dynamic> right;
    Eigen::Vector<Scalar, Eigen::Dynamic> left;
    int iterations = 0;
    Scalar residual = Scalar(0);
};

// Power iteration for the Perron root of an irreducible nonnegative matrix.
// Iterates on (I + A) so periodic matrices converge too; all-ones start,
// Collatz-Wielandt bracket as the stopping rule.
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> perron_vector(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A, Scalar tol, int max_iter,
    int* iterations_out, Scalar* residual_out) {
    using Vec = Eigen::Vector<Scalar, Eigen::Dynamic>;
    const Eigen::Index n = A.rows();
    Vec v = Vec::Ones(n) / Scalar(n);
    Scalar residual = Scalar(0);
    int it = 0;
    for (; it < max_iter; ++it) {
        Vec w = A * v + v;
        const Scalar total = w.sum();
        if (!(total > Scalar(0))) fail_numeric("perron", "iteration collapsed to zero");
        w /= total;
        Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = Scalar(0);
        Vec av = A * w;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w[i] <= Scalar(0)) { lo = Scalar(0); hi = std::numeric_limits<Scalar>::infinity(); break; }
            const Scalar q = av[i] / w[i];
            lo = std::min(lo, q);
            hi = std::max(hi, q);
        }
        v = w;
        if (hi > Scalar(0) && std::isfinite(hi)) {
            residual = (hi - lo) / std::max(hi, Scalar(1e-300));
            if (residual <= tol) break;
        }
    }
    if (it == max_iter)
        fail_numeric("perron", "power iteration did not converge; residual " + std::to_string(double(residual)));
    if (iterations_out) *iterations_out = it;
    if (residual_out) *residual_out = residual;
    return v;
}

template <typename Scalar>
PerronData<Scalar> perron(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& A,
                          Scalar tol = Scalar(1e-12), int max_iter = 100000) {
    PerronData<Scalar> out;
    out.right = perron_vector(A, tol, max_iter, &out.iterations, &out.residual);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> At = A.transpose();
    out.left = perron_vector(At, tol, max_iter, static_cast<int*>(nullptr),
                             static_cast<Scalar*>(nullptr));
    Eigen::Vector<Scalar, Eigen::Dynamic> av = A * out.right;
    out.lambda = out.left.dot(av) / out.left.dot(out.right);
    // normalize: sum l_u r_u = 1, right vector summing to 1
    out.right /= out.right.sum();
    out.left /= out.left.dot(out.right);
    return out;
}

struct SubleadingEstimate {
    double modulus = 0;
    double residual = 0;
    bool converged = true;
};

// Modulus of the subleading eigenvalue: Arnoldi on the deflated operator
// B v = A v - lambda * r (l.v)/(l.r), with the leading direction re-projected
// out after every product so rounding cannot leak it back in.
inline SubleadingEstimate subleading_modulus(const Eigen::MatrixXd& A, double lambda,
                                             const Eigen::VectorXd& r, const Eigen::VectorXd& l) {
    const Eigen::Index n = A.rows();
    SubleadingEstimate est;
    if (n <= 1) return est;
    const double lr = l.dot(r);
    auto deflate = [&](Eigen::VectorXd& v) { v -= r * (l.dot(v) / lr); };
    auto apply = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd w = A * v;
        deflate(w);
        return w;
    };

    const int m = static_cast<int>(std::min<Eigen::Index>(n, 24));
    Eigen::MatrixXd Q(n, m);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q[i] = 1.0 + double(i); // not parallel to r
    deflate(q);
    // burn-in sharpens the Krylov space toward the dominant deflated pair
    for (int k = 0; k < 40; ++k) {
        Eigen::VectorXd w = apply(q);
        const double nw = w.norm();
        if (nw < 1e-280 * std::max(1.0, A.norm())) return est; // rank-one up to roundoff
        q = w / nw;
    }
    int built = 0;
    for (int j = 0; j < m; ++j) {
        Q.col(j) = q;
        Eigen::VectorXd w = apply(q);
        for (int i = 0; i <= j; ++i) {
            H(i, j) = Q.col(i).dot(w);
            w -= H(i, j) * Q.col(i);
        }
        // second orthogonalization pass
        for (int i = 0; i <= j; ++i) {
            const double c = Q.col(i).dot(w);
            H(i, j) += c;
            w -= c * Q.col(i);
        }
        built = j + 1;
        const double nw = w.norm();
        if (j + 1 < m) {
            if (nw < 1e-14 * std::max(1.0, std::abs(lambda))) break; // invariant subspace found
            H(j + 1, j) = nw;
            q = w / nw;
        } else {
            est.residual = nw;
        }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(H.topLeftCorner(built, built).cast<std::complex<double>>());
    double mod = 0;
    for (int i = 0; i < built; ++i) mod = std::max(mod, std::abs(es.eigenvalues()[i]));
    est.modulus = mod;
    est.converged = est.residual <= 1e-9 * std::max(1.0, std::abs(lambda));
    return est;
}

} // namespace sprshift
