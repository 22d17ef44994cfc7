#include "kfplab/flatten.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace kfplab {

namespace {
constexpr double kFdStep = 1e-5;

Eigen::MatrixXd to_eigen(const Matrix& A) {
    const auto n = static_cast<Eigen::Index>(A.size());
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(A[i].size()) != n)
            throw std::invalid_argument("matrix is not square");
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = A[i][j];
    }
    return M;
}

Matrix from_eigen(const Eigen::MatrixXd& M) {
    Matrix A(M.rows(), Vector(M.cols()));
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) A[i][j] = M(i, j);
    return A;
}
}  // namespace

Vector GraphDomain::grad(const Vector& xp) const {
    if (gradient) return gradient(xp);
    Vector g(xp.size());
    Vector u = xp;
    for (std::size_t i = 0; i < xp.size(); ++i) {
        u[i] = xp[i] + kFdStep;
        const double fp = profile(u);
        u[i] = xp[i] - kFdStep;
        const double fm = profile(u);
        u[i] = xp[i];
        g[i] = (fp - fm) / (2 * kFdStep);
    }
    return g;
}

Matrix GraphDomain::hess(const Vector& xp) const {
    if (hessian) return hessian(xp);
    const std::size_t n = xp.size();
    Matrix H(n, Vector(n, 0.0));
    Vector u = xp;
    const double f0 = profile(xp);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = xp[i] + kFdStep;
        const double fp = profile(u);
        u[i] = xp[i] - kFdStep;
        const double fm = profile(u);
        u[i] = xp[i];
        H[i][i] = (fp - 2 * f0 + fm) / (kFdStep * kFdStep);
        for (std::size_t j = i + 1; j < n; ++j) {
            u[i] = xp[i] + kFdStep; u[j] = xp[j] + kFdStep;
            const double fpp = profile(u);
            u[j] = xp[j] - kFdStep;
            const double fpm = profile(u);
            u[i] = xp[i] - kFdStep;
            const double fmm = profile(u);
            u[j] = xp[j] + kFdStep;
            const double fmp = profile(u);
            u[i] = xp[i]; u[j] = xp[j];
            H[i][j] = H[j][i] = (fpp - fpm - fmp + fmm) / (4 * kFdStep * kFdStep);
        }
    }
    return H;
}

FlattenResult flatten_coefficients(const GraphDomain& dom, const Matrix& A,
                                   const Vector& B, const PhasePoint& z) {
    const std::size_t d = z.dim();
    if (d < 1 || A.size() != d || B.size() != d)
        throw std::invalid_argument("flatten_coefficients: dimension mismatch");
    if (!dom.profile) throw std::invalid_argument("flatten_coefficients: profile missing");

    Vector xp(z.x.begin(), z.x.end() - 1);
    double nrm = 0.0;
    for (double c : xp) nrm += c * c;
    if (std::sqrt(nrm) > dom.validity_radius)
        throw std::invalid_argument("flatten_coefficients: point outside chart");

    const Vector g = d > 1 ? dom.grad(xp) : Vector{};
    const Matrix H = d > 1 ? dom.hess(xp) : Matrix{};

    // P' = [ I 0 ; -DP 1 ], unit lower-triangular
    Eigen::MatrixXd Pp = Eigen::MatrixXd::Identity(d, d);
    for (std::size_t j = 0; j + 1 < d; ++j) Pp(d - 1, j) = -g[j];

    Eigen::VectorXd x(d), v(d), Bv(d);
    for (std::size_t i = 0; i < d; ++i) {
        x(i) = z.x[i];
        v(i) = z.v[i];
        Bv(i) = B[i];
    }

    FlattenResult out;
    Eigen::VectorXd y = x;
    y(d - 1) = x(d - 1) - dom.profile(xp);
    Eigen::VectorXd w = Pp * v;
    out.z_hat = PhasePoint(z.t, Vector(y.data(), y.data() + d), Vector(w.data(), w.data() + d));

    const Eigen::MatrixXd Ae = to_eigen(A);
    Eigen::MatrixXd Ah = Pp * Ae * Pp.transpose();
    Ah = 0.5 * (Ah + Ah.transpose());  // keep exact symmetry
    out.A_hat = from_eigen(Ah);

    // B_hat = P' B - v (x) v : D^2 P; only the d-th component of P is curved,
    // with D^2 P_d = -Hess(profile) in the x' block.
    Eigen::VectorXd Bh = Pp * Bv;
    double corr = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i)
        for (std::size_t j = 0; j + 1 < d; ++j) corr += v(i) * v(j) * H[i][j];
    Bh(d - 1) += corr;
    out.B_hat = Vector(Bh.data(), Bh.data() + d);

    out.P_prime = from_eigen(Pp);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Pp);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(d - 1);
    out.chart_constant = std::max(smax * smax, 1.0 / (smin * smin));
    return out;
}

std::pair<double, double> symmetric_eig_range(const Matrix& A) {
    const Eigen::MatrixXd M = to_eigen(A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (M + M.transpose()));
    const auto& ev = es.eigenvalues();
    return {ev(0), ev(ev.size() - 1)};
}

double det_lower_triangular(const Matrix& M) {
    double p = 1.0;
    for (std::size_t i = 0; i < M.size(); ++i) p *= M[i][i];
    return p;
}

}  // namespace kfplab
