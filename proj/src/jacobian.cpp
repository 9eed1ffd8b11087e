#include <cmath>
#include <span>
#include <limits>
#include <sstream>

#include "scfconv/analysis.hpp"
#include "scfconv/kernels.hpp"

namespace scfconv {

MatC jacobian_structured(const MatC& X, const MatR& weights, double sign, const LPrime& lprime) {
    const Index n = X.rows();
    if (weights.rows() != n || weights.cols() != n || lprime.n() != n)
        throw DimensionError("jacobian_structured: dimension mismatch");
    const Index m = HalfVector::length(n);
    const auto sz = static_cast<std::size_t>(n * n);
    MatC J = MatC::Zero(m, m);
    MatC rotated(n, n);
    for (Index j : lprime.col_support()) {
        const MatC b = lprime.column_matrix(j);
        rotated.noalias() = X.adjoint() * b * X;
        kernels::scale_real(std::span<cxd>(rotated.data(), sz), std::span<const double>(weights.data(), sz));
        const MatC back = sign * (X * rotated * X.adjoint());
        J.col(j) = vech(back).entries;
    }
    return J;
}

MatC jacobian_dense(const MatC& X, const MatR& weights, double sign, const LPrime& lprime) {
    const Index n = X.rows();
    if (weights.rows() != n || weights.cols() != n || lprime.n() != n)
        throw DimensionError("jacobian_dense: dimension mismatch");
    const MatC k = kron(X.conjugate(), X);
    const VecR d = Eigen::Map<const VecR>(weights.data(), n * n);
    const MatC inner = d.cast<cxd>().asDiagonal() * (k.adjoint() * lprime.dense());
    return SelectorT(n).apply(MatC(sign * (k * inner)));
}

namespace {

JacobianBundle make_bundle(const MatC& X, const VecR& lambdas, Index p, const LPrime& lprime, MatR weights,
                           double sign, const JacobianOptions& opts) {
    if (X.rows() != lambdas.size() || lprime.n() != X.rows())
        throw DimensionError("assemble_jacobian: eigenvectors, eigenvalues and L' disagree on n");
    JacobianBundle jb;
    jb.dense_route = X.rows() <= opts.dense_cap;
    jb.J = jb.dense_route ? jacobian_dense(X, weights, sign, lprime) : jacobian_structured(X, weights, sign, lprime);
    jb.weights = std::move(weights);
    jb.sign = sign;
    jb.lprime = lprime;
    jb.X = X;
    jb.lambdas = lambdas;
    jb.p = p;
    return jb;
}

}  // namespace

JacobianBundle assemble_jacobian(const MatC& X, const VecR& lambdas, Index p, const LPrime& lprime,
                                 const JacobianOptions& opts) {
    MatR r = divided_difference_matrix(lambdas, p, StepFilter{});
    return make_bundle(X, lambdas, p, lprime, std::move(r), -1.0, opts);
}

JacobianBundle assemble_jacobian(const FixedPointBundle& fp, const LPrime& lprime, const JacobianOptions& opts) {
    return assemble_jacobian(fp.X, fp.lambdas, fp.p, lprime, opts);
}

JacobianBundle fermi_jacobian(const FixedPointBundle& fp, const LPrime& lprime, double beta, double mu,
                              const JacobianOptions& opts) {
    if (!(beta > 0.0)) throw std::invalid_argument("fermi_jacobian: beta must be > 0");
    MatR rf = divided_difference_matrix(fp.lambdas, fp.p, FermiFilter{beta, mu});
    return make_bundle(fp.X, fp.lambdas, fp.p, lprime, std::move(rf), 1.0, opts);
}

MatC fermi_jacobian_trace_constrained(const JacobianBundle& fermi, double beta, double mu) {
    const Index n = fermi.n();
    VecC dfdmu(n);
    for (Index i = 0; i < n; ++i) dfdmu(i) = -fermi_occupation_derivative(fermi.lambdas(i), mu, beta);
    const double denom = dfdmu.real().sum();
    MatC J = fermi.J;
    if (!(denom > std::numeric_limits<double>::min())) return J;
    const VecC dp_dmu = vech(MatC(fermi.X * dfdmu.asDiagonal() * fermi.X.adjoint())).entries;
    for (Index k = 0; k < J.cols(); ++k) {
        cxd trace = 0.0;
        for (Index i = 0; i < n; ++i) trace += J(vech_index(n, i, i), k);
        J.col(k) -= (trace / denom) * dp_dmu;
    }
    return J;
}

namespace {

double default_step(const HermitianMatrix& P_star, double step) {
    return step > 0.0 ? step : 1e-5 * (1.0 + P_star.norm_fro());
}

HermitianMatrix psi_at(const Problem& problem, const MatC& P, const ScfFilter& filter, Index direction) {
    try {
        return scf_step(problem, HermitianMatrix::hermitized(P), filter).P_next;
    } catch (const ZeroGapError& e) {
        std::ostringstream os;
        os << "finite-difference direction " << direction << ": " << e.what();
        throw ZeroGapError(os.str());
    }
}

}  // namespace

MatC jacobian_fd(const Problem& problem, const HermitianMatrix& P_star, double step, const ScfFilter& filter) {
    const Index n = problem.n();
    if (P_star.n() != n) throw DimensionError("jacobian_fd: P* dimension mismatch");
    const Index m = HalfVector::length(n);
    const double h = default_step(P_star, step);
    MatC J(m, m);
    for (Index j = 0; j < m; ++j) {
        const MatC e = vech_unit(n, j);
        const HermitianMatrix plus = psi_at(problem, P_star.matrix() + h * e, filter, j);
        const HermitianMatrix minus = psi_at(problem, P_star.matrix() - h * e, filter, j);
        J.col(j) = (vech(plus).entries - vech(minus).entries) / (2.0 * h);
    }
    return J;
}

MatR jacobian_fd_realified(const Problem& problem, const HermitianMatrix& P_star, double step,
                           const ScfFilter& filter) {
    const Index n = problem.n();
    if (P_star.n() != n) throw DimensionError("jacobian_fd_realified: P* dimension mismatch");
    const double h = default_step(P_star, step);

    // Hermitian basis directions in coordinate order.
    std::vector<MatC> dirs;
    dirs.reserve(static_cast<std::size_t>(n * n));
    for (Index c = 0; c < n; ++c) {
        for (Index r = c; r < n; ++r) {
            MatC e = MatC::Zero(n, n);
            if (r == c) {
                e(r, r) = 1.0;
                dirs.push_back(e);
                continue;
            }
            e(r, c) = 1.0;
            e(c, r) = 1.0;
            dirs.push_back(e);
            MatC ei = MatC::Zero(n, n);
            ei(r, c) = cxd(0.0, 1.0);
            ei(c, r) = cxd(0.0, -1.0);
            dirs.push_back(ei);
        }
    }
    auto coords = [n](const MatC& w) {
        VecR v(n * n);
        Index k = 0;
        for (Index c = 0; c < n; ++c) {
            for (Index r = c; r < n; ++r) {
                if (r == c) {
                    v(k++) = w(r, r).real();
                } else {
                    v(k++) = w(r, c).real();
                    v(k++) = w(r, c).imag();
                }
            }
        }
        return v;
    };
    MatR J(n * n, n * n);
    for (std::size_t j = 0; j < dirs.size(); ++j) {
        const auto jj = static_cast<Index>(j);
        const HermitianMatrix plus = psi_at(problem, P_star.matrix() + h * dirs[j], filter, jj);
        const HermitianMatrix minus = psi_at(problem, P_star.matrix() - h * dirs[j], filter, jj);
        J.col(jj) = (coords(plus.matrix()) - coords(minus.matrix())) / (2.0 * h);
    }
    return J;
}

double max_column_relative_error(const MatC& a, const MatC& b, double floor) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("max_column_relative_error: shape mismatch");
    double worst = 0.0;
    for (Index j = 0; j < a.cols(); ++j) {
        const double denom = std::max(a.col(j).norm(), floor);
        worst = std::max(worst, (a.col(j) - b.col(j)).norm() / denom);
    }
    return worst;
}

}  // namespace scfconv
