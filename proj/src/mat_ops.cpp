#include "scfconv/mat_ops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace scfconv {

Index triangular_dimension(Index m) {
    if (m < 0) throw DimensionError("triangular_dimension: negative length");
    const auto n = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(m) + 1.0) - 1.0) / 2.0));
    if (HalfVector::length(n) != m) {
        std::ostringstream os;
        os << "half-vector length " << m << " is not a triangular number n(n+1)/2";
        throw DimensionError(os.str());
    }
    return n;
}

HalfVector vech(const MatC& w) {
    if (w.rows() != w.cols()) throw DimensionError("vech: matrix not square");
    const Index n = w.rows();
    HalfVector out{n, VecC(HalfVector::length(n))};
    Index k = 0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) out.entries(k++) = w(i, j);
    return out;
}

MatC vech_inv(const HalfVector& v) {
    if (v.entries.size() != HalfVector::length(v.n))
        throw DimensionError("vech_inv: entries do not match n(n+1)/2");
    const Index n = v.n;
    MatC w(n, n);
    Index k = 0;
    for (Index j = 0; j < n; ++j) {
        for (Index i = j; i < n; ++i) {
            w(i, j) = v.entries(k);
            w(j, i) = v.entries(k);
            ++k;
        }
    }
    return w;
}

MatC vech_inv(const VecC& v) { return vech_inv(HalfVector{triangular_dimension(v.size()), v}); }

MatC vech_unit(Index n, Index j) {
    const Index m = HalfVector::length(n);
    if (j < 0 || j >= m) throw DimensionError("vech_unit: index out of range");
    MatC w = MatC::Zero(n, n);
    Index col = 0;
    Index start = 0;
    while (start + (n - col) <= j) {
        start += n - col;
        ++col;
    }
    const Index row = col + (j - start);
    w(row, col) = 1.0;
    w(col, row) = 1.0;
    return w;
}

VecC vec(const MatC& w) { return Eigen::Map<const VecC>(w.data(), w.size()); }

MatC unvec(const VecC& v, Index n) {
    if (v.size() != n * n) throw DimensionError("unvec: length is not n^2");
    return Eigen::Map<const MatC>(v.data(), n, n);
}

SelectorT::SelectorT(Index n) : n_(n) {
    if (n < 1) throw DimensionError("selector_T: n must be >= 1");
    map_.reserve(static_cast<std::size_t>(HalfVector::length(n)));
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) map_.push_back(j * n + i);
}

VecC SelectorT::apply(const VecC& v) const {
    if (v.size() != cols()) throw DimensionError("SelectorT::apply: length is not n^2");
    VecC out(rows());
    for (Index r = 0; r < rows(); ++r) out(r) = v(vec_index(r));
    return out;
}

MatC SelectorT::apply(const MatC& m) const {
    if (m.rows() != cols()) throw DimensionError("SelectorT::apply: row count is not n^2");
    MatC out(rows(), m.cols());
    for (Index r = 0; r < rows(); ++r) out.row(r) = m.row(vec_index(r));
    return out;
}

MatC SelectorT::apply_right(const MatC& m) const {
    if (m.cols() != rows()) throw DimensionError("SelectorT::apply_right: column count is not m");
    MatC out = MatC::Zero(m.rows(), cols());
    for (Index r = 0; r < rows(); ++r) out.col(vec_index(r)) = m.col(r);
    return out;
}

MatR SelectorT::dense() const {
    MatR t = MatR::Zero(rows(), cols());
    for (Index r = 0; r < rows(); ++r) t(r, vec_index(r)) = 1.0;
    return t;
}

MatC symmetrize(const MatC& x) {
    if (x.rows() != x.cols()) throw DimensionError("symmetrize: matrix not square");
    MatC out = x.triangularView<Eigen::Lower>();
    out.triangularView<Eigen::StrictlyUpper>() = x.triangularView<Eigen::StrictlyLower>().transpose();
    return out;
}

MatC kron(const MatC& a, const MatC& b) {
    MatC out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigenpairs eigh_ascending(const HermitianMatrix& b) {
    Eigen::SelfAdjointEigenSolver<MatC> es(b.matrix());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh_ascending: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

double homo_lumo_gap(const VecR& lambdas, Index p) {
    if (p < 1 || p >= lambdas.size()) throw ValidationError("occupation count p must satisfy 1 <= p < n");
    return lambdas(p) - lambdas(p - 1);
}

void require_gap(const VecR& lambdas, Index p, const char* context) {
    const double gap = homo_lumo_gap(lambdas, p);
    const double scale = lambdas.cwiseAbs().maxCoeff();
    if (gap <= 1e-12 * scale) {
        std::ostringstream os;
        if (context) os << context << ": ";
        os << "zero gap: lambda_p = " << lambdas(p - 1) << " and lambda_{p+1} = " << lambdas(p)
           << " (p = " << p << ") coincide; the occupied subspace is not unique and delta != 0 is required";
        throw ZeroGapError(os.str());
    }
}

HermitianMatrix density_from_eigenvectors(const MatC& x, Index p) {
    const auto x1 = x.leftCols(p);
    return HermitianMatrix::hermitized(x1 * x1.adjoint());
}

HermitianMatrix spectral_filter_density(const HermitianMatrix& b, Index p) {
    if (p < 1 || p >= b.n()) throw ValidationError("spectral_filter_density: need 1 <= p < n");
    const Eigenpairs eig = eigh_ascending(b);
    require_gap(eig.lambdas, p, "spectral_filter_density");
    return density_from_eigenvectors(eig.X, p);
}

double fermi_occupation(double t, double mu, double beta) {
    return 0.5 * (1.0 - std::tanh(0.5 * beta * (t - mu)));
}

double fermi_occupation_derivative(double t, double mu, double beta) {
    const double c = std::cosh(0.5 * beta * (t - mu));
    return -0.25 * beta / (c * c);
}

namespace {

double fermi_trace(const VecR& lambdas, double mu, double beta) {
    double s = 0.0;
    for (Index i = 0; i < lambdas.size(); ++i) s += fermi_occupation(lambdas(i), mu, beta);
    return s;
}

// (f(a) - f(b)) / (a - b) without cancellation for nearby a, b.
double fermi_divided_difference(double a, double b, double mu, double beta) {
    if (a == b) return fermi_occupation_derivative(a, mu, beta);
    const double half = 0.5 * beta * (a - b);
    if (std::abs(half) > 20.0)
        return (fermi_occupation(a, mu, beta) - fermi_occupation(b, mu, beta)) / (a - b);
    // tanh(x) - tanh(y) = sinh(x - y) / (cosh x cosh y)
    const double ca = std::cosh(0.5 * beta * (a - mu));
    const double cb = std::cosh(0.5 * beta * (b - mu));
    return -0.5 * std::sinh(half) / (ca * cb * (a - b));
}

}  // namespace

double fermi_chemical_potential(const VecR& lambdas, double beta, Index p) {
    const Index n = lambdas.size();
    if (!(beta > 0.0)) throw std::invalid_argument("fermi_chemical_potential: beta must be > 0");
    if (p < 1 || p >= n) throw ValidationError("fermi_chemical_potential: need 1 <= p < n");
    double lo = lambdas.minCoeff() - 1.0;
    double hi = lambdas.maxCoeff() + 1.0;
    const double target = static_cast<double>(p);
    if (!(fermi_trace(lambdas, lo, beta) < target && fermi_trace(lambdas, hi, beta) > target)) {
        std::ostringstream os;
        os << "fermi_chemical_potential: [" << lo << ", " << hi
           << "] does not bracket trace = " << p << " at beta = " << beta;
        throw std::runtime_error(os.str());
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double g = fermi_trace(lambdas, mid, beta) - target;
        if (g == 0.0 || mid <= lo || mid >= hi) break;
        if (g < 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(g) <= 1e-15 * target && hi - lo <= 1e-15 * std::max(1.0, std::abs(mid))) break;
    }
    return mid;
}

FermiDensity fermi_density_full(const HermitianMatrix& b, double beta, Index p) {
    Eigenpairs eig = eigh_ascending(b);
    const double mu = fermi_chemical_potential(eig.lambdas, beta, p);
    VecR occ(eig.lambdas.size());
    for (Index i = 0; i < occ.size(); ++i) occ(i) = fermi_occupation(eig.lambdas(i), mu, beta);
    HermitianMatrix P = HermitianMatrix::hermitized(eig.X * occ.asDiagonal() * eig.X.adjoint());
    return {std::move(P), mu, std::move(eig)};
}

MatR divided_difference_matrix(const VecR& lambdas, Index p, const DensityFilter& filter) {
    const Index n = lambdas.size();
    if (p < 1 || p >= n) throw ValidationError("divided_difference_matrix: need 1 <= p < n");
    MatR r = MatR::Zero(n, n);
    if (std::holds_alternative<StepFilter>(filter)) {
        require_gap(lambdas, p, "divided_difference_matrix");
        for (Index i = 0; i < p; ++i) {
            for (Index j = p; j < n; ++j) {
                const double v = 1.0 / (lambdas(j) - lambdas(i));
                r(i, j) = v;
                r(j, i) = v;
            }
        }
        return r;
    }
    const auto& f = std::get<FermiFilter>(filter);
    if (!(f.beta > 0.0)) throw std::invalid_argument("divided_difference_matrix: beta must be > 0");
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i)
            r(i, j) = fermi_divided_difference(lambdas(i), lambdas(j), f.mu, f.beta);
    return r;
}

}  // namespace scfconv
