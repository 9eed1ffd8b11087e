// mat_ops.hpp - half-vectorization algebra, symmetrization and spectral filters
#pragma once

#include <variant>
#include <vector>

#include "scfconv/types.hpp"

namespace scfconv {

// ---------------------------------------------------------------------------
// Half-vectorization
// ---------------------------------------------------------------------------

/// Lower triangle (diagonal included) of an n x n matrix, stacked column by
/// column: (w11, ..., wn1, w22, ..., wn2, ..., wnn).
struct HalfVector {
    Index n = 0;
    VecC entries;

    static constexpr Index length(Index n) { return n * (n + 1) / 2; }
};

// Position of entry (i, j), i >= j, inside vech of an n x n matrix.
constexpr Index vech_index(Index n, Index i, Index j) {
    return j * n - j * (j - 1) / 2 + (i - j);
}

// n such that m = n(n+1)/2; throws DimensionError if m is not triangular.
Index triangular_dimension(Index m);

HalfVector vech(const MatC& w);
inline HalfVector vech(const HermitianMatrix& w) { return vech(w.matrix()); }

/// Inverse of vech. The strict upper triangle is the plain transpose of the strict
/// lower one, so vech_inv(vech(W)) == W only for complex-symmetric W; for a
/// complex Hermitian W the result is the symmetric completion of its lower part.
MatC vech_inv(const HalfVector& v);
MatC vech_inv(const VecC& v);

// vech_inv(e_j) for j in [0, m): E_jj on the diagonal, E_ik + E_ki off it.
MatC vech_unit(Index n, Index j);

// Column-major vec / unvec.
VecC vec(const MatC& w);
MatC unvec(const VecC& v, Index n);

/// The 0/1 selector with vech(W) = T vec(W), stored as an index map: row r of T
/// has its single 1 in column vec_index(r).
class SelectorT {
public:
    explicit SelectorT(Index n);

    Index n() const { return n_; }
    Index rows() const { return static_cast<Index>(map_.size()); }
    Index cols() const { return n_ * n_; }
    Index vec_index(Index row) const { return map_[static_cast<std::size_t>(row)]; }

    VecC apply(const VecC& v) const;             // T v
    MatC apply(const MatC& m) const;             // T M (rows selected)
    MatC apply_right(const MatC& m) const;       // M T (columns scattered)
    MatR dense() const;

private:
    Index n_;
    std::vector<Index> map_;
};

inline SelectorT selector_T(Index n) { return SelectorT(n); }

/// S(L + D + U) = L + D + L^T for the strict-lower / diagonal / strict-upper split.
MatC symmetrize(const MatC& x);

// Dense Kronecker product a (x) b.
MatC kron(const MatC& a, const MatC& b);

// ---------------------------------------------------------------------------
// Spectral decomposition and density matrices
// ---------------------------------------------------------------------------

struct Eigenpairs {
    VecR lambdas;  // ascending
    MatC X;        // orthonormal eigenvectors, column k <-> lambdas(k)
};

Eigenpairs eigh_ascending(const HermitianMatrix& b);

// lambda_{p+1} - lambda_p (p is 1-based occupation count).
double homo_lumo_gap(const VecR& lambdas, Index p);

// Throws ZeroGapError if the occupied/virtual gap is zero relative to the
// spectral scale 1e-12 * max |lambda|. `context` is prepended to the message.
void require_gap(const VecR& lambdas, Index p, const char* context = nullptr);

// X1 X1^H for the first p columns of X.
HermitianMatrix density_from_eigenvectors(const MatC& x, Index p);

/// Orthogonal projector onto the invariant subspace of the p smallest
/// eigenvalues of b, i.e. the step-function filter h(b).
HermitianMatrix spectral_filter_density(const HermitianMatrix& b, Index p);

// Fermi-Dirac occupation 1 / (1 + exp(beta (t - mu))) and its t-derivative.
double fermi_occupation(double t, double mu, double beta);
double fermi_occupation_derivative(double t, double mu, double beta);

/// Chemical potential with sum_i f(lambda_i) = p, by bisection on
/// [lambda_1 - 1, lambda_n + 1]. Throws std::runtime_error if that interval
/// does not bracket the root.
double fermi_chemical_potential(const VecR& lambdas, double beta, Index p);

struct FermiDensity {
    HermitianMatrix P;
    double mu = 0.0;
    Eigenpairs eig;
};

/// Smeared density X f(Lambda) X^H with mu chosen so that trace = p.
FermiDensity fermi_density_full(const HermitianMatrix& b, double beta, Index p);
inline HermitianMatrix fermi_density(const HermitianMatrix& b, double beta, Index p) {
    return fermi_density_full(b, beta, p).P;
}

// ---------------------------------------------------------------------------
// Divided differences
// ---------------------------------------------------------------------------

struct StepFilter {};
struct FermiFilter {
    double beta = 0.0;
    double mu = 0.0;
};
using DensityFilter = std::variant<StepFilter, FermiFilter>;

/// Step filter: the reciprocal-gap matrix R, with 1/|lambda_i - lambda_j| on the
/// occupied/virtual cross pairs and zero elsewhere (the divided differences of
/// the step function are -R).
/// Fermi filter: R_f, the divided differences of f with f'(lambda_i) on the
/// diagonal (entries are <= 0 since f is decreasing).
MatR divided_difference_matrix(const VecR& lambdas, Index p, const DensityFilter& filter);

}  // namespace scfconv
