// analysis.hpp - Jacobian of the density-matrix fixed-point map, its spectral
// radius, and the upper bounds built from norms and higher gaps.
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "scfconv/mat_ops.hpp"
#include "scfconv/problems.hpp"
#include "scfconv/scf.hpp"

namespace scfconv {

// ---------------------------------------------------------------------------
// Gap structure
// ---------------------------------------------------------------------------

/// One occupied/virtual pair, 0-based indices into the ascending spectrum.
struct CrossPair {
    Index occ = 0;
    Index virt = 0;
    double gap = 0.0;  // lambda_virt - lambda_occ > 0
};

struct GapStructure {
    Index n = 0;
    Index p = 0;
    // All p(n-p) cross pairs sorted by (gap, occ, virt): pairs[j-1].gap is delta_j.
    std::vector<CrossPair> pairs;

    Index count() const { return static_cast<Index>(pairs.size()); }
    // delta_j for j = 1..count()+1; delta_{count()+1} = +inf.
    double delta(Index j) const;
    std::vector<double> deltas() const;
    // Omega_q as 0-based (row, col) index pairs of R, both orientations of each of
    // the q smallest-gap pairs, listed (virt, occ) then (occ, virt).
    std::vector<std::pair<Index, Index>> omega(Index q) const;
};

GapStructure gap_structure(const VecR& lambdas, Index p);

// ---------------------------------------------------------------------------
// Jacobian
// ---------------------------------------------------------------------------

/// J = sign * T (conj(X) kron X) diag(vec(W)) (X^T kron X^H) L'.
/// Step filter: W = R (reciprocal gaps), sign = -1.
/// Fermi filter: W = R_f (divided differences of f), sign = +1.
struct JacobianBundle {
    MatC J;        // m x m
    bool dense_route = false;  // which assembly produced J
    MatR weights;  // W; D = diag(vec(W))
    double sign = -1.0;
    LPrime lprime;
    MatC X;
    VecR lambdas;
    Index p = 0;

    Index n() const { return X.rows(); }
    Index m() const { return J.rows(); }
    // ||D||_2 = max |W_ij|
    double d_norm() const { return weights.cwiseAbs().maxCoeff(); }
};

struct JacobianOptions {
    // Materialize the Kronecker factors when n <= dense_cap; otherwise form the
    // columns as -vech(X (W o (X^H L(vech_inv(e_j)) X)) X^H).
    Index dense_cap = 16;
};

JacobianBundle assemble_jacobian(const FixedPointBundle& fp, const LPrime& lprime, const JacobianOptions& opts = {});
JacobianBundle assemble_jacobian(const MatC& X, const VecR& lambdas, Index p, const LPrime& lprime,
                                 const JacobianOptions& opts = {});

/// Columnwise assembly with an arbitrary weight matrix W (no size cap). Columns
/// of L' that are zero give zero columns of J without further work.
MatC jacobian_structured(const MatC& X, const MatR& weights, double sign, const LPrime& lprime);

/// Same product with every Kronecker factor formed densely. O(n^6); small n only.
MatC jacobian_dense(const MatC& X, const MatR& weights, double sign, const LPrime& lprime);

/// Fermi-Dirac version: W = R_f(beta, mu) evaluated on the fixed-point spectrum.
JacobianBundle fermi_jacobian(const FixedPointBundle& fp, const LPrime& lprime, double beta, double mu,
                              const JacobianOptions& opts = {});

/// The Fermi Jacobian above holds mu fixed. When mu is re-solved so that
/// trace(P) = p (as the Fermi SCF map does), each column picks up
/// dmu * vech(dP/dmu) with dP/dmu = X diag(-f') X^H and dmu = -trace(dP) / trace(dP/dmu).
/// Returns J unchanged when trace(dP/dmu) underflows (the step-filter limit).
MatC fermi_jacobian_trace_constrained(const JacobianBundle& fermi, double beta, double mu);

/// Central-difference Jacobian of vech(Psi(.)) along the m real symmetric
/// directions vech_inv(e_j). step <= 0 selects 1e-5 (1 + ||P*||_F).
MatC jacobian_fd(const Problem& problem, const HermitianMatrix& P_star, double step = 0.0,
                 const ScfFilter& filter = {});

/// Real-linear Jacobian of Psi over Hermitian matrices, by central differences.
/// Coordinates follow vech order: one (real) coordinate per diagonal entry, two
/// (Re, Im) per strictly-lower entry, n^2 in total.
MatR jacobian_fd_realified(const Problem& problem, const HermitianMatrix& P_star, double step = 0.0,
                           const ScfFilter& filter = {});

// max_j ||a_j - b_j|| / ||a_j|| over the columns of a; columns with ||a_j|| <
// floor are measured relative to floor instead.
double max_column_relative_error(const MatC& a, const MatC& b, double floor = 1e-8);

// ---------------------------------------------------------------------------
// Convergence factor and bounds
// ---------------------------------------------------------------------------

double convergence_factor(const MatC& J);
double bound_c2(const MatC& J);
double bound_naive(const LPrime& lprime, double delta1);

struct CyclicBounds {
    double c2a = 0.0;  // ||D (X^T kron X^H) L' T||_2
    double c2b = 0.0;  // ||L' T (conj(X) kron X) D||_2
};
CyclicBounds bound_cyclic(const JacobianBundle& jb);

// Matrix L' T (conj(X) kron X) D restricted to its nonzero columns, in the order
// of `pairs`; column (l, m) is vec(L(S(x_l x_m^H))) * W(l, m). Only the rows in
// the row support of L' are stored (the others are zero).
struct CyclicColumns {
    Index n = 0;
    std::vector<Index> rows;                     // vec indices of the stored rows
    MatC block;                                  // rows.size() x pairs.size()
    std::vector<std::pair<Index, Index>> pairs;  // (l, m), 0-based

    VecC column(std::size_t k) const;  // full n^2 column
};
CyclicColumns cyclic_b_columns(const JacobianBundle& jb);

// ||L(S(x_l x_m^H))||_F
double outer_product_action(const OperatorSpec& op, const MatC& X, Index l, Index m);

/// Higher-gap bound for q = 0..count(): ||L'||/delta_{q+1} + sum over Omega_q.
double bound_gap(const JacobianBundle& jb, const OperatorSpec& op, const GapStructure& gaps, Index q);
// All q = 0..count() at once (same values as bound_gap).
std::vector<double> bound_gap_all(const JacobianBundle& jb, const OperatorSpec& op, const GapStructure& gaps);

/// ||T (conj(X) kron X) D_k (X^T kron X^H) L'||_2 where D_k keeps only the
/// entries of D indexed by Omega_k; k = count() reproduces c2.
double bound_rank_truncated(const JacobianBundle& jb, const GapStructure& gaps, Index k);

/// 2 alpha sqrt(n) ||A0^{-1}||_2 / delta_1, needs meta.alpha.
double bound_liu(const Problem& problem, double delta1);

/// Spectral radii of J and of its cyclic rearrangements
///   K D K^H L' T,  D K^H L' T K,  K^H L' T K D,  L' T K D K^H   (K = conj(X) kron X),
/// which all share the nonzero spectrum. Dense; small n only.
std::vector<double> cyclic_spectral_radii(const JacobianBundle& jb);

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct ConvergenceReport {
    Index n = 0;
    Index p = 0;
    double c = 0.0;
    double c2 = 0.0;
    double c2a = 0.0;
    double c2b = 0.0;
    double c_naive = 0.0;
    std::vector<double> c_gap;    // q = 0..p(n-p)
    std::optional<double> c_liu;  // Laplacian families
    std::vector<double> c_tilde;  // k = 1..k_max
    GapStructure gaps;
};

struct ReportOptions {
    Index k_max = 4;  // rank-truncated bounds computed for k = 1..min(k_max, p(n-p))
    JacobianOptions jacobian;
};

ConvergenceReport convergence_report(const Problem& problem, const FixedPointBundle& fp,
                                     const ReportOptions& opts = {});
ConvergenceReport convergence_report(const Problem& problem, const JacobianBundle& jb, const ReportOptions& opts = {});

}  // namespace scfconv
