// linalg.hpp - norms and spectra of (mostly sparse-patterned) dense matrices
#pragma once

#include <vector>

#include "scfconv/types.hpp"

namespace scfconv {

// Indices of columns (rows) that contain at least one nonzero entry.
std::vector<Index> nonzero_columns(const MatC& a);
std::vector<Index> nonzero_rows(const MatC& a);

// a(rows, cols)
MatC gather(const MatC& a, const std::vector<Index>& rows, const std::vector<Index>& cols);

/// Largest singular value. Exactly-zero rows and columns are dropped first and
/// the norm is taken from the Gram matrix of the smaller side.
double spectral_norm(const MatC& a);

/// max |eigenvalue| of a square matrix. An index whose row or column is exactly
/// zero only contributes a zero eigenvalue, so those are removed before the
/// dense nonsymmetric eigensolve.
double spectral_radius(const MatC& a);

// All eigenvalues, zero-padded to a.rows() after the same reduction.
VecC eigenvalues_general(const MatC& a);

}  // namespace scfconv
