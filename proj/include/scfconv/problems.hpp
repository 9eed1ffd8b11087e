// problems.hpp - the affine operator A(P) = A0 + L(P) and the benchmark families
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "scfconv/types.hpp"

namespace scfconv {

// ---------------------------------------------------------------------------
// The linear part L
// ---------------------------------------------------------------------------

/// L(P) = mask o P (entrywise).
struct HadamardMask {
    MatC mask;
};

/// L(P) = alpha * Diag(coeff * diag(P)); depends only on the diagonal of P.
struct DiagonalMap {
    MatR coeff;
    double alpha = 1.0;
};

/// vec(L(P)) = matrix * vec(P), matrix is n^2 x n^2.
struct GeneralVec {
    MatC matrix;
};

using OperatorSpec = std::variant<HadamardMask, DiagonalMap, GeneralVec>;

// n the operator acts on; throws DimensionError for malformed data.
Index operator_dimension(const OperatorSpec& op);

std::string operator_kind(const OperatorSpec& op);

MatC apply_L(const OperatorSpec& op, const MatC& p);

// The same map as an explicit n^2 x n^2 matrix, built column by column.
GeneralVec to_general_vec(const OperatorSpec& op);

/// L' in C^{n^2 x m}: column j is vec(L(vech_inv(e_j))).
///
/// Most operators of interest touch few rows and columns (a diagonal map has n
/// nonzero columns out of m and n nonzero rows out of n^2), so only the block on
/// the nonzero row/column support is stored.
class LPrime {
public:
    LPrime() = default;
    LPrime(Index n, std::vector<Index> rows, std::vector<Index> cols, MatC block);

    Index n() const { return n_; }
    Index m() const { return n_ * (n_ + 1) / 2; }
    const std::vector<Index>& row_support() const { return rows_; }
    const std::vector<Index>& col_support() const { return cols_; }
    const MatC& block() const { return block_; }

    bool is_zero() const { return cols_.empty(); }
    MatC dense() const;               // n^2 x m
    VecC column(Index j) const;       // full n^2 column j
    MatC column_matrix(Index j) const;  // unvec(column(j)) = L(vech_inv(e_j))
    // L' v for v in C^m, returned as an n x n matrix.
    MatC apply(const VecC& v) const;
    double norm2() const;

private:
    Index n_ = 0;
    std::vector<Index> rows_;
    std::vector<Index> cols_;
    MatC block_;
};

LPrime assemble_Lprime(const OperatorSpec& op, Index n);

// ---------------------------------------------------------------------------
// Problems
// ---------------------------------------------------------------------------

struct ProblemMeta {
    std::string family;  // "illustrative", "laplacian_complex", "laplacian_real", "random_hadamard", "file"
    std::optional<double> alpha;
    std::optional<double> h;
    std::optional<double> epsilon;
    std::optional<double> d;
    std::optional<std::uint64_t> seed;
};

struct Problem {
    HermitianMatrix A0;
    OperatorSpec op;
    Index p = 0;
    ProblemMeta meta;

    Index n() const { return A0.n(); }

    // A0 + L(P). Throws ValidationError if L(P) is not Hermitian.
    HermitianMatrix A(const HermitianMatrix& P) const;

    // 1 <= p < n, operator dimension matches, Hadamard mask Hermitian.
    void validate() const;
};

inline constexpr double kIllustrativeD = 0.16;

/// A0 = [[0, eps, 0], [eps, 1+d, eps], [0, eps, 10]], L(P) = diag(1, 1, 100) o P, p = 1.
Problem build_illustrative(double epsilon, double d = kIllustrativeD);

enum class LaplacianVariant { complex_convection, real };

/// Tridiagonal 1D operator with 2/h^2 on the diagonal; the complex variant has
/// -1/h^2 + i/(2h) above and -1/h^2 - i/(2h) below the diagonal. L(P) =
/// alpha * Diag(Re(A0)^{-1} diag(P)). h defaults to 1/(n+1).
Problem build_laplacian(Index n, double alpha, Index p, LaplacianVariant variant,
                        std::optional<double> h = std::nullopt);

/// Random Hermitian A0 (complex Gaussian entries) with a random Hermitian
/// Hadamard mask scaled by mask_scale. Deterministic in seed.
Problem build_random_hadamard(Index n, Index p, std::uint64_t seed, double mask_scale = 0.2);

// ---------------------------------------------------------------------------
// JSON problem files
// ---------------------------------------------------------------------------

Problem load_problem(const std::filesystem::path& path);
Problem problem_from_json_text(const std::string& text);
std::string problem_to_json_text(const Problem& problem);
void save_problem(const Problem& problem, const std::filesystem::path& path);

}  // namespace scfconv
