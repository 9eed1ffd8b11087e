// types.hpp - common aliases, the Hermitian matrix carrier and error types
#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace scfconv {

using cxd = std::complex<double>;
using Index = Eigen::Index;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;

// Raised when the occupied/virtual splitting is not unique (lambda_p == lambda_{p+1}).
class ZeroGapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Shape or size mismatch between operands.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Input data that parses but violates a structural requirement.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Hermiticity tolerance, relative to max(1, max |entry|).
inline constexpr double kHermitianTol = 1e-12;

/// Dense complex Hermitian matrix. Construction validates W = W^H and stores the
/// exactly Hermitian part (W + W^H)/2, so every downstream consumer sees a matrix
/// that is Hermitian to the last bit.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(MatC m, double tol = kHermitianTol);

    // Hermitian part of m without validation. For matrices that are Hermitian by
    // construction up to round-off (e.g. X1 X1^H).
    static HermitianMatrix hermitized(const MatC& m);

    static HermitianMatrix zero(Index n) { return hermitized(MatC::Zero(n, n)); }
    static HermitianMatrix identity(Index n) { return hermitized(MatC::Identity(n, n)); }

    Index n() const { return m_.rows(); }
    const MatC& matrix() const { return m_; }
    cxd operator()(Index i, Index j) const { return m_(i, j); }

    double norm_fro() const { return m_.norm(); }

    HermitianMatrix operator+(const HermitianMatrix& o) const;
    HermitianMatrix operator-(const HermitianMatrix& o) const;
    HermitianMatrix operator*(double s) const;

private:
    struct Unchecked {};
    HermitianMatrix(Unchecked, MatC m) : m_(std::move(m)) {}
    MatC m_;
};

// max |W - W^H| over all entries.
double hermitian_defect(const MatC& w);

}  // namespace scfconv
