#include "scfconv/types.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace scfconv {

double hermitian_defect(const MatC& w) {
    if (w.rows() != w.cols()) return std::numeric_limits<double>::infinity();
    return (w - w.adjoint()).cwiseAbs().maxCoeff();
}

HermitianMatrix::HermitianMatrix(MatC m, double tol) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << "HermitianMatrix: matrix is " << m.rows() << "x" << m.cols() << ", expected square";
        throw DimensionError(os.str());
    }
    if (m.size() > 0) {
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        const double defect = hermitian_defect(m);
        if (!(defect <= tol * scale)) {
            std::ostringstream os;
            os << "HermitianMatrix: max |W - W^H| = " << defect << " exceeds tolerance "
               << tol * scale;
            throw ValidationError(os.str());
        }
    }
    m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::hermitized(const MatC& m) {
    if (m.rows() != m.cols()) throw DimensionError("HermitianMatrix::hermitized: matrix not square");
    return HermitianMatrix(Unchecked{}, 0.5 * (m + m.adjoint()));
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
    if (o.n() != n()) throw DimensionError("HermitianMatrix::operator+: dimension mismatch");
    return HermitianMatrix(Unchecked{}, m_ + o.m_);
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
    if (o.n() != n()) throw DimensionError("HermitianMatrix::operator-: dimension mismatch");
    return HermitianMatrix(Unchecked{}, m_ - o.m_);
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
    return HermitianMatrix(Unchecked{}, m_ * s);
}

}  // namespace scfconv
