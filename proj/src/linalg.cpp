#include "scfconv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace scfconv {

std::vector<Index> nonzero_columns(const MatC& a) {
    std::vector<Index> out;
    for (Index j = 0; j < a.cols(); ++j)
        if ((a.col(j).array() != cxd(0.0)).any()) out.push_back(j);
    return out;
}

std::vector<Index> nonzero_rows(const MatC& a) {
    std::vector<Index> out;
    for (Index i = 0; i < a.rows(); ++i)
        if ((a.row(i).array() != cxd(0.0)).any()) out.push_back(i);
    return out;
}

MatC gather(const MatC& a, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    MatC out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (std::size_t r = 0; r < rows.size(); ++r)
            out(static_cast<Index>(r), static_cast<Index>(c)) = a(rows[r], cols[c]);
    return out;
}

double spectral_norm(const MatC& a) {
    const auto rows = nonzero_rows(a);
    const auto cols = nonzero_columns(a);
    if (rows.empty() || cols.empty()) return 0.0;
    const MatC b = (rows.size() == static_cast<std::size_t>(a.rows()) &&
                    cols.size() == static_cast<std::size_t>(a.cols()))
                       ? a
                       : gather(a, rows, cols);
    MatC gram = b.cols() <= b.rows() ? MatC(b.adjoint() * b) : MatC(b * b.adjoint());
    Eigen::SelfAdjointEigenSolver<MatC> es(gram, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("spectral_norm: eigensolver failed");
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

namespace {

std::vector<Index> active_indices(const MatC& a) {
    const auto rows = nonzero_rows(a);
    const auto cols = nonzero_columns(a);
    std::vector<Index> both;
    std::set_intersection(rows.begin(), rows.end(), cols.begin(), cols.end(), std::back_inserter(both));
    return both;
}

}  // namespace

VecC eigenvalues_general(const MatC& a) {
    if (a.rows() != a.cols()) throw DimensionError("eigenvalues_general: matrix not square");
    VecC out = VecC::Zero(a.rows());
    const auto idx = active_indices(a);
    if (idx.empty()) return out;
    const MatC b = idx.size() == static_cast<std::size_t>(a.rows()) ? a : gather(a, idx, idx);
    Eigen::ComplexEigenSolver<MatC> es(b, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalues_general: eigensolver failed");
    out.head(b.rows()) = es.eigenvalues();
    return out;
}

double spectral_radius(const MatC& a) {
    const VecC ev = eigenvalues_general(a);
    return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

}  // namespace scfconv
