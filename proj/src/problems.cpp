#include "scfconv/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <span>
#include <sstream>

#include <Eigen/LU>

#include "scfconv/kernels.hpp"
#include "scfconv/linalg.hpp"
#include "scfconv/mat_ops.hpp"

namespace scfconv {

Index operator_dimension(const OperatorSpec& op) {
    return std::visit(
        [](const auto& o) -> Index {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, HadamardMask>) {
                if (o.mask.rows() != o.mask.cols()) throw DimensionError("hadamard mask is not square");
                return o.mask.rows();
            } else if constexpr (std::is_same_v<T, DiagonalMap>) {
                if (o.coeff.rows() != o.coeff.cols()) throw DimensionError("diagonal_map coeff is not square");
                return o.coeff.rows();
            } else {
                if (o.matrix.rows() != o.matrix.cols())
                    throw DimensionError("general_vec matrix is not square");
                const auto n = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(o.matrix.rows()))));
                if (n * n != o.matrix.rows()) {
                    std::ostringstream os;
                    os << "general_vec matrix has " << o.matrix.rows() << " rows, which is not n^2";
                    throw DimensionError(os.str());
                }
                return n;
            }
        },
        op);
}

std::string operator_kind(const OperatorSpec& op) {
    switch (op.index()) {
        case 0: return "hadamard";
        case 1: return "diagonal_map";
        default: return "general_vec";
    }
}

MatC apply_L(const OperatorSpec& op, const MatC& p) {
    const Index n = operator_dimension(op);
    if (p.rows() != n || p.cols() != n) {
        std::ostringstream os;
        os << "apply_L: operator acts on " << n << "x" << n << " matrices, got " << p.rows() << "x" << p.cols();
        throw DimensionError(os.str());
    }
    return std::visit(
        [&](const auto& o) -> MatC {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, HadamardMask>) {
                MatC out(n, n);
                const auto sz = static_cast<std::size_t>(n * n);
                kernels::hadamard(std::span<const cxd>(o.mask.data(), sz), std::span<const cxd>(p.data(), sz),
                                  std::span<cxd>(out.data(), sz));
                return out;
            } else if constexpr (std::is_same_v<T, DiagonalMap>) {
                const VecC d = o.coeff.template cast<cxd>() * p.diagonal();
                MatC out = MatC::Zero(n, n);
                out.diagonal() = o.alpha * d;
                return out;
            } else {
                return unvec(o.matrix * vec(p), n);
            }
        },
        op);
}

GeneralVec to_general_vec(const OperatorSpec& op) {
    const Index n = operator_dimension(op);
    if (const auto* g = std::get_if<GeneralVec>(&op)) return *g;
    MatC m(n * n, n * n);
    for (Index k = 0; k < n * n; ++k) {
        MatC e = MatC::Zero(n, n);
        e(k % n, k / n) = 1.0;
        m.col(k) = vec(apply_L(op, e));
    }
    return {m};
}

LPrime::LPrime(Index n, std::vector<Index> rows, std::vector<Index> cols, MatC block)
    : n_(n), rows_(std::move(rows)), cols_(std::move(cols)), block_(std::move(block)) {
    if (block_.rows() != static_cast<Index>(rows_.size()) || block_.cols() != static_cast<Index>(cols_.size()))
        throw DimensionError("LPrime: block does not match its support");
}

MatC LPrime::dense() const {
    MatC out = MatC::Zero(n_ * n_, m());
    for (std::size_t c = 0; c < cols_.size(); ++c)
        for (std::size_t r = 0; r < rows_.size(); ++r)
            out(rows_[r], cols_[c]) = block_(static_cast<Index>(r), static_cast<Index>(c));
    return out;
}

VecC LPrime::column(Index j) const {
    VecC out = VecC::Zero(n_ * n_);
    const auto it = std::lower_bound(cols_.begin(), cols_.end(), j);
    if (it == cols_.end() || *it != j) return out;
    const auto c = static_cast<Index>(it - cols_.begin());
    for (std::size_t r = 0; r < rows_.size(); ++r) out(rows_[r]) = block_(static_cast<Index>(r), c);
    return out;
}

MatC LPrime::column_matrix(Index j) const { return unvec(column(j), n_); }

MatC LPrime::apply(const VecC& v) const {
    if (v.size() != m()) throw DimensionError("LPrime::apply: vector length is not m");
    VecC restricted(static_cast<Index>(cols_.size()));
    for (std::size_t c = 0; c < cols_.size(); ++c) restricted(static_cast<Index>(c)) = v(cols_[c]);
    const VecC y = block_ * restricted;
    VecC full = VecC::Zero(n_ * n_);
    for (std::size_t r = 0; r < rows_.size(); ++r) full(rows_[r]) = y(static_cast<Index>(r));
    return unvec(full, n_);
}

double LPrime::norm2() const { return spectral_norm(block_); }

LPrime assemble_Lprime(const OperatorSpec& op, Index n) {
    if (operator_dimension(op) != n) throw DimensionError("assemble_Lprime: operator dimension mismatch");
    const Index m = HalfVector::length(n);
    const SelectorT t(n);
    std::vector<Index> cols;
    std::vector<VecC> columns;
    const auto* general = std::get_if<GeneralVec>(&op);
    for (Index j = 0; j < m; ++j) {
        VecC c;
        if (general) {
            // vech_inv(e_j) = E_ik + E_ki
            const Index k = t.vec_index(j);
            const Index i = k % n, col = k / n;
            c = general->matrix.col(k);
            if (i != col) c += general->matrix.col(i * n + col);
        } else {
            c = vec(apply_L(op, vech_unit(n, j)));
        }
        if ((c.array() != cxd(0.0)).any()) {
            cols.push_back(j);
            columns.push_back(std::move(c));
        }
    }
    std::vector<Index> rows;
    for (Index r = 0; r < n * n; ++r) {
        for (const auto& c : columns) {
            if (c(r) != cxd(0.0)) {
                rows.push_back(r);
                break;
            }
        }
    }
    MatC block(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        for (std::size_t r = 0; r < rows.size(); ++r)
            block(static_cast<Index>(r), static_cast<Index>(c)) = columns[c](rows[r]);
    return LPrime(n, std::move(rows), std::move(cols), std::move(block));
}

HermitianMatrix Problem::A(const HermitianMatrix& P) const {
    const MatC l = apply_L(op, P.matrix());
    const double scale = std::max(1.0, l.size() ? l.cwiseAbs().maxCoeff() : 0.0);
    if (l.size() && hermitian_defect(l) > 1e-10 * scale)
        throw ValidationError("operator L does not map Hermitian matrices to Hermitian matrices");
    return HermitianMatrix::hermitized(A0.matrix() + l);
}

void Problem::validate() const {
    const Index n = A0.n();
    if (n < 2) throw ValidationError("problem dimension must be at least 2");
    if (p < 1 || p >= n) {
        std::ostringstream os;
        os << "occupation count p = " << p << " must satisfy 1 <= p < n = " << n;
        throw ValidationError(os.str());
    }
    const Index on = operator_dimension(op);
    if (on != n) {
        std::ostringstream os;
        os << "operator acts on dimension " << on << " but A0 is " << n << "x" << n;
        throw DimensionError(os.str());
    }
    if (const auto* h = std::get_if<HadamardMask>(&op)) {
        const double scale = std::max(1.0, h->mask.cwiseAbs().maxCoeff());
        if (hermitian_defect(h->mask) > kHermitianTol * scale)
            throw ValidationError("hadamard mask must be Hermitian so that L preserves Hermiticity");
    }
}

Problem build_illustrative(double epsilon, double d) {
    MatC a0 = MatC::Zero(3, 3);
    a0(0, 1) = a0(1, 0) = epsilon;
    a0(1, 2) = a0(2, 1) = epsilon;
    a0(1, 1) = 1.0 + d;
    a0(2, 2) = 10.0;
    MatC mask = MatC::Zero(3, 3);
    mask(0, 0) = 1.0;
    mask(1, 1) = 1.0;
    mask(2, 2) = 100.0;
    Problem pr{HermitianMatrix(a0), HadamardMask{mask}, 1, {}};
    pr.meta.family = "illustrative";
    pr.meta.epsilon = epsilon;
    pr.meta.d = d;
    return pr;
}

Problem build_laplacian(Index n, double alpha, Index p, LaplacianVariant variant, std::optional<double> h) {
    if (n < 2) throw ValidationError("build_laplacian: n must be >= 2");
    const double hh = h.value_or(1.0 / static_cast<double>(n + 1));
    if (!(hh > 0.0)) throw ValidationError("build_laplacian: grid spacing must be > 0");
    const double diag = 2.0 / (hh * hh);
    const double off = -1.0 / (hh * hh);
    const cxd conv = variant == LaplacianVariant::complex_convection ? cxd(0.0, 0.5 / hh) : cxd(0.0);
    MatC a0 = MatC::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        a0(i, i) = diag;
        if (i + 1 < n) {
            a0(i, i + 1) = off + conv;
            a0(i + 1, i) = off - conv;
        }
    }
    const MatR re = a0.real();
    Eigen::FullPivLU<MatR> lu(re);
    if (!lu.isInvertible()) throw ValidationError("build_laplacian: Re(A0) is singular");
    Problem pr{HermitianMatrix(a0), DiagonalMap{lu.inverse(), alpha}, p, {}};
    pr.meta.family = variant == LaplacianVariant::real ? "laplacian_real" : "laplacian_complex";
    pr.meta.alpha = alpha;
    pr.meta.h = hh;
    pr.validate();
    return pr;
}

Problem build_random_hadamard(Index n, Index p, std::uint64_t seed, double mask_scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_hermitian = [&] {
        MatC g(n, n);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < n; ++i) g(i, j) = cxd(gauss(rng), gauss(rng));
        return MatC(0.5 * (g + g.adjoint()));
    };
    const MatC a0 = random_hermitian();
    const MatC mask = mask_scale * random_hermitian();
    Problem pr{HermitianMatrix(a0), HadamardMask{mask}, p, {}};
    pr.meta.family = "random_hadamard";
    pr.meta.seed = seed;
    pr.validate();
    return pr;
}

}  // namespace scfconv
