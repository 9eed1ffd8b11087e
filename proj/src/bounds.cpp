#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "scfconv/analysis.hpp"
#include "scfconv/kernels.hpp"
#include "scfconv/linalg.hpp"

namespace scfconv {

double convergence_factor(const MatC& J) { return spectral_radius(J); }

double bound_c2(const MatC& J) { return spectral_norm(J); }

double bound_naive(const LPrime& lprime, double delta1) {
    if (!(delta1 > 0.0)) throw ZeroGapError("bound_naive: delta_1 must be positive");
    return lprime.norm2() / delta1;
}

namespace {

// Columns vec(W o (X^H L(vech_inv(e_j)) X)) of D K^H L' over the column support.
MatC cyclic_a_block(const JacobianBundle& jb) {
    const Index n = jb.n();
    const auto sz = static_cast<std::size_t>(n * n);
    const auto& cols = jb.lprime.col_support();
    MatC out(n * n, static_cast<Index>(cols.size()));
    MatC rotated(n, n);
    for (std::size_t k = 0; k < cols.size(); ++k) {
        rotated.noalias() = jb.X.adjoint() * jb.lprime.column_matrix(cols[k]) * jb.X;
        kernels::scale_real(std::span<cxd>(rotated.data(), sz), std::span<const double>(jb.weights.data(), sz));
        out.col(static_cast<Index>(k)) = Eigen::Map<const VecC>(rotated.data(), n * n);
    }
    return out;
}

VecC vech_of_outer(const MatC& X, Index l, Index m) {
    const MatC outer = X.col(l) * X.col(m).adjoint();
    return vech(outer).entries;
}

}  // namespace

VecC CyclicColumns::column(std::size_t k) const {
    VecC out = VecC::Zero(n * n);
    for (std::size_t r = 0; r < rows.size(); ++r) out(rows[r]) = block(static_cast<Index>(r), static_cast<Index>(k));
    return out;
}

CyclicColumns cyclic_b_columns(const JacobianBundle& jb) {
    const Index n = jb.n();
    CyclicColumns cc;
    cc.n = n;
    cc.rows = jb.lprime.row_support();
    for (Index m = 0; m < n; ++m)
        for (Index l = 0; l < n; ++l)
            if (jb.weights(l, m) != 0.0) cc.pairs.emplace_back(l, m);
    const auto& cols = jb.lprime.col_support();
    cc.block = MatC::Zero(static_cast<Index>(cc.rows.size()), static_cast<Index>(cc.pairs.size()));
    if (cols.empty()) return cc;
    VecC restricted(static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cc.pairs.size(); ++k) {
        const auto [l, m] = cc.pairs[k];
        const VecC v = vech_of_outer(jb.X, l, m);
        for (std::size_t c = 0; c < cols.size(); ++c) restricted(static_cast<Index>(c)) = v(cols[c]);
        cc.block.col(static_cast<Index>(k)) = jb.weights(l, m) * (jb.lprime.block() * restricted);
    }
    return cc;
}

CyclicBounds bound_cyclic(const JacobianBundle& jb) {
    CyclicBounds b;
    // T only scatters the columns of L' into zero-padded positions, so dropping it
    // leaves the singular values unchanged.
    b.c2a = spectral_norm(cyclic_a_block(jb));
    b.c2b = spectral_norm(cyclic_b_columns(jb).block);
    return b;
}

double outer_product_action(const OperatorSpec& op, const MatC& X, Index l, Index m) {
    const MatC outer = X.col(l) * X.col(m).adjoint();
    const MatC image = apply_L(op, symmetrize(outer));
    const auto sz = static_cast<std::size_t>(image.size());
    return std::sqrt(kernels::norm2_sq(std::span<const cxd>(image.data(), sz)));
}

std::vector<double> bound_gap_all(const JacobianBundle& jb, const OperatorSpec& op, const GapStructure& gaps) {
    const double lnorm = jb.lprime.norm2();
    const Index count = gaps.count();
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count + 1));
    double partial = 0.0;
    for (Index q = 0; q <= count; ++q) {
        if (q > 0) {
            const auto& pr = gaps.pairs[static_cast<std::size_t>(q - 1)];
            // Omega_q adds both orientations of the pair.
            partial += (outer_product_action(op, jb.X, pr.virt, pr.occ) +
                        outer_product_action(op, jb.X, pr.occ, pr.virt)) /
                       pr.gap;
        }
        const double head = q == count ? 0.0 : lnorm / gaps.delta(q + 1);
        out.push_back(head + partial);
    }
    return out;
}

double bound_gap(const JacobianBundle& jb, const OperatorSpec& op, const GapStructure& gaps, Index q) {
    if (q < 0 || q > gaps.count()) {
        std::ostringstream os;
        os << "bound_gap: q = " << q << " outside [0, " << gaps.count() << "]";
        throw std::out_of_range(os.str());
    }
    double sum = 0.0;
    for (const auto& [r, c] : gaps.omega(q))
        sum += outer_product_action(op, jb.X, r, c) / std::abs(jb.lambdas(r) - jb.lambdas(c));
    const double head = q == gaps.count() ? 0.0 : jb.lprime.norm2() / gaps.delta(q + 1);
    return head + sum;
}

double bound_rank_truncated(const JacobianBundle& jb, const GapStructure& gaps, Index k) {
    if (k < 1 || k > gaps.count()) {
        std::ostringstream os;
        os << "bound_rank_truncated: k = " << k << " outside [1, " << gaps.count() << "]";
        throw std::out_of_range(os.str());
    }
    MatR masked = MatR::Zero(jb.n(), jb.n());
    for (const auto& [r, c] : gaps.omega(k)) masked(r, c) = jb.weights(r, c);
    // Same assembly route as jb.J, so that the full mask reproduces c2 exactly.
    const MatC jk = jb.dense_route ? jacobian_dense(jb.X, masked, jb.sign, jb.lprime)
                                   : jacobian_structured(jb.X, masked, jb.sign, jb.lprime);
    return spectral_norm(jk);
}

double bound_liu(const Problem& problem, double delta1) {
    if (!problem.meta.alpha)
        throw std::invalid_argument("bound_liu: problem has no alpha (only defined for the Laplacian families)");
    if (!(delta1 > 0.0)) throw ZeroGapError("bound_liu: delta_1 must be positive");
    const VecR ev = eigh_ascending(problem.A0).lambdas;
    const double smallest = ev.cwiseAbs().minCoeff();
    if (smallest == 0.0) throw std::domain_error("bound_liu: A0 is singular");
    const auto n = static_cast<double>(problem.n());
    return 2.0 * *problem.meta.alpha * std::sqrt(n) / smallest / delta1;
}

std::vector<double> cyclic_spectral_radii(const JacobianBundle& jb) {
    const Index n = jb.n();
    const MatC k = kron(jb.X.conjugate(), jb.X);
    const VecR w = Eigen::Map<const VecR>(jb.weights.data(), n * n);
    const MatC d = jb.sign * w.cast<cxd>().asDiagonal().toDenseMatrix();
    const MatC lt = SelectorT(n).apply_right(jb.lprime.dense());  // L' T, n^2 x n^2
    const MatC kh = k.adjoint();
    return {
        spectral_radius(jb.J),
        spectral_radius(MatC(k * d * kh * lt)),
        spectral_radius(MatC(d * kh * lt * k)),
        spectral_radius(MatC(kh * lt * k * d)),
        spectral_radius(MatC(lt * k * d * kh)),
    };
}

ConvergenceReport convergence_report(const Problem& problem, const JacobianBundle& jb, const ReportOptions& opts) {
    ConvergenceReport rep;
    rep.n = jb.n();
    rep.p = jb.p;
    rep.gaps = gap_structure(jb.lambdas, jb.p);
    rep.c = convergence_factor(jb.J);
    rep.c2 = bound_c2(jb.J);
    const CyclicBounds cb = bound_cyclic(jb);
    rep.c2a = cb.c2a;
    rep.c2b = cb.c2b;
    const double delta1 = rep.gaps.delta(1);
    rep.c_naive = bound_naive(jb.lprime, delta1);
    rep.c_gap = bound_gap_all(jb, problem.op, rep.gaps);
    if (problem.meta.alpha && problem.meta.family.rfind("laplacian", 0) == 0)
        rep.c_liu = bound_liu(problem, delta1);
    const Index kmax = std::min(opts.k_max, rep.gaps.count());
    for (Index k = 1; k <= kmax; ++k) rep.c_tilde.push_back(bound_rank_truncated(jb, rep.gaps, k));
    return rep;
}

ConvergenceReport convergence_report(const Problem& problem, const FixedPointBundle& fp, const ReportOptions& opts) {
    const LPrime lp = assemble_Lprime(problem.op, problem.n());
    return convergence_report(problem, assemble_jacobian(fp, lp, opts.jacobian), opts);
}

}  // namespace scfconv
