// Shared helpers for the test binaries: seeded generators and brute-force
// oracles that avoid the library code paths they are compared against.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "scfconv/analysis.hpp"
#include "scfconv/mat_ops.hpp"
#include "scfconv/problems.hpp"
#include "scfconv/scf.hpp"

namespace testing_support {

using namespace scfconv;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double normal() { return normal_(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    Index integer(Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng_); }
    cxd complex() { return {normal(), normal()}; }

    MatC matrix(Index r, Index c) {
        MatC a(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) a(i, j) = complex();
        return a;
    }
    MatR real_matrix(Index r, Index c) {
        MatR a(r, c);
        for (Index j = 0; j < c; ++j)
            for (Index i = 0; i < r; ++i) a(i, j) = normal();
        return a;
    }
    VecC vector(Index n) {
        VecC v(n);
        for (Index i = 0; i < n; ++i) v(i) = complex();
        return v;
    }
    MatC hermitian(Index n) {
        const MatC a = matrix(n, n);
        return (a + a.adjoint()) / 2.0;
    }
    MatC complex_symmetric(Index n) {
        const MatC a = matrix(n, n);
        return (a + a.transpose()) / 2.0;
    }
    MatC unit_phases(Index n) {
        MatC phi = MatC::Zero(n, n);
        for (Index i = 0; i < n; ++i) phi(i, i) = std::polar(1.0, uniform(-M_PI, M_PI));
        return phi;
    }
    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Column-major lower triangle by explicit loops.
inline VecC vech_oracle(const MatC& w) {
    const Index n = w.rows();
    VecC out(n * (n + 1) / 2);
    Index k = 0;
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) out(k++) = w(i, j);
    return out;
}

// S(X) = sum_j vech(X)_j vech_inv(e_j), spelled out entry by entry.
inline MatC symmetrize_oracle(const MatC& x) {
    const Index n = x.rows();
    MatC out = MatC::Zero(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = j; i < n; ++i) {
            out(i, j) += x(i, j);
            if (i != j) out(j, i) += x(i, j);
        }
    return out;
}

// Reciprocal-gap matrix straight from its definition.
inline MatR reciprocal_gaps_oracle(const VecR& lambdas, Index p) {
    const Index n = lambdas.size();
    MatR r = MatR::Zero(n, n);
    for (Index i = 0; i < p; ++i)
        for (Index j = p; j < n; ++j) {
            r(i, j) = 1.0 / (lambdas(j) - lambdas(i));
            r(j, i) = r(i, j);
        }
    return r;
}

inline double max_abs(const MatC& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Fixed point with a tight residual (falls back to damping when plain SCF stalls).
inline FixedPointBundle solve_tight(const Problem& pr, double tol = 1e-13, int max_iter = 2000) {
    ScfOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    return locate_fixed_point(pr, o);
}

// Random Hadamard instance with a verified fixed point and delta_1 above min_gap.
struct RandomInstance {
    Problem problem;
    FixedPointBundle fp;
    std::uint64_t seed = 0;
};

inline bool make_random_instance(std::uint64_t seed, Index n, Index p, double min_gap, RandomInstance& out,
                                 double mask_scale = 0.2) {
    try {
        Problem pr = build_random_hadamard(n, p, seed, mask_scale);
        FixedPointBundle fp = solve_tight(pr, 1e-12, 3000);
        if (!fp.converged) return false;
        if (homo_lumo_gap(fp.lambdas, p) <= min_gap) return false;
        out = {std::move(pr), std::move(fp), seed};
        return true;
    } catch (const ZeroGapError&) {
        return false;
    }
}

inline std::vector<RandomInstance> random_suite(std::size_t count, std::uint64_t base_seed, Index n_min, Index n_max,
                                                double min_gap = 1e-3) {
    std::vector<RandomInstance> out;
    Gen g(base_seed);
    std::uint64_t seed = base_seed;
    while (out.size() < count) {
        ++seed;
        const Index n = g.integer(n_min, n_max);
        const Index p = g.integer(1, n - 1);
        RandomInstance inst;
        if (make_random_instance(seed, n, p, min_gap, inst)) out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace testing_support
