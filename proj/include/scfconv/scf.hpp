// scf.hpp - SCF fixed-point iteration on density matrices and rate measurement
#pragma once

#include <optional>
#include <vector>

#include "scfconv/mat_ops.hpp"
#include "scfconv/problems.hpp"

namespace scfconv {

/// Occupation filter used by the SCF map: the sharp step (aufbau) filter or
/// Fermi-Dirac smearing with inverse temperature beta.
struct ScfFilter {
    enum class Kind { step, fermi } kind = Kind::step;
    double beta = 0.0;

    static ScfFilter step() { return {}; }
    static ScfFilter fermi(double beta) { return {Kind::fermi, beta}; }
};

struct ScfOptions {
    double tol = 1e-12;   // stop when ||Psi(P_k) - P_k||_F <= tol
    int max_iter = 500;
    double damping = 1.0;  // theta in (0, 1]; 1 is plain SCF
    ScfFilter filter;

    void validate() const;
};

struct ScfStep {
    HermitianMatrix P_next;
    VecR lambdas;  // spectrum of A(P), ascending
    MatC X;
    double mu = 0.0;  // chemical potential (fermi filter only)
};

/// One application of the fixed-point map: P_next = filter(A0 + L(P)).
/// `iterate` only labels error messages.
ScfStep scf_step(const Problem& problem, const HermitianMatrix& P, const ScfFilter& filter = {},
                 std::optional<int> iterate = std::nullopt);

struct IterationRecord {
    int iter = 0;                 // k, producing P_k from P_{k-1}
    double step_err_fro = 0.0;    // ||P_k - P_{k-1}||_F
    double err_to_fixed_point_fro = 0.0;  // ||P_k - P*||_F, filled after the run
    double lambda_p = 0.0;        // of A(P_{k-1})
    double lambda_p1 = 0.0;
    double gap = 0.0;
};

struct FixedPointBundle {
    HermitianMatrix P_star;
    MatC X;          // eigenvectors of A(P*)
    VecR lambdas;    // eigenvalues of A(P*), ascending
    double mu = 0.0;  // fermi filter only
    std::vector<IterationRecord> history;
    bool converged = false;
    double residual = 0.0;  // ||Psi(P*) - P*||_F
    double damping = 1.0;
    ScfFilter filter;
    Index p = 0;

    // Errors ||P_k - P*||_F in iteration order.
    std::vector<double> errors_to_fixed_point() const;
};

/// Iterates P_{k+1} = (1 - theta) P_k + theta Psi(P_k) from P0 (default: the
/// density of A0). Hitting max_iter is reported through `converged`, not thrown.
FixedPointBundle scf_solve(const Problem& problem, const std::optional<HermitianMatrix>& P0 = std::nullopt,
                           const ScfOptions& opts = {});

/// Plain SCF first; if it does not converge, retries with the damping factors in
/// `ladder` until a fixed point is located. The returned bundle records the
/// damping that produced it.
FixedPointBundle locate_fixed_point(const Problem& problem, const ScfOptions& opts = {},
                                    const std::vector<double>& ladder = {0.5, 0.25, 0.1, 0.05, 0.02});

struct RateEstimate {
    double rate = 0.0;               // geometric ratio from the tail fit
    std::vector<double> step_ratios;  // e_{k+1} / e_k over the fitted tail
    std::size_t first = 0;            // index of the first fitted point
    std::size_t count = 0;            // points fitted
};

inline constexpr double kRateFloor = 100.0 * 2.220446049250313e-16;

/// Least-squares slope of log e_k over the last `tail` points before the
/// sequence first drops to `floor`, returned as exp(slope). Throws
/// std::runtime_error if fewer than 6 usable points remain.
RateEstimate estimate_rate(const std::vector<double>& errors, std::size_t tail = 8, double floor = kRateFloor);

/// estimate_rate on ||P_k - P*||_F of a plain (undamped) run. The floor is raised
/// to 100 * tol because P* itself is only accurate to about tol.
RateEstimate measured_rate(const FixedPointBundle& bundle, double tol, std::size_t tail = 8);

}  // namespace scfconv
