// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero if
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "../support.hpp"
#include "scfconv/kernels.hpp"
#include "scfconv/linalg.hpp"

using namespace scfconv;
using namespace testing_support;

namespace {

// Tolerances, all fixed by the acceptance contract.
constexpr double kFdTol = 1e-6;            // 1
constexpr double kRateRel = 0.05;          // 2
constexpr double kChainSlack = 1e-10;      // 3
constexpr double kChainMinGap = 1e-3;      // 3
constexpr double kNaiveRel = 1e-12;        // 4
constexpr double kIllustrativeNaive = 625.0;
constexpr double kSlopeC = 2.0, kSlopeCTol = 0.15;    // 5
constexpr double kSlopeC2 = 1.0, kSlopeC2Tol = 0.1;   // 5
constexpr double kJprimeStep = 1e-6;       // 6
constexpr double kJprimeRho = 1e-5;
constexpr double kJprimeNorm = 39.0625, kJprimeNormRel = 1e-3;
constexpr double kR2 = 0.999;              // 7
constexpr double kPhaseTol = 1e-12;        // 9
constexpr double kCyclicTol = 1e-10;
constexpr double kLprimeTol = 1e-12;
constexpr double kColumnTol = 1e-12;
constexpr double kDensityTol = 1e-10;
constexpr double kFermiRel = 0.02;         // 10
constexpr double kFermiTrace = 1e-12;
constexpr double kTruncTol = 1e-12;        // 11

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void run(int id, const char* title, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %2d  %-34s %s  (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
        syy += y[i] * y[i];
    }
    Fit f;
    f.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / k;
    const double cov = k * sxy - sx * sy;
    f.r2 = cov * cov / ((k * sxx - sx * sx) * (k * syy - sy * sy));
    return f;
}

JacobianBundle jacobian_of(const Problem& pr, const FixedPointBundle& fp) {
    return assemble_jacobian(fp, assemble_Lprime(pr.op, pr.n()));
}

double rho_at(const Problem& pr) {
    const FixedPointBundle fp = solve_tight(pr);
    if (!fp.converged) throw std::runtime_error("fixed point not located");
    return convergence_factor(jacobian_of(pr, fp).J);
}

// Suite shared by criteria 3, 4 and 11.
const std::vector<RandomInstance>& chain_suite() {
    static const std::vector<RandomInstance> suite = random_suite(100, 20240301, 3, 8, kChainMinGap);
    return suite;
}

Outcome criterion1() {
    double worst = 0.0;
    int cases = 0;
    auto check = [&](const Problem& pr) {
        const FixedPointBundle fp = solve_tight(pr);
        if (!fp.converged) throw std::runtime_error("fixed point not located");
        const MatC analytic = jacobian_of(pr, fp).J;
        const MatC fd = jacobian_fd(pr, fp.P_star);
        worst = std::max(worst, max_column_relative_error(analytic, fd));
        ++cases;
    };
    for (double eps : {0.0, 0.05, 0.2}) check(build_illustrative(eps));
    for (const auto& inst : random_suite(20, 777, 3, 8)) check(inst.problem);
    return {worst <= kFdTol, fmt("max column rel. error %.3e", worst) + " over " + std::to_string(cases) + " problems"};
}

Outcome criterion2() {
    std::string detail;
    bool ok = true;
    auto check = [&](const char* name, const Problem& pr) {
        ScfOptions o;
        o.tol = 1e-13;
        o.max_iter = 2000;
        const FixedPointBundle fp = scf_solve(pr, std::nullopt, o);
        const double c = convergence_factor(jacobian_of(pr, fp).J);
        const double rate = measured_rate(fp, o.tol).rate;
        const double rel = std::abs(rate - c) / c;
        ok = ok && fp.converged && rel <= kRateRel;
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: rho %.5f rate %.5f (rel %.2e); ", name, c, rate, rel);
        detail += buf;
    };
    check("illustrative eps=0.2", build_illustrative(0.2));
    // h fixed at 0.2: with h = 1/(n+1) the factor is ~2e-4 and the run converges
    // in a handful of steps, leaving no tail to fit.
    check("laplacian-complex n=30 h=0.2", build_laplacian(30, 40.0, 15, LaplacianVariant::complex_convection, 0.2));
    return {ok, detail};
}

Outcome criterion3() {
    long violations = 0;
    long comparisons = 0;
    for (const auto& inst : chain_suite()) {
        const ConvergenceReport r = convergence_report(inst.problem, inst.fp);
        std::vector<double> bounds = {r.c2, r.c2a, r.c2b};
        bounds.insert(bounds.end(), r.c_gap.begin(), r.c_gap.end());
        for (double b : bounds) {
            ++comparisons;
            if (r.c > b + kChainSlack) ++violations;
        }
    }
    return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(comparisons) +
                                 " comparisons on " + std::to_string(chain_suite().size()) + " instances"};
}

Outcome criterion4() {
    double worst = 0.0;
    for (const auto& inst : chain_suite()) {
        const ConvergenceReport r = convergence_report(inst.problem, inst.fp);
        worst = std::max(worst, std::abs(r.c_gap[0] - r.c_naive) / r.c_naive);
    }
    const Problem ill = build_illustrative(0.0);
    const FixedPointBundle fp = solve_tight(ill);
    const double naive = bound_naive(assemble_Lprime(ill.op, ill.n()), homo_lumo_gap(fp.lambdas, ill.p));
    const double rel = std::abs(naive - kIllustrativeNaive) / kIllustrativeNaive;
    return {worst <= kNaiveRel && rel <= kNaiveRel,
            fmt("max |c_gap,0 - c_naive|/c_naive %.2e", worst) + fmt("; illustrative c_naive %.15g", naive)};
}

Outcome criterion5() {
    std::vector<double> le, lc, lc2;
    const int points = 20;
    for (int i = 0; i < points; ++i) {
        const double eps = std::pow(10.0, -4.0 + 2.0 * i / (points - 1));
        const Problem pr = build_illustrative(eps);
        const FixedPointBundle fp = solve_tight(pr, 1e-15, 200);
        const MatC J = jacobian_of(pr, fp).J;
        le.push_back(std::log(eps));
        lc.push_back(std::log(convergence_factor(J)));
        lc2.push_back(std::log(bound_c2(J)));
    }
    const double sc = linear_fit(le, lc).slope;
    const double sc2 = linear_fit(le, lc2).slope;
    const bool ok = std::abs(sc - kSlopeC) <= kSlopeCTol && std::abs(sc2 - kSlopeC2) <= kSlopeC2Tol;
    return {ok, fmt("slope(c) %.4f", sc) + fmt(", slope(c2) %.4f", sc2)};
}

Outcome criterion6() {
    auto J_at = [](double eps) {
        const Problem pr = build_illustrative(eps);
        return jacobian_of(pr, solve_tight(pr, 1e-15, 200)).J;
    };
    const MatC jp = (J_at(kJprimeStep) - J_at(-kJprimeStep)) / (2.0 * kJprimeStep);
    const double rho = spectral_radius(jp);
    const double nrm = spectral_norm(jp);
    const double rel = std::abs(nrm - kJprimeNorm) / kJprimeNorm;
    const double d = kIllustrativeD;
    return {rho <= kJprimeRho && rel <= kJprimeNormRel,
            fmt("rho %.2e", rho) + fmt(", ||J'(0)||_2 %.6f", nrm) + fmt(" vs 39.0625 (rel %.3e)", rel) +
                fmt("; sqrt(2)/d^2 = %.6f", std::sqrt(2.0) / (d * d))};
}

Outcome criterion7() {
    std::vector<double> cn;
    for (Index n : {20, 30, 40, 60}) cn.push_back(rho_at(build_laplacian(n, 40.0, 15, LaplacianVariant::complex_convection)));
    bool decreasing = true;
    for (std::size_t i = 1; i < cn.size(); ++i) decreasing = decreasing && cn[i] < cn[i - 1];
    std::vector<double> al, ca;
    for (double a : {10.0, 20.0, 30.0, 40.0}) {
        al.push_back(a);
        ca.push_back(rho_at(build_laplacian(30, a, 15, LaplacianVariant::complex_convection)));
    }
    const double r2 = linear_fit(al, ca).r2;
    std::string detail = "c(n=20,30,40,60) =";
    for (double c : cn) detail += fmt(" %.4e", c);
    detail += fmt("; R^2 of c(alpha) %.6f", r2);
    return {decreasing && r2 >= kR2, detail};
}

Outcome criterion8() {
    const Problem pr = build_laplacian(60, 5.0, 25, LaplacianVariant::real);
    const FixedPointBundle fp = solve_tight(pr);
    if (!fp.converged) return {false, "fixed point not located"};
    ReportOptions ro;
    ro.k_max = 0;
    const ConvergenceReport r = convergence_report(pr, fp, ro);
    const double liu = r.c_liu.value_or(-1.0);
    const bool ok = liu >= r.c_naive && r.c_naive >= r.c2 && r.c2 >= r.c;
    return {ok, fmt("c_Liu %.4e", liu) + fmt(" >= c_naive %.4e", r.c_naive) + fmt(" >= c2 %.4e", r.c2) +
                    fmt(" >= c %.4e", r.c)};
}

Outcome criterion9() {
    const auto suite = random_suite(50, 99, 3, 6);
    double phase = 0.0, cyclic = 0.0, lprime = 0.0, column = 0.0, density = 0.0;
    Gen g(4242);
    for (const auto& inst : suite) {
        const Problem& pr = inst.problem;
        const Index n = pr.n();
        const LPrime lp = assemble_Lprime(pr.op, n);
        const JacobianBundle jb = assemble_jacobian(inst.fp, lp);

        const MatC rotated_X = inst.fp.X * g.unit_phases(n);
        const MatC jr = assemble_jacobian(rotated_X, inst.fp.lambdas, pr.p, lp).J;
        phase = std::max(phase, max_abs(jr - jb.J) / std::max(1.0, max_abs(jb.J)));

        const auto radii = cyclic_spectral_radii(jb);
        for (double r : radii) cyclic = std::max(cyclic, std::abs(r - radii.front()));

        const MatC x = g.matrix(n, n);
        const VecC lhs = lp.dense() * vech_oracle(x);
        const MatC rhs = apply_L(pr.op, symmetrize_oracle(x));
        lprime = std::max(lprime, (lhs - Eigen::Map<const VecC>(rhs.data(), n * n)).cwiseAbs().maxCoeff() /
                                      std::max(1.0, rhs.cwiseAbs().maxCoeff()));

        // L' T (conj(X) kron X) D formed densely, against the per-pair columns.
        const MatC k = kron(jb.X.conjugate(), jb.X);
        const VecR w = Eigen::Map<const VecR>(jb.weights.data(), n * n);
        const MatC dense = SelectorT(n).apply_right(lp.dense()) * k * w.cast<cxd>().asDiagonal();
        const CyclicColumns cc = cyclic_b_columns(jb);
        for (std::size_t c = 0; c < cc.pairs.size(); ++c) {
            const auto [l, m] = cc.pairs[c];
            const MatC img = apply_L(pr.op, symmetrize_oracle(jb.X.col(l) * jb.X.col(m).adjoint()));
            const VecC expect = Eigen::Map<const VecC>(img.data(), n * n) * jb.weights(l, m);
            const double scale = std::max(1.0, expect.cwiseAbs().maxCoeff());
            column = std::max(column, (cc.column(c) - expect).cwiseAbs().maxCoeff() / scale);
            column = std::max(column, (dense.col(l + n * m) - expect).cwiseAbs().maxCoeff() / scale);
        }

        const MatC Pm = inst.fp.P_star.matrix();
        density = std::max({density, max_abs(Pm * Pm - Pm), max_abs(Pm - Pm.adjoint()),
                            std::abs(Pm.trace().real() - static_cast<double>(pr.p))});
    }
    const bool ok = phase <= kPhaseTol && cyclic <= kCyclicTol && lprime <= kLprimeTol && column <= kColumnTol &&
                    density <= kDensityTol;
    return {ok, fmt("phase %.1e", phase) + fmt(", cyclic %.1e", cyclic) + fmt(", L' identity %.1e", lprime) +
                    fmt(", column identity %.1e", column) + fmt(", density %.1e", density) + " over " +
                    std::to_string(suite.size()) + " cases"};
}

Outcome criterion10() {
    const double beta = 1e3;
    const Problem pr = build_illustrative(0.1);
    const FixedPointBundle step_fp = solve_tight(pr);
    const double rho_step = convergence_factor(jacobian_of(pr, step_fp).J);

    ScfOptions o;
    o.tol = 1e-13;
    o.max_iter = 2000;
    o.filter = ScfFilter::fermi(beta);
    const FixedPointBundle ffp = locate_fixed_point(pr, o);
    const JacobianBundle fj = fermi_jacobian(ffp, assemble_Lprime(pr.op, pr.n()), beta, ffp.mu);
    const double rho_fermi = convergence_factor(fj.J);
    const double rel = std::abs(rho_fermi - rho_step) / rho_step;

    double trace_err = 0.0;
    Gen g(10);
    for (int i = 0; i < 50; ++i) {
        const Index n = g.integer(3, 8);
        const Index p = g.integer(1, n - 1);
        // Small beta leaves the fixed bisection interval unable to bracket the trace.
        const double b = std::pow(10.0, g.uniform(1.0, 3.0));
        const HermitianMatrix P = fermi_density(HermitianMatrix(g.hermitian(n)), b, p);
        trace_err = std::max(trace_err, std::abs(P.matrix().trace().real() - static_cast<double>(p)));
    }
    trace_err = std::max(trace_err, std::abs(ffp.P_star.matrix().trace().real() - 1.0));
    return {ffp.converged && rel <= kFermiRel && trace_err <= kFermiTrace,
            fmt("rho step %.6e", rho_step) + fmt(", rho fermi %.6e", rho_fermi) + fmt(" (rel %.2e)", rel) +
                fmt("; max trace error %.1e", trace_err)};
}

Outcome criterion11() {
    double worst = 0.0;
    auto check = [&](const Problem& pr, const FixedPointBundle& fp) {
        const JacobianBundle jb = jacobian_of(pr, fp);
        const GapStructure gs = gap_structure(jb.lambdas, jb.p);
        const double c2 = bound_c2(jb.J);
        const double full = bound_rank_truncated(jb, gs, gs.count());
        worst = std::max(worst, std::abs(full - c2) / std::max(c2, 1e-300));
    };
    for (const auto& inst : chain_suite()) check(inst.problem, inst.fp);
    for (double eps : {0.0, 0.1, 0.2}) {
        const Problem pr = build_illustrative(eps);
        check(pr, solve_tight(pr));
    }
    const Problem lap = build_laplacian(20, 40.0, 15, LaplacianVariant::complex_convection);
    check(lap, solve_tight(lap));
    return {worst <= kTruncTol, fmt("max |c~_full - c2|/c2 %.2e", worst)};
}

// Reported for information: spectral radius of the real-linear Jacobian over
// Hermitian perturbations next to the complex m x m one.
void realified_note() {
    try {
        const Problem pr = build_laplacian(8, 40.0, 4, LaplacianVariant::complex_convection, 0.2);
        const FixedPointBundle fp = solve_tight(pr);
        const double c = convergence_factor(jacobian_of(pr, fp).J);
        const MatR jr = jacobian_fd_realified(pr, fp.P_star);
        const double cr = spectral_radius(MatC(jr.cast<cxd>()));
        std::printf("[INFO] realified Jacobian (laplacian-complex n=8, p=4, h=0.2): rho %.6e vs complex J %.6e\n", cr, c);
    } catch (const std::exception& e) {
        std::printf("[INFO] realified comparison skipped: %s\n", e.what());
    }
}

}  // namespace

int main() {
    std::printf("SIMD kernels: %s\n", std::string(kernels::isa_name(kernels::active_isa())).c_str());
    run(1, "Jacobian vs finite differences", criterion1);
    run(2, "rate prediction", criterion2);
    run(3, "bound chain", criterion3);
    run(4, "c_gap,0 = c_naive, 625", criterion4);
    run(5, "Taylor slopes", criterion5);
    run(6, "J'(0) structure", criterion6);
    run(7, "Laplacian trends", criterion7);
    run(8, "real Laplacian ordering", criterion8);
    run(9, "structural invariants", criterion9);
    run(10, "Fermi consistency", criterion10);
    run(11, "rank-truncated full = c2", criterion11);
    realified_note();
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
