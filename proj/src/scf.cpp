#include "scfconv/scf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scfconv {

void ScfOptions::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("ScfOptions: tol must be > 0");
    if (!(damping > 0.0 && damping <= 1.0)) throw std::invalid_argument("ScfOptions: damping must lie in (0, 1]");
    if (max_iter < 1) throw std::invalid_argument("ScfOptions: max_iter must be >= 1");
    if (filter.kind == ScfFilter::Kind::fermi && !(filter.beta > 0.0))
        throw std::invalid_argument("ScfOptions: fermi filter needs beta > 0");
}

ScfStep scf_step(const Problem& problem, const HermitianMatrix& P, const ScfFilter& filter,
                 std::optional<int> iterate) {
    const HermitianMatrix a = problem.A(P);
    if (filter.kind == ScfFilter::Kind::fermi) {
        FermiDensity fd = fermi_density_full(a, filter.beta, problem.p);
        return {std::move(fd.P), std::move(fd.eig.lambdas), std::move(fd.eig.X), fd.mu};
    }
    Eigenpairs eig = eigh_ascending(a);
    if (iterate) {
        std::ostringstream ctx;
        ctx << "SCF iterate " << *iterate;
        require_gap(eig.lambdas, problem.p, ctx.str().c_str());
    } else {
        require_gap(eig.lambdas, problem.p, "scf_step");
    }
    HermitianMatrix next = density_from_eigenvectors(eig.X, problem.p);
    return {std::move(next), std::move(eig.lambdas), std::move(eig.X), 0.0};
}

std::vector<double> FixedPointBundle::errors_to_fixed_point() const {
    std::vector<double> out;
    out.reserve(history.size());
    for (const auto& r : history) out.push_back(r.err_to_fixed_point_fro);
    return out;
}

FixedPointBundle scf_solve(const Problem& problem, const std::optional<HermitianMatrix>& P0, const ScfOptions& opts) {
    problem.validate();
    opts.validate();
    const double theta = opts.damping;

    HermitianMatrix P = P0 ? *P0
                           : (opts.filter.kind == ScfFilter::Kind::fermi
                                  ? fermi_density(problem.A0, opts.filter.beta, problem.p)
                                  : spectral_filter_density(problem.A0, problem.p));
    if (P.n() != problem.n()) throw DimensionError("scf_solve: P0 dimension does not match the problem");

    FixedPointBundle out;
    out.p = problem.p;
    out.damping = theta;
    out.filter = opts.filter;

    std::vector<HermitianMatrix> iterates;
    iterates.reserve(static_cast<std::size_t>(std::min(opts.max_iter, 4096)));

    for (int k = 1; k <= opts.max_iter; ++k) {
        ScfStep st = scf_step(problem, P, opts.filter, k - 1);
        const HermitianMatrix diff = st.P_next - P;
        const double r = diff.norm_fro();
        HermitianMatrix next = theta == 1.0 ? st.P_next : P + diff * theta;

        IterationRecord rec;
        rec.iter = k;
        rec.step_err_fro = theta * r;
        rec.lambda_p = st.lambdas(problem.p - 1);
        rec.lambda_p1 = st.lambdas(problem.p);
        rec.gap = rec.lambda_p1 - rec.lambda_p;
        out.history.push_back(rec);
        iterates.push_back(next);

        out.X = std::move(st.X);
        out.lambdas = std::move(st.lambdas);
        out.mu = st.mu;
        out.residual = r;
        out.P_star = P;
        if (r <= opts.tol) {
            // P itself passes the fixed-point test: Psi(P) is within tol of P.
            out.converged = true;
            break;
        }
        P = std::move(next);
    }
    // Without convergence P_star is the last iterate that was fed through Psi, so
    // X and lambdas still describe A(P_star).
    for (std::size_t k = 0; k < out.history.size(); ++k)
        out.history[k].err_to_fixed_point_fro = (iterates[k] - out.P_star).norm_fro();
    return out;
}

FixedPointBundle locate_fixed_point(const Problem& problem, const ScfOptions& opts, const std::vector<double>& ladder) {
    ScfOptions o = opts;
    FixedPointBundle best = scf_solve(problem, std::nullopt, o);
    if (best.converged) return best;
    for (double theta : ladder) {
        if (theta >= o.damping) continue;
        ScfOptions od = o;
        od.damping = theta;
        od.max_iter = std::max(o.max_iter, static_cast<int>(std::ceil(o.max_iter / theta)));
        try {
            FixedPointBundle b = scf_solve(problem, std::nullopt, od);
            if (b.converged) return b;
            best = std::move(b);
        } catch (const ZeroGapError&) {
            continue;
        }
    }
    return best;
}

RateEstimate estimate_rate(const std::vector<double>& errors, std::size_t tail, double floor) {
    std::size_t usable = 0;
    while (usable < errors.size() && std::isfinite(errors[usable]) && errors[usable] > floor) ++usable;
    const std::size_t count = std::min(tail, usable);
    if (count < 6) {
        std::ostringstream os;
        os << "estimate_rate: only " << usable << " error values lie above the floor " << floor
           << " (need at least 6); tighten tol or allow more iterations";
        throw std::runtime_error(os.str());
    }
    const std::size_t first = usable - count;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < count; ++i) {
        const double x = static_cast<double>(i);
        const double y = std::log(errors[first + i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double c = static_cast<double>(count);
    const double slope = (c * sxy - sx * sy) / (c * sxx - sx * sx);
    RateEstimate est;
    est.rate = std::exp(slope);
    est.first = first;
    est.count = count;
    for (std::size_t i = first + 1; i < first + count; ++i) est.step_ratios.push_back(errors[i] / errors[i - 1]);
    return est;
}

RateEstimate measured_rate(const FixedPointBundle& bundle, double tol, std::size_t tail) {
    if (bundle.damping != 1.0)
        throw std::invalid_argument("measured_rate: rate estimation is only meaningful for undamped SCF runs");
    if (!bundle.converged) throw std::invalid_argument("measured_rate: run did not converge");
    return estimate_rate(bundle.errors_to_fixed_point(), tail, std::max(kRateFloor, 100.0 * tol));
}

}  // namespace scfconv
