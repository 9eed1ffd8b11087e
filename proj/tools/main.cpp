#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using scfconv::cli::CommonArgs;
using scfconv::cli::SweepArgs;

namespace {

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--family", a.family, "illustrative | laplacian-complex | laplacian-real | random-hadamard | file")
        ->check(CLI::IsMember({"illustrative", "laplacian-complex", "laplacian-real", "random-hadamard", "file"}));
    sub->add_option("--file", a.file, "problem JSON (with --family file)");
    sub->add_option("--eps", a.eps, "illustrative coupling epsilon");
    sub->add_option("--d", a.d, "illustrative diagonal shift d");
    sub->add_option("--n", a.n, "dimension (laplacian, random-hadamard)");
    sub->add_option("--p", a.p, "number of occupied states");
    sub->add_option("--alpha", a.alpha, "Laplacian coupling alpha");
    sub->add_option("--h", a.h, "Laplacian grid spacing (default 1/(n+1))");
    sub->add_option("--tol", a.tol, "SCF stop threshold on ||Psi(P)-P||_F");
    sub->add_option("--max-iter", a.max_iter, "SCF iteration cap");
    sub->add_option("--damping", a.damping, "damping theta in (0, 1]");
    sub->add_option("--filter", a.filter, "occupation filter")->check(CLI::IsMember({"step", "fermi"}));
    sub->add_option("--beta", a.beta, "Fermi-Dirac inverse temperature");
    sub->add_option("--q-max", a.q_max, "largest q / k reported for Omega_q and rank-truncated bounds");
    sub->add_option("--seed", a.seed, "seed for random-hadamard problems and randomized checks");
    sub->add_option("--out", a.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SCF convergence factor and bound analysis"};
    // -h is taken by the grid-spacing option.
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    CommonArgs solve_args, analyze_args, sweep_args, check_args;
    SweepArgs sweep;
    bool corrupt = false;

    auto* solve = app.add_subcommand("solve", "run SCF and write the iteration history as CSV");
    add_common(solve, solve_args);
    auto* analyze = app.add_subcommand("analyze", "locate the fixed point and write the convergence report as JSON");
    add_common(analyze, analyze_args);
    auto* sw = app.add_subcommand("sweep", "evaluate the factor and bounds over a parameter grid (long CSV)");
    add_common(sw, sweep_args);
    sw->add_option("--axis", sweep.axis, "eps | alpha | n")->check(CLI::IsMember({"eps", "alpha", "n"}));
    sw->add_option("--values", sweep.values, "explicit grid values")->delimiter(',');
    sw->add_option("--lo", sweep.lo, "grid start");
    sw->add_option("--hi", sweep.hi, "grid end");
    sw->add_option("--count", sweep.count, "grid points");
    sw->add_option("--spacing", sweep.spacing, "lin | log")->check(CLI::IsMember({"lin", "log"}));
    sw->add_option("--quantities", sweep.quantities, "c,c2,c2a,c2b,naive,gap:q,liu,tilde:k")->delimiter(',');
    sw->add_option("--jobs", sweep.jobs, "grid points evaluated concurrently");
    auto* check = app.add_subcommand("check", "finite-difference oracle and invariant checks");
    add_common(check, check_args);
    check->add_option("--fd-step", check_args.fd_step, "finite-difference step (default 1e-5 (1 + ||P*||_F))");
    check->add_flag("--corrupt-jacobian", corrupt, "perturb the Jacobian first (negative control)")->group("");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return scfconv::cli::cmd_solve(solve_args, std::cout, std::cerr);
        if (analyze->parsed()) return scfconv::cli::cmd_analyze(analyze_args, std::cout, std::cerr);
        if (sw->parsed()) return scfconv::cli::cmd_sweep(sweep_args, sweep, std::cout, std::cerr);
        if (check->parsed()) return scfconv::cli::cmd_check(check_args, corrupt, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return scfconv::cli::kFailure;
    }
    return scfconv::cli::kFailure;
}
