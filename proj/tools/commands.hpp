// commands.hpp - the solve / analyze / sweep / check subcommands, kept apart
// from argument parsing so tests can drive them directly.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scfconv/analysis.hpp"
#include "scfconv/problems.hpp"
#include "scfconv/scf.hpp"

namespace scfconv::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kNotConverged = 2 };

struct CommonArgs {
    std::string family = "illustrative";  // illustrative | laplacian-complex | laplacian-real | random-hadamard | file
    std::string file;
    double eps = 0.1;
    double d = kIllustrativeD;
    Index n = 30;
    std::optional<Index> p;
    double alpha = 40.0;
    std::optional<double> h;
    double tol = 1e-12;
    int max_iter = 500;
    double damping = 1.0;
    std::string filter = "step";  // step | fermi
    double beta = 100.0;
    Index q_max = 4;
    std::uint64_t seed = 1;
    double fd_step = 0.0;  // check only; <= 0 selects 1e-5 (1 + ||P*||_F)
    std::string out;  // empty: stdout
};

Problem make_problem(const CommonArgs& a);
ScfOptions make_options(const CommonArgs& a);

struct SweepArgs {
    std::string axis = "eps";  // eps | alpha | n
    std::vector<double> values;
    std::optional<double> lo, hi;
    int count = 10;
    std::string spacing = "log";  // lin | log
    std::vector<std::string> quantities = {"c", "c2", "c2a", "c2b", "naive", "gap:1", "gap:2", "liu", "tilde:1"};
    int jobs = 1;
};

std::vector<double> sweep_grid(const SweepArgs& s);

// Each command writes its primary output to a.out (or `out` when a.out is empty)
// and diagnostics to `log`; the return value is the process exit code.
int cmd_solve(const CommonArgs& a, std::ostream& out, std::ostream& log);
int cmd_analyze(const CommonArgs& a, std::ostream& out, std::ostream& log);
int cmd_sweep(const CommonArgs& a, const SweepArgs& s, std::ostream& out, std::ostream& log);
// corrupt_jacobian perturbs the assembled Jacobian before the checks run (a
// negative control for the oracle).
int cmd_check(const CommonArgs& a, bool corrupt_jacobian, std::ostream& out, std::ostream& log);

}  // namespace scfconv::cli
