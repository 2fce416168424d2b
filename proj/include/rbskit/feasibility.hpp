#pragma once

#include "rbskit/graph.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rbskit {

// Standard: floor(3N - sqrt(12N - 3)). Shifted: floor(3N - sqrt(12N) - 3).
enum class HarborthForm { standard, shifted };

int harborth_bound(int n, HarborthForm form = HarborthForm::standard);
int triangle_free_bound(int n);
// Length of the shortest cycle, or 0 for a forest.
int girth(const Graph& g);

struct PennyFlags {
    bool simple = true;
    bool connected = true;
    bool planar = true;
    int edges = 0;
    int penny_bound = 0;
    bool penny_bound_ok = true;
    int girth = 0;
    int triangle_free_bound = 0;
    bool triangle_free_bound_ok = true; // vacuous when girth < 4
    bool ok() const { return simple && connected && planar && penny_bound_ok && triangle_free_bound_ok; }
};

PennyFlags check_penny_necessary(const Graph& g, HarborthForm form = HarborthForm::standard);

bool is_regular(const Graph& g, int* degree = nullptr);
Eigen::MatrixXi laplacian(const Graph& g);
// True when every Laplacian eigenvalue is an even integer (to 1e-8).
bool laplacian_even_integers(const Graph& g);

struct HadamardResult {
    bool diagonalizable = false;
    bool exhaustive = true;       // false when the node budget ran out
    bool regular = false;
    int degree = -1;
    bool laplacian_even = false;
    std::optional<Eigen::MatrixXi> witness; // columns are the +-1 eigenvectors
    std::string reason;
};

constexpr int kHadamardSearchMaxN = 16;

// Fast rejections first; the exhaustive search runs only for N <= 16 and throws
// SearchLimitExceeded beyond that when the necessary conditions all pass.
HadamardResult check_hadamard_diagonalizable(const Graph& g, long node_budget = 2'000'000);

// Witness checks in integer arithmetic: H^T H = N I and H^T L H diagonal.
bool verify_witness(const Graph& g, const Eigen::MatrixXi& H);

struct PropertyCheck {
    bool pass = false;
    double deviation = 0.0;
};

// Consecutive gaps of the sorted spectrum; pass iff max |gap - mean| / mean <= rel_tol.
PropertyCheck property1_check(const Eigen::VectorXd& frequencies, double rel_tol = 1e-8);

// Uniform support: every |V_jk| = 1/sqrt(N). Degenerate eigenspaces are searched for a
// +-1 basis (N <= 16) before failing.
PropertyCheck property2_check(const NormalModeBasis& basis, double abs_tol = 1e-8);

// Only Hadamard-diagonalizable graph families of order 8l+4: "K_N", "K_{N/2,N/2}", "2K_{N/2}", "NK_1", or "" when none match.
std::string candidate_class(const Graph& g);

enum class Verdict { feasible, infeasible, unknown };
const char* verdict_name(Verdict v);

struct FeasibilityReport {
    int n = 0;
    PennyFlags penny;
    bool n_mod4_ok = false;
    bool regular = false;
    int degree = -1;
    bool laplacian_even_integers = false;
    bool hadamard_diagonalizable = false;
    bool hadamard_searched = false;
    std::optional<Eigen::MatrixXi> witness;
    PropertyCheck property1, property2;
    bool size_excluded = false;
    std::string candidate_class;
    bool conjecture_flag = false; // N > 4, 4 | N: no Hadamard-diagonalizable penny graph expected
    Verdict verdict = Verdict::unknown;
    std::vector<std::string> reasons;
    std::vector<std::string> notes;
};

FeasibilityReport classify_and_verdict(const ResonatorArray& array,
                                       HarborthForm form = HarborthForm::standard);

struct OptimizeOptions {
    double ratio_min = 1.0, ratio_max = 10.0; // box on each free weight relative to the fixed one
    int starts = 10;
    unsigned seed = 20240917;
    int max_iter = 4000;
    double residual_target = 1e-10;
};

struct SpacingResult {
    std::vector<double> weights; // one per free class
    double residual = 0.0;
    bool converged = false;
    int evaluations = 0;
};

// Residual sum (gap - mean)^2 / mean^2 of the weighted adjacency spectrum.
double spacing_residual(const Graph& g, const std::vector<double>& edge_weights);

// edge_class[e] = -1 fixes edge e at weight 1, otherwise names its free class.
SpacingResult optimize_spacings(const Graph& g, const std::vector<int>& edge_class,
                                const OptimizeOptions& opt = {});

// Nelder-Mead on an unconstrained function.
struct NelderMeadResult {
    Eigen::VectorXd x;
    double f = 0.0;
    int evaluations = 0;
};
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             Eigen::VectorXd x0, double step, int max_iter, double ftol = 1e-30,
                             double xtol = 1e-13);

} // namespace rbskit
