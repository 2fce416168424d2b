#pragma once

#include "rbskit/graph.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace rbskit {

enum class PerturbationKind { diagonal, edge };
PerturbationKind parse_perturbation_kind(const std::string& s);

// diagonal: ring index -> frequency shift. edge: index into array.couplings -> coupling shift.
struct Perturbation {
    PerturbationKind kind = PerturbationKind::edge;
    std::map<int, double> strengths; // rad/s
};

// Real symmetric matrix of H_p in the resonator basis.
Eigen::MatrixXd perturbation_matrix(const ResonatorArray& a, const Perturbation& p);

struct CorrectedModes {
    Eigen::VectorXd frequencies;  // omega_j + <c_j|V|c_j>
    Eigen::MatrixXd vectors;      // column j is c_j + sum_l coeff(l, j) c_l (not renormalized)
    Eigen::MatrixXd coefficients; // coeff(l, j) = <c_l|V|c_j> / (omega_j - omega_l), zero diagonal
    std::vector<std::string> warnings;
};

// Nondegenerate first-order theory; throws DegenerateSpectrum otherwise.
CorrectedModes corrected_modes(const ResonatorArray& a, const Perturbation& p);
CorrectedModes corrected_modes(const NormalModeBasis& unperturbed, const Eigen::MatrixXd& V);

struct InducedTerm {
    std::string type; // "diagonal" or "cross-pattern"
    int i = 0, j = 0;
    double coefficient = 0.0; // first-order part of the entry
};

struct DriveDecomposition {
    Eigen::MatrixXd M;  // W1^T F W1 in the corrected basis
    Eigen::MatrixXd M0; // V^T F V, the unperturbed drive (entries below 1e-12 lie outside the pattern)
    std::vector<InducedTerm> terms; // entries outside the pattern that moved, including the diagonal
    double residual = 0.0;          // max |M - M0| outside the pattern
};

DriveDecomposition drive_in_corrected_basis(const std::vector<int>& f, const NormalModeBasis& unperturbed,
                                            const CorrectedModes& corrected);

struct RobustnessReport {
    std::string pattern;
    PerturbationKind model = PerturbationKind::edge;
    bool first_order_robust = true;
    double slope = 0.0; // log-log slope of the residual vs scale, NaN when it vanishes identically
    std::vector<double> scales, residuals;
    std::vector<InducedTerm> induced_terms; // first-order coefficients per unit scale
};

struct RobustnessOptions {
    double s_min = 1e-4, s_max = 1e-2; // relative to the smallest coupling
    int points = 7;
    unsigned seed = 7;
    double slope_threshold = 1.5;
};

RobustnessReport robustness_report(const ResonatorArray& a, const std::vector<int>& f, PerturbationKind model,
                                   const std::string& pattern_id = "", const RobustnessOptions& opt = {});

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace rbskit
