#pragma once

#include "rbskit/graph.hpp"

#include <string>
#include <vector>

namespace rbskit {

// One harmonic of the drive: eps * cos(omega_d t + phi).
struct Tone {
    double eps = 0.0;     // rad/s
    double omega_d = 0.0; // rad/s
    double phi = 0.0;     // rad
};

struct ModulationSpec {
    std::vector<int> signs; // f_j in {-1, 0, +1}
    std::vector<Tone> tones;
};

void validate(const ModulationSpec& m, int n);

struct PatternPair {
    int i = 0, j = 0; // mode indices, i < j
    double w = 0.0;   // entry of V^T diag(f) V
};

struct CouplingPattern {
    std::vector<PatternPair> pairs;
    Eigen::VectorXd diagonal;
};

// Entries of V^T diag(f) V, pruned below 1e-12.
Eigen::MatrixXd drive_matrix(const Eigen::MatrixXd& V, const std::vector<int>& f);
CouplingPattern pattern_from_signs(const NormalModeBasis& basis, const std::vector<int>& f);

enum class RectPattern { P1, P2, P3 };
RectPattern parse_rect_pattern(const std::string& s);

// Signs (-1)^{l+m}, (-1)^{m+1}, (-1)^{l+1} in lattice_index order.
std::vector<int> rectangular_pattern_signs(int L, int M, RectPattern which);

struct ToneTable {
    std::vector<double> splittings; // distinct |omega_j - omega_i|, ascending
    std::vector<int> pair_tone;     // index into splittings per pattern pair
};

ToneTable required_tones(const CouplingPattern& pattern, const Eigen::VectorXd& frequencies);

} // namespace rbskit
