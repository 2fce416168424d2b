#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace rbskit {

enum class Side { L, R };

inline char side_char(Side s) { return s == Side::L ? 'L' : 'R'; }

struct Coupling {
    int i = 0;
    int j = 0;
    double u = 0.0; // rad/s
};

struct Waveguide {
    int node = 0;
    double gamma = 0.0; // rad/s
    Side side = Side::L;
};

// Unweighted simple graph; may be disconnected.
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
};

// Weighted coupling graph of identical rings plus waveguide attachments.
// Indices are 0-based. Construct through build_array so invariants hold.
struct ResonatorArray {
    int n = 0;
    double omega0 = 0.0;
    std::vector<Coupling> couplings;
    std::vector<Waveguide> waveguides;
    double kappa_int = 0.0;

    std::optional<Waveguide> waveguide(Side s) const;
};

// Columns of `vectors` are the modes c_k expressed on the resonators.
struct NormalModeBasis {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd frequencies;
    Eigen::VectorXd gammaL, gammaR; // per-mode rates
    Eigen::VectorXd gL, gR;         // sign of the attachment-row entry
    std::vector<std::pair<int, int>> labels; // (p,q) for rectangular lattices

    int size() const { return static_cast<int>(frequencies.size()); }
};

ResonatorArray build_array(int n, double omega0, std::vector<Coupling> couplings,
                           std::vector<Waveguide> waveguides, double kappa_int);

Graph connectivity(const ResonatorArray& a);
bool is_connected(const Graph& g);

// h0 = omega0 I + u-matrix. coupling_matrix() omits the omega0 I part.
Eigen::MatrixXd coupling_matrix(const ResonatorArray& a);
Eigen::MatrixXd hamiltonian(const ResonatorArray& a);

NormalModeBasis normal_modes(const ResonatorArray& a);

// Closed-form discrete-sine basis of an L x M lattice with coupling v along
// l (rows) and u along m (columns). Rates are zero until attach_rates.
NormalModeBasis rectangular_modes(int L, int M, double u, double v, double omega0);

void attach_rates(NormalModeBasis& basis, const ResonatorArray& a);

// Lattice node (l,m), both 1-based, to 0-based resonator index.
inline int lattice_index(int M, int l, int m) { return (l - 1) * M + (m - 1); }

ResonatorArray rectangular_array(int L, int M, double u, double v, double omega0,
                                 std::vector<Waveguide> waveguides = {}, double kappa_int = 0.0);

// Two rings; the left waveguide sits on ring 0, the right one (if gammaR > 0) on ring 1.
ResonatorArray two_ring(double omega0, double u, double GammaL, double GammaR = 0.0,
                        double kappa_int = 0.0);

// Four-ring cycle 0-1-2-3-0 with u on (0,1),(2,3) and v on (1,2),(0,3).
// Left waveguide on ring 0; right waveguide (if GammaR > 0) on ring 2.
ResonatorArray four_ring(double omega0, double u, double v, double GammaL, double GammaR = 0.0,
                         double kappa_int = 0.0);

// Frequencies closer than 1e-9 * max|omega| are degenerate.
double degeneracy_tol(const Eigen::VectorXd& freqs);
std::vector<std::vector<int>> degenerate_groups(const Eigen::VectorXd& freqs);

} // namespace rbskit
