#pragma once

#include "rbskit/graph.hpp"
#include "rbskit/modulation.hpp"
#include "rbskit/slh.hpp"

#include <string>
#include <vector>

namespace rbskit {

// Complex square matrix with labeled ports, ordered mode-ascending then L before R.
struct TransferMatrix {
    CMatrixXd m;
    std::vector<PortLabel> ports;
    double eps = 0.0;
    std::string device;
    std::vector<std::string> warnings;

    Eigen::Index size() const { return m.rows(); }
    // Port index of (mode, side), or -1.
    int port(int mode, Side side = Side::L) const;
};

struct RwaOptions {
    double detuning_rel_tol = 1e-6; // |Delta - omega_d| / Delta for a tone to count as resonant
    double unresolved_ratio = 0.2;  // kappa_k >= ratio * nearest splitting is an error
    double unresolved_warn = 0.1;
    bool validity_guard = true;     // eps >= min splitting is an error, >= half of it a warning
};

struct EffectiveSystem {
    AbcdSystem<double> abcd; // A here is Aeff = A + W
    Eigen::VectorXd frames;  // rotating-frame frequency per mode (rad/s)
    Eigen::VectorXd kappa;   // total linewidth per mode
    CouplingPattern pattern;
    std::vector<std::pair<int, int>> assignment; // (pattern pair, tone) driven by the RWA
    std::vector<int> undriven_pairs;             // pattern pairs with no resonant tone
    std::vector<int> isolated_modes;             // modes outside every driven pair
    std::vector<std::pair<double, int>> inputs;  // carrier -> resonant mode
    double min_splitting = 0.0;
    std::vector<std::string> warnings;
};

EffectiveSystem effective_system(const ResonatorArray& array, const NormalModeBasis& basis,
                                 const ModulationSpec& mod,
                                 const std::vector<double>& input_carriers = {},
                                 const RwaOptions& opt = {});

// Xi(0) = -C Aeff^-1 B + D in the slow frame.
TransferMatrix effective_transfer(const EffectiveSystem& sys);

// Same spec with every tone amplitude replaced by eps.
ModulationSpec with_amplitude(ModulationSpec mod, double eps);

// One-call helper: basis, effective system and transfer at amplitude eps.
TransferMatrix generic_transfer(const ResonatorArray& array, const ModulationSpec& mod, double eps,
                                const std::vector<double>& input_carriers = {},
                                const RwaOptions& opt = {});

enum class Device { two_ring_1wg, two_ring_2wg, block2x2, block4x4, four_way };
Device parse_device(const std::string& name);
const char* device_name(Device d);

// Rates are per normal mode. For the two-mode blocks, *_j < 0 means "same as mode i".
// g_i, g_j are the right-waveguide signs used by block4x4.
struct ClosedFormParams {
    double eps = 0.0;
    double phi = 0.0;
    double kappa_int = 0.0;
    double gammaL = 0.0, gammaR = 0.0;
    double gammaL_j = -1.0, gammaR_j = -1.0;
    double g_i = -1.0, g_j = 1.0;
};

// two_ring_2wg fixes g = (-1, +1); four_way fixes phi1 = pi/2 on the 2u tone and
// phi2 = -pi/2 on the 6u tone.
TransferMatrix closed_form(Device device, const ClosedFormParams& p);

// Block-diagonal assembly; block k acts on pattern pair pairs[k] with its
// ports labeled by local mode 0 (pair.first) and 1 (pair.second).
TransferMatrix assemble_blocks(const std::vector<std::pair<int, int>>& pairs,
                               const std::vector<TransferMatrix>& blocks);

// max over columns of the column 2-norm; <= 1 for a passive device
double max_column_norm(const CMatrixXd& m);

} // namespace rbskit
