#pragma once

#include "rbskit/rwa.hpp"

#include <limits>
#include <vector>

namespace rbskit {

// Stages are listed in propagation order; the result is Xi_last ... Xi_first.
// Ports must agree stage to stage (mode index, side, carrier to 1e-9 relative).
// Distinct carriers closer than 3 (kappa_a + kappa_b) / 2 add a warning.
TransferMatrix cascade(const std::vector<TransferMatrix>& stages);

// One two-ring single-waveguide stage. eps NaN selects the target point itself.
struct RingStage {
    double gamma = 0.0; // per-mode rate, Gamma / 2
    double kappa_int = 0.0;
    double eps = std::numeric_limits<double>::quiet_NaN();
    int branch = -1;    // 50-50 branch for the Mach-Zehnder
};

struct PhaseShifter {
    TransferMatrix xi;
    double K_PS = 0.0;
    double relative_phase = 0.0; // arg(Xi_00) - arg(Xi_11), wrapped to (-pi, pi]
    double loss = 0.0;
};

// Two GCC swaps. The stage listed second (the left factor) carries phi1 = mu/2 and the
// first carries phi2 = pi, so Xi = diag(e^{i mu/2}, e^{-i mu/2}) K_PS.
PhaseShifter phase_shifter(double mu, const RingStage& first, const RingStage& second);

struct MachZehnder {
    TransferMatrix xi;
    double K_MZ = 0.0;
    double p_same = 0.0; // |Xi_00|^2
    double p_swap = 0.0; // |Xi_10|^2
};

// Two 50-50 stages; phi1 on the second stage, phi2 = 0 on the first. Probabilities
// come from the product itself. Mixing a minus-branch stage with a plus-branch stage
// exchanges p_same and p_swap relative to the matched-branch fringe.
MachZehnder mach_zehnder(double phi1, const RingStage& first, const RingStage& second);

} // namespace rbskit
