#pragma once

#include "rbskit/graph.hpp"
#include "rbskit/modulation.hpp"
#include "rbskit/rwa.hpp"

#include <complex>
#include <iosfwd>
#include <limits>
#include <vector>

namespace rbskit {

// Monochromatic drive on one waveguide: b_in(t) = amplitude * exp(-i omega t) in the lab frame.
struct InputTone {
    double omega = 0.0; // rad/s
    std::complex<double> amplitude = 1.0;
    Side side = Side::L;
};

struct SimulationConfig {
    double duration = std::numeric_limits<double>::quiet_NaN(); // s; NaN means 60 / kappa_min
    double rtol = 1e-9;
    double atol = 1e-12;
    double transient_fraction = 0.5;
};

// Samples on a uniform grid. Times are relative to the start; amplitudes are in the
// frame rotating at omega0.
struct TimeSeries {
    double omega0 = 0.0;
    double dt = 0.0;
    double beat_period = 0.0; // 2 pi / smallest mode splitting
    std::vector<double> t;
    std::vector<Eigen::VectorXcd> a;     // resonator amplitudes
    std::vector<Eigen::VectorXcd> b_out; // one entry per waveguide, in array.waveguides order
    std::vector<Side> out_sides;
    double input_power = 0.0;
    int steps = 0, rejected = 0;
};

// Full cos modulation, no RWA: da/dt = -i (U + eps(t) F) a - (Phi^T Phi / 2 + kappa_int / 2) a - Phi^T b_in.
TimeSeries integrate(const ResonatorArray& array, const ModulationSpec& mod, const std::vector<InputTone>& inputs,
                     const SimulationConfig& cfg = {});

// Hann-windowed Fourier amplitude of b_out on `side` at lab frequency omega over the steady part.
// The window spans an integer number (>= 2) of beat periods.
std::complex<double> demodulate(const TimeSeries& s, Side side, double omega, double transient_fraction = 0.5);

// Entry (r, c) is the output at port r per unit input at port c, ports as in `ports`.
struct EmpiricalTransfer {
    CMatrixXd m;
    std::vector<PortLabel> ports;
    std::vector<double> power_balance; // output power / input power per input port
};

// Frequencies for each port come from the normal modes of the array.
EmpiricalTransfer steady_state_transfer(const ResonatorArray& array, const ModulationSpec& mod,
                                        const std::vector<PortLabel>& ports, const SimulationConfig& cfg = {});

struct ComparisonReport {
    double max_deviation = 0.0; // on |entry|^2
    Eigen::MatrixXd deviation;
    double eps = 0.0;
    double eps_over_delta = 0.0;
    bool pass = false;
    double tol = 0.0;
};

ComparisonReport compare(const TransferMatrix& effective, const EmpiricalTransfer& empirical, double tol,
                         double min_splitting = 0.0);

double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Header: t_ns,re_a0,im_a0,...,re_b0,im_b0,...
void write_series_csv(std::ostream& os, const TimeSeries& s);

} // namespace rbskit
